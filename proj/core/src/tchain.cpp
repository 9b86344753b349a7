#include "symham/tchain.hpp"

#include <algorithm>
#include <sstream>

#include "symham/detail/path_bfs.hpp"
#include "symham/gates.hpp"
#include "symham/xxchain.hpp"

namespace symham {
namespace tchain {

namespace {

int ql_index(int q, int l, int head) { return q * 10 + l * 5 + head; }

const ComplexMatrix& bond_gate(int kind) {
  static const ComplexMatrix g = globalprog::g_gate();
  static const ComplexMatrix s = swap_gate();
  return kind == 0 ? g : s;
}

}  // namespace

int site_to_index(const Site& s) {
  switch (s.kind) {
    case Site::Kind::MLevel:
      return kMIndex;
    case Site::Kind::Marker:
      return ql_index(2, 0, s.head);
    case Site::Kind::Program:
      if (s.q < 0 || s.q > 2) throw std::invalid_argument("site_to_index: bad program value");
      return ql_index(s.q, 1, s.head);
    case Site::Kind::Data:
      if (s.q != 0 && s.q != 1)
        throw std::invalid_argument("site_to_index: symbolic data qubit has no index");
      return ql_index(s.q, 0, s.head);
  }
  throw std::logic_error("site_to_index");
}

Site site_from_index(int index) {
  if (index < 0 || index >= kSiteDim) throw std::out_of_range("site_from_index");
  if (index == kMIndex) return Site::m_level();
  const int q = index / 10;
  const int l = (index % 10) / 5;
  const int head = index % 5;
  if (l == 1) return Site::program(q, head);
  if (q == 2) return Site::marker(head);
  return Site::data(q, head);
}

std::string to_text(const Configuration& c) {
  std::ostringstream os;
  for (size_t i = 0; i < c.size(); ++i) {
    if (i) os << ' ';
    const Site& s = c[i];
    switch (s.kind) {
      case Site::Kind::MLevel: os << 'm'; break;
      case Site::Kind::Marker: os << "MARK"; break;
      case Site::Kind::Program:
        os << "P:" << (s.q == 0 ? "skip" : s.q == 1 ? "G" : "S");
        break;
      case Site::Kind::Data:
        os << "D:" << (s.q < 0 ? std::string("?") : std::to_string(int(s.q)));
        break;
    }
    if (s.kind != Site::Kind::MLevel && s.head != 0)
      os << "+h" << s.head_active() << s.head_program();
  }
  return os.str();
}

Configuration from_text(const std::string& text) {
  Configuration c;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    Site s;
    std::string base = tok;
    const auto plus = tok.find("+h");
    if (plus != std::string::npos) {
      base = tok.substr(0, plus);
      const std::string suffix = tok.substr(plus + 2);
      if (suffix.size() != 2 || (suffix[0] != '0' && suffix[0] != '1') ||
          (suffix[1] != '0' && suffix[1] != '1'))
        throw std::invalid_argument("from_text: bad head suffix in " + tok);
      s.head = static_cast<std::int8_t>(head_index(suffix[0] - '0', suffix[1] - '0'));
    }
    if (base == "m") {
      if (s.head != 0) throw std::invalid_argument("from_text: m level cannot carry a head");
      s = Site::m_level();
    } else if (base == "MARK") {
      s.kind = Site::Kind::Marker;
      s.q = 2;
    } else if (base == "P:skip") {
      s.kind = Site::Kind::Program;
      s.q = 0;
    } else if (base == "P:G") {
      s.kind = Site::Kind::Program;
      s.q = 1;
    } else if (base == "P:S") {
      s.kind = Site::Kind::Program;
      s.q = 2;
    } else if (base == "D:0" || base == "D:1" || base == "D:?") {
      s.kind = Site::Kind::Data;
      s.q = (base == "D:?") ? -1 : static_cast<std::int8_t>(base[2] - '0');
    } else {
      throw std::invalid_argument("from_text: unknown token " + tok);
    }
    c.push_back(s);
  }
  if (c.empty()) throw std::invalid_argument("from_text: empty configuration");
  return c;
}

Configuration strip_data(const Configuration& c) {
  Configuration out = c;
  for (Site& s : out)
    if (s.kind == Site::Kind::Data) s.q = -1;
  return out;
}

bool is_skeleton(const Configuration& c) {
  for (const Site& s : c)
    if (s.kind == Site::Kind::Data && s.q >= 0) return false;
  return true;
}

ValidityReport check_configuration(const Configuration& c) {
  const int m = static_cast<int>(c.size());
  if (m < 3) return {false, "ring too small"};
  int markers = 0, heads = 0, mlevels = 0, bus_sites = 0;
  for (const Site& s : c) {
    if (s.kind == Site::Kind::Marker) ++markers;
    if (s.kind == Site::Kind::MLevel) ++mlevels;
    if (s.has_head()) ++heads;
    if (s.kind != Site::Kind::Data) ++bus_sites;
  }
  if (bus_sites == 0) return {false, "no program block"};
  const bool token_ok = (markers == 1 && heads == 1 && mlevels == 0) ||
                        (markers == 0 && heads == 0 && mlevels == 1);
  if (!token_ok) return {false, "token count: need one marker plus one head, or one m level"};
  // program arc contiguity: non-data sites must form one ring arc
  int transitions = 0;
  for (int i = 0; i < m; ++i) {
    const bool a = c[static_cast<size_t>(i)].kind != Site::Kind::Data;
    const bool b = c[static_cast<size_t>((i + 1) % m)].kind != Site::Kind::Data;
    if (a != b) ++transitions;
  }
  if (bus_sites != m && transitions != 2) return {false, "program block not contiguous"};
  return {true, ""};
}

Configuration initial_configuration(const std::vector<globalprog::CommandKind>& tape,
                                    const std::vector<int>& data_bits) {
  if (tape.empty()) throw std::invalid_argument("initial_configuration: empty tape");
  if (data_bits.empty()) throw std::invalid_argument("initial_configuration: empty data block");
  const int m = static_cast<int>(tape.size()) + 1 + static_cast<int>(data_bits.size());
  if (m % 2 == 0)
    throw std::invalid_argument("initial_configuration: parity violation, ring size must be odd");
  Configuration c;
  c.push_back(Site::marker(head_index(0, 0)));  // inactive head carrying r=0
  for (globalprog::CommandKind k : tape) {
    const int q = (k == globalprog::CommandKind::Skip) ? 0 : (k == globalprog::CommandKind::G ? 1 : 2);
    c.push_back(Site::program(q));
  }
  for (int b : data_bits) {
    if (b != 0 && b != 1) throw std::invalid_argument("initial_configuration: data bits must be 0/1");
    c.push_back(Site::data(b));
  }
  const ValidityReport rep = check_configuration(c);
  if (!rep.valid) throw std::logic_error("initial_configuration: " + rep.reason);
  return c;
}

// ---- full-space operator ---------------------------------------------------

namespace {

std::vector<PairElement> ht_bond_elements() {
  // (q,l) pairs; the marker is (2,0)
  struct QL {
    int q, l;
  };
  std::vector<QL> all_ql;
  for (int q = 0; q < 3; ++q)
    for (int l = 0; l < 2; ++l) all_ql.push_back({q, l});
  auto is_marker_ql = [](const QL& x) { return x.q == 2 && x.l == 0; };

  std::vector<PairElement> elems;

  // walk: head hops right, active bit toggles, G/S applied on data-data
  // bonds when leaving an active site; neither endpoint is the marker
  for (int a = 0; a < 2; ++a)
    for (int r = 0; r < 2; ++r)
      for (const QL& si : all_ql)
        for (const QL& sj : all_ql) {
          if (is_marker_ql(si) || is_marker_ql(sj)) continue;
          const bool gate_case = (a == 1 && si.l == 0 && sj.l == 0);
          if (gate_case) {
            const ComplexMatrix& g = bond_gate(r);
            for (int qi2 = 0; qi2 < 2; ++qi2)
              for (int qj2 = 0; qj2 < 2; ++qj2) {
                const Complex v = g(qi2 * 2 + qj2, si.q * 2 + sj.q);
                if (v == Complex(0.0, 0.0)) continue;
                elems.push_back({ql_index(qi2, 0, 0), ql_index(qj2, 0, head_index(1 - a, r)),
                                 ql_index(si.q, 0, head_index(a, r)), ql_index(sj.q, 0, 0), v});
              }
          } else {
            elems.push_back({ql_index(si.q, si.l, 0), ql_index(sj.q, sj.l, head_index(1 - a, r)),
                             ql_index(si.q, si.l, head_index(a, r)), ql_index(sj.q, sj.l, 0), 1.0});
          }
        }

  // walk onto the marker: allowed from program sites for active heads only
  for (int r = 0; r < 2; ++r)
    for (int q = 0; q < 3; ++q)
      elems.push_back({ql_index(q, 1, 0), ql_index(2, 0, head_index(0, r)),
                       ql_index(q, 1, head_index(1, r)), ql_index(2, 0, 0), 1.0});

  // hand-off: active head on the marker is emitted right, inactive
  for (int r = 0; r < 2; ++r)
    for (const QL& sj : all_ql)
      elems.push_back({ql_index(2, 0, 0), ql_index(sj.q, sj.l, head_index(0, r)),
                       ql_index(2, 0, head_index(1, r)), ql_index(sj.q, sj.l, 0), 1.0});

  // program manipulation: inactive head on the marker writes its value and
  // the marker moves right, emitting an active head with the next command
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      elems.push_back({ql_index(x + 1, 1, 0), ql_index(2, 0, head_index(1, y)),
                       ql_index(2, 0, head_index(0, x)), ql_index(y + 1, 1, 0), 1.0});

  // skip handling via the m level
  for (int x = 0; x < 2; ++x)
    elems.push_back({ql_index(x + 1, 1, 0), kMIndex, ql_index(2, 0, head_index(0, x)),
                     ql_index(0, 1, 0), 1.0});
  for (int y = 0; y < 2; ++y)
    elems.push_back({ql_index(0, 1, 0), ql_index(2, 0, head_index(1, y)), kMIndex,
                     ql_index(y + 1, 1, 0), 1.0});
  elems.push_back({ql_index(0, 1, 0), kMIndex, kMIndex, ql_index(0, 1, 0), 1.0});

  append_conjugates(elems);
  return elems;
}

}  // namespace

SparseOperator build_ht(int ring_sites) {
  if (ring_sites < 3) throw std::invalid_argument("build_ht: need at least 3 sites");
  if (ring_sites > 4) throw std::length_error("build_ht: full-space build capped at 4 sites");
  const std::vector<PairElement> elems = ht_bond_elements();
  std::vector<Triplet> triplets;
  for (int bond = 0; bond < ring_sites; ++bond)
    emit_two_site_term(triplets, elems, kSiteDim, ring_sites, bond, /*periodic=*/true);
  return SparseOperator::from_triplets(ipow(kSiteDim, ring_sites), std::move(triplets),
                                       Symmetry::Hermitian);
}

SparseOperator bond_operator() {
  std::vector<Triplet> triplets;
  for (const PairElement& e : ht_bond_elements())
    triplets.push_back({Index(e.bra_a) * kSiteDim + e.bra_b, Index(e.ket_a) * kSiteDim + e.ket_b,
                        e.value});
  return SparseOperator::from_triplets(Index(kSiteDim) * kSiteDim, std::move(triplets),
                                       Symmetry::Hermitian);
}

// ---- machine rules (independent of the operator builder) -------------------

namespace {

using Move = detail::PathMove<Configuration, GateAction>;

bool empty_head(const Site& s) { return s.kind != Site::Kind::MLevel && s.head == 0; }

// All rule firings on bond (i, i+1 mod M), forward and inverse directions.
void moves_on_bond(const Configuration& c, int i, std::vector<Move>& out) {
  const int m = static_cast<int>(c.size());
  const int j = (i + 1) % m;
  const Site& si = c[static_cast<size_t>(i)];
  const Site& sj = c[static_cast<size_t>(j)];
  const int bond = i + 1;  // 1-based

  auto push = [&](Configuration to, GateAction act, bool forward) {
    out.push_back({std::move(to), act, forward});
  };

  // walk (forward): head at i hops to j
  if (si.has_head() && si.kind != Site::Kind::Marker && empty_head(sj) &&
      sj.kind != Site::Kind::Marker) {
    const int a = si.head_active(), r = si.head_program();
    Configuration to = c;
    to[static_cast<size_t>(i)].head = 0;
    to[static_cast<size_t>(j)].head = static_cast<std::int8_t>(head_index(1 - a, r));
    GateAction act;
    if (a == 1 && si.kind == Site::Kind::Data && sj.kind == Site::Kind::Data)
      act = {r, bond, false};
    push(std::move(to), act, true);
  }
  // walk (inverse): head at j hops back to i
  if (sj.has_head() && sj.kind != Site::Kind::Marker && empty_head(si) &&
      si.kind != Site::Kind::Marker) {
    const int a_after = sj.head_active(), r = sj.head_program();
    const int a_before = 1 - a_after;
    Configuration to = c;
    to[static_cast<size_t>(j)].head = 0;
    to[static_cast<size_t>(i)].head = static_cast<std::int8_t>(head_index(a_before, r));
    GateAction act;
    if (a_before == 1 && si.kind == Site::Kind::Data && sj.kind == Site::Kind::Data)
      act = {r, bond, false};
    push(std::move(to), act, false);
  }
  // walk onto the marker (forward): active head on a program site lands inactive
  if (si.kind == Site::Kind::Program && si.has_head() && si.head_active() == 1 &&
      sj.kind == Site::Kind::Marker && sj.head == 0) {
    Configuration to = c;
    to[static_cast<size_t>(i)].head = 0;
    to[static_cast<size_t>(j)].head = static_cast<std::int8_t>(head_index(0, si.head_program()));
    push(std::move(to), {}, true);
  }
  // walk onto the marker (inverse)
  if (sj.kind == Site::Kind::Marker && sj.has_head() && sj.head_active() == 0 &&
      si.kind == Site::Kind::Program && si.head == 0) {
    Configuration to = c;
    to[static_cast<size_t>(j)].head = 0;
    to[static_cast<size_t>(i)].head = static_cast<std::int8_t>(head_index(1, sj.head_program()));
    push(std::move(to), {}, false);
  }
  // hand-off (forward): active head on the marker emitted right, inactive
  if (si.kind == Site::Kind::Marker && si.has_head() && si.head_active() == 1 && empty_head(sj)) {
    Configuration to = c;
    to[static_cast<size_t>(i)].head = 0;
    to[static_cast<size_t>(j)].head = static_cast<std::int8_t>(head_index(0, si.head_program()));
    push(std::move(to), {}, true);
  }
  // hand-off (inverse)
  if (si.kind == Site::Kind::Marker && si.head == 0 && sj.kind != Site::Kind::MLevel &&
      sj.has_head() && sj.head_active() == 0) {
    Configuration to = c;
    to[static_cast<size_t>(j)].head = 0;
    to[static_cast<size_t>(i)].head = static_cast<std::int8_t>(head_index(1, sj.head_program()));
    push(std::move(to), {}, false);
  }
  // pickup (forward): inactive head on the marker, program site to the right
  if (si.kind == Site::Kind::Marker && si.has_head() && si.head_active() == 0 &&
      sj.kind == Site::Kind::Program && sj.q >= 1 && sj.head == 0) {
    const int x = si.head_program(), y = sj.q - 1;
    Configuration to = c;
    to[static_cast<size_t>(i)] = Site::program(x + 1);
    to[static_cast<size_t>(j)] = Site::marker(head_index(1, y));
    push(std::move(to), {}, true);
  }
  // pickup (inverse)
  if (si.kind == Site::Kind::Program && si.q >= 1 && si.head == 0 &&
      sj.kind == Site::Kind::Marker && sj.has_head() && sj.head_active() == 1) {
    const int x = si.q - 1, y = sj.head_program();
    Configuration to = c;
    to[static_cast<size_t>(i)] = Site::marker(head_index(0, x));
    to[static_cast<size_t>(j)] = Site::program(y + 1);
    push(std::move(to), {}, false);
  }
  // skip absorb (forward)
  if (si.kind == Site::Kind::Marker && si.has_head() && si.head_active() == 0 &&
      sj.kind == Site::Kind::Program && sj.q == 0 && sj.head == 0) {
    Configuration to = c;
    to[static_cast<size_t>(i)] = Site::program(si.head_program() + 1);
    to[static_cast<size_t>(j)] = Site::m_level();
    push(std::move(to), {}, true);
  }
  // skip absorb (inverse)
  if (si.kind == Site::Kind::Program && si.q >= 1 && si.head == 0 &&
      sj.kind == Site::Kind::MLevel) {
    Configuration to = c;
    to[static_cast<size_t>(i)] = Site::marker(head_index(0, si.q - 1));
    to[static_cast<size_t>(j)] = Site::program(0);
    push(std::move(to), {}, false);
  }
  // skip emit (forward)
  if (si.kind == Site::Kind::MLevel && sj.kind == Site::Kind::Program && sj.q >= 1 &&
      sj.head == 0) {
    Configuration to = c;
    to[static_cast<size_t>(i)] = Site::program(0);
    to[static_cast<size_t>(j)] = Site::marker(head_index(1, sj.q - 1));
    push(std::move(to), {}, true);
  }
  // skip emit (inverse)
  if (si.kind == Site::Kind::Program && si.q == 0 && si.head == 0 &&
      sj.kind == Site::Kind::Marker && sj.has_head() && sj.head_active() == 1) {
    Configuration to = c;
    to[static_cast<size_t>(i)] = Site::m_level();
    to[static_cast<size_t>(j)] = Site::program(sj.head_program() + 1);
    push(std::move(to), {}, false);
  }
  // m slide over a neighboring skip (forward + inverse)
  if (si.kind == Site::Kind::MLevel && sj.kind == Site::Kind::Program && sj.q == 0 &&
      sj.head == 0) {
    Configuration to = c;
    to[static_cast<size_t>(i)] = Site::program(0);
    to[static_cast<size_t>(j)] = Site::m_level();
    push(std::move(to), {}, true);
  }
  if (si.kind == Site::Kind::Program && si.q == 0 && si.head == 0 &&
      sj.kind == Site::Kind::MLevel) {
    Configuration to = c;
    to[static_cast<size_t>(i)] = Site::m_level();
    to[static_cast<size_t>(j)] = Site::program(0);
    push(std::move(to), {}, false);
  }
}

std::vector<Move> all_moves(const Configuration& c) {
  std::vector<Move> out;
  for (int i = 0; i < static_cast<int>(c.size()); ++i) moves_on_bond(c, i, out);
  return out;
}

}  // namespace

ClockPath reachable_clock_path(const Configuration& init_in) {
  const Configuration init = strip_data(init_in);
  auto closure = detail::bfs_path<Configuration, GateAction>(
      init, [](const Configuration& c) { return all_moves(c); },
      [](const Configuration& c) { return to_text(c); }, 200000, "reachable_clock_path");

  ClockPath path;
  path.nodes = std::move(closure.nodes);
  path.edge_actions = std::move(closure.edge_actions);
  path.initial_index = closure.initial_index;
  for (const Site& s : init)
    if (s.kind == Site::Kind::Data) ++path.n_data;
  path.bus_size = static_cast<int>(init.size()) - path.n_data;
  return path;
}

namespace {

// ring position (1-based) -> data qubit number (1-based); requires the data
// block not to wrap around the ring
std::vector<int> data_qubit_numbers(const Configuration& skel) {
  std::vector<int> map(skel.size() + 1, 0);
  int q = 0;
  for (size_t p = 0; p < skel.size(); ++p)
    if (skel[p].kind == Site::Kind::Data) map[p + 1] = ++q;
  // wrap check: data positions must be consecutive
  int first = 0, last = 0;
  for (size_t p = 0; p < skel.size(); ++p)
    if (skel[p].kind == Site::Kind::Data) {
      if (!first) first = static_cast<int>(p + 1);
      last = static_cast<int>(p + 1);
    }
  if (q > 0 && last - first + 1 != q)
    throw std::invalid_argument("data block wraps around the ring; unsupported layout");
  return map;
}

ComplexVector apply_action(const GateAction& act, const ComplexVector& psi,
                           const std::vector<int>& qubit_of, int n_data) {
  if (act.kind < 0) return psi;
  const int d = qubit_of[static_cast<size_t>(act.ring_bond)];
  if (d == 0 || d + 1 > n_data) throw std::logic_error("gate action on a non-data bond");
  ComplexMatrix g = bond_gate(act.kind);
  if (act.dagger) g = g.adjoint().eval();
  return apply_2q(g, psi, n_data, d, d + 1);
}

}  // namespace

std::vector<ComplexVector> staged_states(const ClockPath& path, const ComplexVector& data0) {
  if (path.nodes.empty()) throw std::invalid_argument("staged_states: empty path");
  if (data0.size() != (Index(1) << path.n_data))
    throw std::invalid_argument("staged_states: data state dimension mismatch");
  const std::vector<int> qubit_of = data_qubit_numbers(path.nodes.front());

  std::vector<ComplexVector> staged(path.nodes.size());
  const int i0 = path.initial_index;
  staged[static_cast<size_t>(i0)] = data0;
  for (int k = i0; k + 1 < static_cast<int>(path.nodes.size()); ++k)
    staged[static_cast<size_t>(k) + 1] =
        apply_action(path.edge_actions[static_cast<size_t>(k)], staged[static_cast<size_t>(k)],
                     qubit_of, path.n_data);
  for (int k = i0; k > 0; --k) {
    GateAction rev = path.edge_actions[static_cast<size_t>(k) - 1];
    rev.dagger = !rev.dagger;
    staged[static_cast<size_t>(k) - 1] =
        apply_action(rev, staged[static_cast<size_t>(k)], qubit_of, path.n_data);
  }
  return staged;
}

ComplexVector embed_path_node(const ClockPath& path, int k, const ComplexVector& staged_k) {
  const Configuration& skel = path.nodes.at(static_cast<size_t>(k));
  const int m = static_cast<int>(skel.size());
  const Index full = ipow(kSiteDim, m);
  ComplexVector out = ComplexVector::Zero(full);
  std::vector<int> data_pos;
  for (int p = 0; p < m; ++p)
    if (skel[static_cast<size_t>(p)].kind == Site::Kind::Data) data_pos.push_back(p);
  const int n = static_cast<int>(data_pos.size());
  if (staged_k.size() != (Index(1) << n))
    throw std::invalid_argument("embed_path_node: staged state dimension mismatch");

  for (Index b = 0; b < staged_k.size(); ++b) {
    if (staged_k[b] == Complex(0.0, 0.0)) continue;
    Configuration conc = skel;
    for (int t = 0; t < n; ++t)
      conc[static_cast<size_t>(data_pos[static_cast<size_t>(t)])].q =
          static_cast<std::int8_t>((b >> (n - 1 - t)) & 1);
    Index idx = 0;
    for (int p = 0; p < m; ++p) idx = idx * kSiteDim + site_to_index(conc[static_cast<size_t>(p)]);
    out[idx] += staged_k[b];
  }
  return out;
}

std::vector<globalprog::GlobalCommand> oracle_commands(
    const std::vector<globalprog::CommandKind>& tape, int n_data) {
  (void)n_data;
  const int total = static_cast<int>(tape.size());
  std::vector<globalprog::GlobalCommand> out;
  for (int k = 1; k <= total; ++k) {
    globalprog::GlobalCommand cmd;
    cmd.kind = tape[static_cast<size_t>(k) - 1];
    // command k executes with the marker on ring slot k+1; gates land on
    // data bonds of matching parity
    cmd.align = ((k - total) % 2 != 0) ? globalprog::Alignment::OddPairs
                                       : globalprog::Alignment::EvenPairs;
    out.push_back(cmd);
  }
  return out;
}

ComputationResult run_computation(const std::vector<globalprog::CommandKind>& tape,
                                  const std::vector<int>& data_bits, double epsilon,
                                  double measure_period, long herald_cap) {
  const Configuration init = initial_configuration(tape, data_bits);
  const ClockPath path = reachable_clock_path(init);
  const int len = static_cast<int>(path.nodes.size());
  if (len < 2) throw std::runtime_error("run_computation: frozen launch configuration");
  if (path.initial_index != 0 && path.initial_index != len - 1)
    throw std::logic_error("run_computation: launch configuration is not a path endpoint");

  const int n = path.n_data;
  ComplexVector data0 = ComplexVector::Zero(Index(1) << n);
  {
    Index b = 0;
    for (int bit : data_bits) b = (b << 1) | Index(bit);
    data0[b] = 1.0;
  }
  const std::vector<ComplexVector> staged = staged_states(path, data0);

  const int start = path.initial_index == 0 ? 1 : len;
  const int target = path.initial_index == 0 ? len : 1;
  const xxchain::HoppingChain chain{len, 1.0};
  if (measure_period <= 0.0) measure_period = xxchain::default_measure_period(chain);
  // jittered schedule: fixed periods can leave near-dark stroboscopic modes
  const auto trace = xxchain::heralded_transfer(chain, epsilon, measure_period, start, target,
                                                herald_cap, 0.15);
  if (!trace.succeeded) throw std::runtime_error("run_computation: herald round cap exceeded");

  ComputationResult res;
  res.data_state = staged[static_cast<size_t>(target) - 1];
  res.path_length = len;
  res.herald_rounds = trace.rounds;
  res.total_time = trace.total_time;
  return res;
}

}  // namespace tchain
}  // namespace symham
