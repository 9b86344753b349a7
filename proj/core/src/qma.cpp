#include "symham/qma.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "symham/detail/path_bfs.hpp"
#include "symham/gates.hpp"

namespace symham {
namespace qma {

namespace {

int ql_index(int q, int l, int head) { return q * 16 + l * 8 + head; }

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
      if (s.q < 0 || s.q > 2) throw std::invalid_argument("qma site_to_index: bad program value");
      return ql_index(s.q, 1, s.head);
    case Site::Kind::Data:
      if (s.q != 0 && s.q != 1)
        throw std::invalid_argument("qma site_to_index: symbolic data qubit has no index");
      return ql_index(s.q, 0, s.head);
  }
  throw std::logic_error("qma site_to_index");
}

Site site_from_index(int index) {
  if (index < 0 || index >= kSiteDim) throw std::out_of_range("qma site_from_index");
  if (index == kMIndex) return Site::m_level();
  const int q = index / 16;
  const int l = (index % 16) / 8;
  const int head = index % 8;
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
    if (s.kind != Site::Kind::MLevel) {
      if (s.head == 1) os << "+n1";
      else if (s.head >= 2) os << "+h" << s.head_active() << s.head_program();
    }
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
    auto plus = tok.find("+h");
    if (plus != std::string::npos) {
      base = tok.substr(0, plus);
      const std::string suffix = tok.substr(plus + 2);
      if (suffix.size() != 2 || suffix[0] < '0' || suffix[0] > '2' ||
          (suffix[1] != '0' && suffix[1] != '1'))
        throw std::invalid_argument("qma from_text: bad head suffix in " + tok);
      s.head = static_cast<std::int8_t>(head_index(suffix[0] - '0', suffix[1] - '0'));
    } else if ((plus = tok.find("+n1")) != std::string::npos) {
      base = tok.substr(0, plus);
      s.head = 1;
    }
    if (base == "m") {
      if (s.head != 0) throw std::invalid_argument("qma from_text: m level cannot carry a head");
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
      throw std::invalid_argument("qma from_text: unknown token " + tok);
    }
    c.push_back(s);
  }
  if (c.empty()) throw std::invalid_argument("qma from_text: empty configuration");
  return c;
}

Configuration strip_data(const Configuration& c) {
  Configuration out = c;
  for (Site& s : out)
    if (s.kind == Site::Kind::Data) s.q = -1;
  return out;
}

Configuration initial_configuration(const std::vector<globalprog::CommandKind>& tape,
                                    const std::vector<int>& data_bits, bool with_marker) {
  if (tape.empty()) throw std::invalid_argument("qma initial_configuration: empty tape");
  if (data_bits.empty()) throw std::invalid_argument("qma initial_configuration: empty data block");
  const int m = static_cast<int>(tape.size()) + 1 + static_cast<int>(data_bits.size());
  if (m % 2 == 0)
    throw std::invalid_argument("qma initial_configuration: ring size must be odd");
  Configuration c;
  c.push_back(with_marker ? Site::marker() : Site::program(0));
  bool first = true;
  for (globalprog::CommandKind k : tape) {
    const int q = (k == globalprog::CommandKind::Skip) ? 0 : (k == globalprog::CommandKind::G ? 1 : 2);
    c.push_back(Site::program(q, first ? 1 : 0));  // the roving checker starts here
    first = false;
  }
  for (int b : data_bits) {
    if (b != 0 && b != 1)
      throw std::invalid_argument("qma initial_configuration: data bits must be 0/1");
    c.push_back(Site::data(b));
  }
  return c;
}

// ---- full-space operator -------------------------------------------------

namespace {

std::vector<PairElement> extended_bond_elements() {
  struct QL {
    int q, l;
  };
  std::vector<QL> all_ql;
  for (int q = 0; q < 3; ++q)
    for (int l = 0; l < 2; ++l) all_ql.push_back({q, l});
  auto is_marker = [](const QL& x) { return x.q == 2 && x.l == 0; };
  auto is_data = [](const QL& x) { return x.l == 0 && x.q < 2; };

  std::vector<PairElement> elems;

  // walk terms of the underlying machine, head active bit in {0,1}
  for (int a = 0; a < 2; ++a)
    for (int r = 0; r < 2; ++r)
      for (const QL& si : all_ql)
        for (const QL& sj : all_ql) {
          if (is_marker(si) || is_marker(sj)) continue;
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

  // walk onto the marker, from program sites, active heads only
  for (int r = 0; r < 2; ++r)
    for (int q = 0; q < 3; ++q)
      elems.push_back({ql_index(q, 1, 0), ql_index(2, 0, head_index(0, r)),
                       ql_index(q, 1, head_index(1, r)), ql_index(2, 0, 0), 1.0});

  // hand-off from the marker
  for (int r = 0; r < 2; ++r)
    for (const QL& sj : all_ql)
      elems.push_back({ql_index(2, 0, 0), ql_index(sj.q, sj.l, head_index(0, r)),
                       ql_index(2, 0, head_index(1, r)), ql_index(sj.q, sj.l, 0), 1.0});

  // pickup / skip handling via the m level
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      elems.push_back({ql_index(x + 1, 1, 0), ql_index(2, 0, head_index(1, y)),
                       ql_index(2, 0, head_index(0, x)), ql_index(y + 1, 1, 0), 1.0});
  for (int x = 0; x < 2; ++x)
    elems.push_back({ql_index(x + 1, 1, 0), kMIndex, ql_index(2, 0, head_index(0, x)),
                     ql_index(0, 1, 0), 1.0});
  for (int y = 0; y < 2; ++y)
    elems.push_back({ql_index(0, 1, 0), ql_index(2, 0, head_index(1, y)), kMIndex,
                     ql_index(y + 1, 1, 0), 1.0});
  elems.push_back({ql_index(0, 1, 0), kMIndex, kMIndex, ql_index(0, 1, 0), 1.0});

  // n1 checker walk: onto data sites from anywhere but the marker, and
  // between program sites
  for (const QL& si : all_ql)
    for (const QL& sj : all_ql) {
      const bool ok = (!is_marker(si) && is_data(sj)) || (si.l == 1 && sj.l == 1);
      if (!ok) continue;
      elems.push_back({ql_index(si.q, si.l, 0), ql_index(sj.q, sj.l, 1),
                       ql_index(si.q, si.l, 1), ql_index(sj.q, sj.l, 0), 1.0});
    }

  // n1 conversion at the data -> program transition: into a=2 on a plain
  // program slot, or directly into an inactive head on the marker
  for (const QL& si : all_ql) {
    if (!is_data(si)) continue;
    for (int q = 0; q < 3; ++q)
      elems.push_back({ql_index(si.q, si.l, 0), ql_index(q, 1, head_index(2, 0)),
                       ql_index(si.q, si.l, 1), ql_index(q, 1, 0), 1.0});
    elems.push_back({ql_index(si.q, si.l, 0), ql_index(2, 0, head_index(0, 0)),
                     ql_index(si.q, si.l, 1), ql_index(2, 0, 0), 1.0});
  }

  // a=2 sweep through the program region (never onto the marker)
  for (int r = 0; r < 2; ++r)
    for (int qi = 0; qi < 3; ++qi)
      for (int qj = 0; qj < 3; ++qj)
        elems.push_back({ql_index(qi, 1, 0), ql_index(qj, 1, head_index(2, r)),
                         ql_index(qi, 1, head_index(2, r)), ql_index(qj, 1, 0), 1.0});

  // final conversion: the returned head leaves the marker into the data
  // region as the a=2 output sweep
  for (int x = 0; x < 2; ++x)
    for (const QL& sj : all_ql) {
      if (!is_data(sj)) continue;
      elems.push_back({ql_index(2, 0, 0), ql_index(sj.q, sj.l, head_index(2, x)),
                       ql_index(2, 0, head_index(0, x)), ql_index(sj.q, sj.l, 0), 1.0});
    }

  // a=2 sweep across the data region
  for (int r = 0; r < 2; ++r)
    for (const QL& si : all_ql)
      for (const QL& sj : all_ql) {
        if (!is_data(si) || !is_data(sj)) continue;
        elems.push_back({ql_index(si.q, si.l, 0), ql_index(sj.q, sj.l, head_index(2, r)),
                         ql_index(si.q, si.l, head_index(2, r)), ql_index(sj.q, sj.l, 0), 1.0});
      }

  append_conjugates(elems);
  return elems;
}

}  // namespace

SparseOperator build_extended_ht(int ring_sites) {
  if (ring_sites < 3) throw std::invalid_argument("build_extended_ht: need at least 3 sites");
  if (ring_sites > 4) throw std::length_error("build_extended_ht: full-space build capped at 4 sites");
  const std::vector<PairElement> elems = extended_bond_elements();
  std::vector<Triplet> triplets;
  for (int bond = 0; bond < ring_sites; ++bond)
    emit_two_site_term(triplets, elems, kSiteDim, ring_sites, bond, /*periodic=*/true);
  return SparseOperator::from_triplets(ipow(kSiteDim, ring_sites), std::move(triplets),
                                       Symmetry::Hermitian);
}

SparseOperator bond_operator_extended() {
  std::vector<Triplet> triplets;
  for (const PairElement& e : extended_bond_elements())
    triplets.push_back({Index(e.bra_a) * kSiteDim + e.bra_b, Index(e.ket_a) * kSiteDim + e.ket_b,
                        e.value});
  return SparseOperator::from_triplets(Index(kSiteDim) * kSiteDim, std::move(triplets),
                                       Symmetry::Hermitian);
}

// ---- machine rules --------------------------------------------------------

namespace {

using Move = detail::PathMove<Configuration, GateAction>;

bool empty_head(const Site& s) { return s.kind != Site::Kind::MLevel && s.head == 0; }
bool walker(const Site& s) { return s.has_head() && s.head_active() <= 1; }
bool sweeper(const Site& s) { return s.has_head() && s.head_active() == 2; }

void moves_on_bond(const Configuration& c, int i, std::vector<Move>& out) {
  const int m = static_cast<int>(c.size());
  const int j = (i + 1) % m;
  const Site& si = c[static_cast<size_t>(i)];
  const Site& sj = c[static_cast<size_t>(j)];
  const int bond = i + 1;

  auto push = [&](Configuration to, GateAction act, bool forward) {
    out.push_back({std::move(to), act, forward});
  };
  auto is_data = [](const Site& s) { return s.kind == Site::Kind::Data; };
  auto is_prog = [](const Site& s) { return s.kind == Site::Kind::Program; };

  // walker hop (a in {0,1})
  if (walker(si) && si.kind != Site::Kind::Marker && empty_head(sj) &&
      sj.kind != Site::Kind::Marker) {
    const int a = si.head_active(), r = si.head_program();
    Configuration to = c;
    to[static_cast<size_t>(i)].head = 0;
    to[static_cast<size_t>(j)].head = static_cast<std::int8_t>(head_index(1 - a, r));
    GateAction act;
    if (a == 1 && is_data(si) && is_data(sj)) act = {r, bond, false};
    push(std::move(to), act, true);
  }
  if (walker(sj) && sj.kind != Site::Kind::Marker && empty_head(si) &&
      si.kind != Site::Kind::Marker) {
    const int a_bef = 1 - sj.head_active(), r = sj.head_program();
    Configuration to = c;
    to[static_cast<size_t>(j)].head = 0;
    to[static_cast<size_t>(i)].head = static_cast<std::int8_t>(head_index(a_bef, r));
    GateAction act;
    if (a_bef == 1 && is_data(si) && is_data(sj)) act = {r, bond, false};
    push(std::move(to), act, false);
  }
  // walk onto the marker (active, from a program site)
  if (is_prog(si) && si.has_head() && si.head_active() == 1 && sj.kind == Site::Kind::Marker &&
      sj.head == 0) {
    Configuration to = c;
    to[static_cast<size_t>(i)].head = 0;
    to[static_cast<size_t>(j)].head = static_cast<std::int8_t>(head_index(0, si.head_program()));
    push(std::move(to), {}, true);
  }
  if (sj.kind == Site::Kind::Marker && sj.has_head() && sj.head_active() == 0 && is_prog(si) &&
      si.head == 0) {
    Configuration to = c;
    to[static_cast<size_t>(j)].head = 0;
    to[static_cast<size_t>(i)].head = static_cast<std::int8_t>(head_index(1, sj.head_program()));
    push(std::move(to), {}, false);
  }
  // hand-off
  if (si.kind == Site::Kind::Marker && si.has_head() && si.head_active() == 1 && empty_head(sj)) {
    Configuration to = c;
    to[static_cast<size_t>(i)].head = 0;
    to[static_cast<size_t>(j)].head = static_cast<std::int8_t>(head_index(0, si.head_program()));
    push(std::move(to), {}, true);
  }
  if (si.kind == Site::Kind::Marker && si.head == 0 && sj.kind != Site::Kind::MLevel &&
      sj.has_head() && sj.head_active() == 0) {
    Configuration to = c;
    to[static_cast<size_t>(j)].head = 0;
    to[static_cast<size_t>(i)].head = static_cast<std::int8_t>(head_index(1, sj.head_program()));
    push(std::move(to), {}, false);
  }
  // pickup
  if (si.kind == Site::Kind::Marker && si.has_head() && si.head_active() == 0 && is_prog(sj) &&
      sj.q >= 1 && sj.head == 0) {
    Configuration to = c;
    to[static_cast<size_t>(i)] = Site::program(si.head_program() + 1);
    to[static_cast<size_t>(j)] = Site::marker(head_index(1, sj.q - 1));
    push(std::move(to), {}, true);
  }
  if (is_prog(si) && si.q >= 1 && si.head == 0 && sj.kind == Site::Kind::Marker && sj.has_head() &&
      sj.head_active() == 1) {
    Configuration to = c;
    to[static_cast<size_t>(i)] = Site::marker(head_index(0, si.q - 1));
    to[static_cast<size_t>(j)] = Site::program(sj.head_program() + 1);
    push(std::move(to), {}, false);
  }
  // skip absorb / emit / slide
  if (si.kind == Site::Kind::Marker && si.has_head() && si.head_active() == 0 && is_prog(sj) &&
      sj.q == 0 && sj.head == 0) {
    Configuration to = c;
    to[static_cast<size_t>(i)] = Site::program(si.head_program() + 1);
    to[static_cast<size_t>(j)] = Site::m_level();
    push(std::move(to), {}, true);
  }
  if (is_prog(si) && si.q >= 1 && si.head == 0 && sj.kind == Site::Kind::MLevel) {
    Configuration to = c;
    to[static_cast<size_t>(i)] = Site::marker(head_index(0, si.q - 1));
    to[static_cast<size_t>(j)] = Site::program(0);
    push(std::move(to), {}, false);
  }
  if (si.kind == Site::Kind::MLevel && is_prog(sj) && sj.q >= 1 && sj.head == 0) {
    Configuration to = c;
    to[static_cast<size_t>(i)] = Site::program(0);
    to[static_cast<size_t>(j)] = Site::marker(head_index(1, sj.q - 1));
    push(std::move(to), {}, true);
  }
  if (is_prog(si) && si.q == 0 && si.head == 0 && sj.kind == Site::Kind::Marker && sj.has_head() &&
      sj.head_active() == 1) {
    Configuration to = c;
    to[static_cast<size_t>(i)] = Site::m_level();
    to[static_cast<size_t>(j)] = Site::program(sj.head_program() + 1);
    push(std::move(to), {}, false);
  }
  if (si.kind == Site::Kind::MLevel && is_prog(sj) && sj.q == 0 && sj.head == 0) {
    Configuration to = c;
    to[static_cast<size_t>(i)] = Site::program(0);
    to[static_cast<size_t>(j)] = Site::m_level();
    push(std::move(to), {}, true);
  }
  if (is_prog(si) && si.q == 0 && si.head == 0 && sj.kind == Site::Kind::MLevel) {
    Configuration to = c;
    to[static_cast<size_t>(i)] = Site::m_level();
    to[static_cast<size_t>(j)] = Site::program(0);
    push(std::move(to), {}, false);
  }
  // n1 checker walk
  {
    const bool cond_fwd = (si.kind != Site::Kind::Marker && si.kind != Site::Kind::MLevel &&
                           is_data(sj)) ||
                          (is_prog(si) && is_prog(sj));
    if (si.kind != Site::Kind::MLevel && si.head == 1 && empty_head(sj) && cond_fwd) {
      Configuration to = c;
      to[static_cast<size_t>(i)].head = 0;
      to[static_cast<size_t>(j)].head = 1;
      push(std::move(to), {}, true);
    }
    if (sj.kind != Site::Kind::MLevel && sj.head == 1 && empty_head(si) && cond_fwd) {
      Configuration to = c;
      to[static_cast<size_t>(j)].head = 0;
      to[static_cast<size_t>(i)].head = 1;
      push(std::move(to), {}, false);
    }
  }
  // n1 conversion at the data -> program transition
  if (is_data(si) && si.head == 1) {
    if (is_prog(sj) && sj.head == 0) {
      Configuration to = c;
      to[static_cast<size_t>(i)].head = 0;
      to[static_cast<size_t>(j)].head = static_cast<std::int8_t>(head_index(2, 0));
      push(std::move(to), {}, true);
    }
    if (sj.kind == Site::Kind::Marker && sj.head == 0) {
      Configuration to = c;
      to[static_cast<size_t>(i)].head = 0;
      to[static_cast<size_t>(j)].head = static_cast<std::int8_t>(head_index(0, 0));
      push(std::move(to), {}, true);
    }
  }
  if (is_data(si) && si.head == 0 && is_prog(sj) && sweeper(sj) && sj.head_program() == 0 &&
      sj.head_active() == 2) {
    Configuration to = c;
    to[static_cast<size_t>(i)].head = 1;
    to[static_cast<size_t>(j)].head = 0;
    push(std::move(to), {}, false);
  }
  if (is_data(si) && si.head == 0 && sj.kind == Site::Kind::Marker && sj.has_head() &&
      sj.head_active() == 0 && sj.head_program() == 0) {
    Configuration to = c;
    to[static_cast<size_t>(i)].head = 1;
    to[static_cast<size_t>(j)].head = 0;
    push(std::move(to), {}, false);
  }
  // a=2 sweep through the program region
  if (is_prog(si) && sweeper(si) && is_prog(sj) && sj.head == 0) {
    Configuration to = c;
    to[static_cast<size_t>(i)].head = 0;
    to[static_cast<size_t>(j)].head = si.head;
    push(std::move(to), {}, true);
  }
  if (is_prog(si) && si.head == 0 && is_prog(sj) && sweeper(sj)) {
    Configuration to = c;
    to[static_cast<size_t>(j)].head = 0;
    to[static_cast<size_t>(i)].head = sj.head;
    push(std::move(to), {}, false);
  }
  // final conversion off the marker into the data region
  if (si.kind == Site::Kind::Marker && si.has_head() && si.head_active() == 0 && is_data(sj) &&
      sj.head == 0) {
    Configuration to = c;
    to[static_cast<size_t>(i)].head = 0;
    to[static_cast<size_t>(j)].head = static_cast<std::int8_t>(head_index(2, si.head_program()));
    push(std::move(to), {}, true);
  }
  if (si.kind == Site::Kind::Marker && si.head == 0 && is_data(sj) && sweeper(sj)) {
    Configuration to = c;
    to[static_cast<size_t>(j)].head = 0;
    to[static_cast<size_t>(i)].head = static_cast<std::int8_t>(head_index(0, sj.head_program()));
    push(std::move(to), {}, false);
  }
  // a=2 sweep across the data region
  if (is_data(si) && sweeper(si) && is_data(sj) && sj.head == 0) {
    Configuration to = c;
    to[static_cast<size_t>(i)].head = 0;
    to[static_cast<size_t>(j)].head = si.head;
    push(std::move(to), {}, true);
  }
  if (is_data(si) && si.head == 0 && is_data(sj) && sweeper(sj)) {
    Configuration to = c;
    to[static_cast<size_t>(j)].head = 0;
    to[static_cast<size_t>(i)].head = sj.head;
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
      [](const Configuration& c) { return to_text(c); }, 500000, "qma::reachable_clock_path");
  ClockPath path;
  path.nodes = std::move(closure.nodes);
  path.edge_actions = std::move(closure.edge_actions);
  path.initial_index = closure.initial_index;
  for (const Site& s : init)
    if (s.kind == Site::Kind::Data) ++path.n_data;
  return path;
}

// ---- penalties -------------------------------------------------------------

namespace {

struct PenaltyEval {
  const QmaInstance& inst;
  int bus_size;

  double h_in(const Configuration& c) const {
    double total = 0.0;
    for (const auto& [pos, want] : inst.x_targets) {
      const Site& s = c[static_cast<size_t>(pos) - 1];
      if (s.kind == Site::Kind::MLevel || s.head != 1) continue;
      const bool program_slot = pos <= bus_size;
      const bool ok = program_slot ? (s.kind == Site::Kind::Program && s.q == want)
                                   : (s.kind == Site::Kind::Data && s.q == want);
      if (!ok) total += 1.0;
    }
    return total;
  }

  double h_out(const Configuration& c) const {
    const Site& s = c[static_cast<size_t>(inst.output_site) - 1];
    if (s.kind == Site::Kind::MLevel) return 0.0;
    return (s.has_head() && s.head_active() == 2 && s.q == 0) ? 1.0 : 0.0;
  }

  double h_b(const Configuration& c) const {
    double total = 0.0;
    for (size_t p = 0; p < c.size(); ++p) {
      const Site& s = c[p];
      if (s.kind == Site::Kind::MLevel) continue;
      if (static_cast<int>(p) + 1 <= bus_size) {
        if (s.kind == Site::Kind::Data) total += 1.0;  // program slot holding a data qubit
      } else {
        if (s.kind != Site::Kind::Data) total += 1.0;  // data slot holding program/marker
      }
    }
    return total;
  }
};

Configuration decode(Index idx, int m) {
  Configuration c(static_cast<size_t>(m));
  for (int p = m - 1; p >= 0; --p) {
    c[static_cast<size_t>(p)] = site_from_index(static_cast<int>(idx % kSiteDim));
    idx /= kSiteDim;
  }
  return c;
}

int bus_size_of(const QmaInstance& inst) { return static_cast<int>(inst.tape.size()) + 1; }

void check_instance(const QmaInstance& inst) {
  const int m = inst.ring_sites;
  if (m < 3) throw std::invalid_argument("QmaInstance: ring too small");
  const int bus = bus_size_of(inst);
  if (bus >= m) throw std::invalid_argument("QmaInstance: no room for data sites");
  if (inst.output_site <= bus || inst.output_site > m)
    throw std::invalid_argument("QmaInstance: output must sit on a data site");
  for (const auto& [pos, want] : inst.x_targets) {
    if (pos < 2 || pos > m || pos == 1)
      throw std::invalid_argument("QmaInstance: target outside the checkable range");
    const int limit = pos <= bus ? 2 : 1;
    if (want < 0 || want > limit) throw std::invalid_argument("QmaInstance: bad target value");
  }
}

}  // namespace

Penalties build_penalties(const QmaInstance& instance) {
  check_instance(instance);
  const int m = instance.ring_sites;
  if (m > 4) throw std::length_error("build_penalties: full-space build capped at 4 sites");
  const Index dim = ipow(kSiteDim, m);
  const PenaltyEval eval{instance, bus_size_of(instance)};

  std::vector<Triplet> tin, tout, tb;
  for (Index idx = 0; idx < dim; ++idx) {
    const Configuration c = decode(idx, m);
    const double vin = eval.h_in(c);
    const double vout = eval.h_out(c);
    const double vb = eval.h_b(c);
    if (vin != 0.0) tin.push_back({idx, idx, vin});
    if (vout != 0.0) tout.push_back({idx, idx, vout});
    if (vb != 0.0) tb.push_back({idx, idx, vb});
  }
  Penalties p;
  p.h_in = SparseOperator::from_triplets(dim, std::move(tin));
  p.h_out = SparseOperator::from_triplets(dim, std::move(tout));
  p.h_b = SparseOperator::from_triplets(dim, std::move(tb));
  return p;
}

GapBounds gap_lower_bounds(int m_sites) {
  if (m_sites < 2) throw std::invalid_argument("gap_lower_bounds: need M >= 2");
  const double pi = std::numbers::pi;
  GapBounds g;
  g.short_path = -2.0 * std::cos(pi / (m_sites + 1)) + 2.0 * std::cos(pi / (m_sites + 2));
  g.excited = -2.0 * std::cos(2.0 * pi / (m_sites + 2)) + 2.0 * std::cos(pi / (m_sites + 2));
  return g;
}

bool CouplingSchedule::satisfied() const {
  const double slack = 1e-9;
  if (j_in + slack < 8.0 * j_out * j_out + 2.0 * j_out) return false;
  const double need = 8.0 * (j_out + j_in) * (j_out + j_in) + 2.0 * (j_out + j_in);
  return std::min(j_b, j_0 * delta_e) + slack * need >= need;
}

CouplingSchedule schedule_couplings(int m_sites, double epsilon) {
  if (m_sites < 2) throw std::invalid_argument("schedule_couplings: need M >= 2");
  if (epsilon < 0.0 || epsilon >= 1.0)
    throw std::invalid_argument("schedule_couplings: epsilon must be in [0,1)");
  const double pi = std::numbers::pi;
  CouplingSchedule s;
  s.epsilon = epsilon;
  const double sn = std::sin(pi / (m_sites + 2));
  s.j_out = (m_sites + 1) / (sn * sn);
  s.j_in = 8.0 * s.j_out * s.j_out + 2.0 * s.j_out;
  const GapBounds g = gap_lower_bounds(m_sites);
  s.delta_e = std::min(g.short_path, g.excited);
  const double need = 8.0 * (s.j_out + s.j_in) * (s.j_out + s.j_in) + 2.0 * (s.j_out + s.j_in);
  s.j_b = need;
  s.j_0 = need / s.delta_e;
  if (!s.satisfied()) throw std::logic_error("schedule_couplings: invariants violated");
  return s;
}

ProjectionBound projection_lemma_bound(const SparseOperator& h1, const SparseOperator& h2,
                                       const ComplexMatrix& s_basis, double tol) {
  if (h1.dim() != h2.dim()) throw std::invalid_argument("projection_lemma_bound: dimension mismatch");
  if (s_basis.rows() != h1.dim() || s_basis.cols() < 1)
    throw std::invalid_argument("projection_lemma_bound: bad subspace basis");
  const ComplexMatrix m1 = h1.to_dense();
  const ComplexMatrix m2 = h2.to_dense();

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es2(m2);
  const double n2 = std::max(std::abs(es2.eigenvalues()(0)),
                             std::abs(es2.eigenvalues()(h2.dim() - 1)));
  if (es2.eigenvalues()(0) < -1e-9 * std::max(n2, 1.0))
    throw std::invalid_argument("projection_lemma_bound: H2 must be positive semidefinite");
  if ((m2 * s_basis).cwiseAbs().maxCoeff() > 1e-9 * std::max(n2, 1.0))
    throw std::invalid_argument("projection_lemma_bound: S must span the kernel of H2");

  double j = 0.0;
  for (Index i = 0; i < h2.dim(); ++i)
    if (es2.eigenvalues()(i) > 1e-9 * std::max(n2, 1.0)) {
      j = es2.eigenvalues()(i);
      break;
    }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es1(m1);
  const double n1 = std::max(std::abs(es1.eigenvalues()(0)),
                             std::abs(es1.eigenvalues()(h1.dim() - 1)));
  if (j <= 2.0 * n1)
    throw std::invalid_argument("projection_lemma_bound: J <= 2||H1||, lemma inapplicable");

  // orthonormalize S and restrict H1
  Eigen::HouseholderQR<ComplexMatrix> qr(s_basis);
  const ComplexMatrix q =
      qr.householderQ() * ComplexMatrix::Identity(s_basis.rows(), s_basis.cols());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> esr(q.adjoint() * m1 * q);

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> est(m1 + m2);
  ProjectionBound out;
  out.lhs = esr.eigenvalues()(0) - n1 * n1 / (j - 2.0 * n1);
  out.rhs = est.eigenvalues()(0);
  out.holds = out.lhs <= out.rhs + tol;
  return out;
}

// ---- separation experiment --------------------------------------------------

std::vector<Index> enumerate_sector(const QmaInstance& instance) {
  check_instance(instance);
  const int m = instance.ring_sites;
  if (m > 4) throw std::length_error("enumerate_sector: scan capped at 4 sites");
  const int bus = bus_size_of(instance);
  const Index dim = ipow(kSiteDim, m);
  std::vector<Index> sector;
  for (Index idx = 0; idx < dim; ++idx) {
    const Configuration c = decode(idx, m);
    int tokens = 0, anchors = 0;  // heads+n1+m, markers+m
    bool legal = true;
    for (int p = 0; p < m; ++p) {
      const Site& s = c[static_cast<size_t>(p)];
      const bool on_bus = p + 1 <= bus;
      if (s.kind == Site::Kind::MLevel) {
        ++tokens;
        ++anchors;
        if (!on_bus) legal = false;
        continue;
      }
      if (on_bus && s.kind == Site::Kind::Data) legal = false;
      if (!on_bus && s.kind != Site::Kind::Data) legal = false;
      if (s.kind == Site::Kind::Marker) ++anchors;
      if (s.head != 0) ++tokens;
    }
    if (legal && tokens == 1 && anchors == 1) sector.push_back(idx);
  }
  return sector;
}

namespace {

SparseOperator restrict_to_sector(const SparseOperator& full, const std::vector<Index>& sector) {
  std::unordered_map<Index, Index> pos;
  pos.reserve(sector.size() * 2);
  for (size_t k = 0; k < sector.size(); ++k) pos[sector[k]] = static_cast<Index>(k);
  std::vector<Triplet> t;
  for (const Triplet& e : full.triplets()) {
    auto r = pos.find(e.row);
    if (r == pos.end()) continue;
    auto c = pos.find(e.col);
    if (c == pos.end()) continue;
    t.push_back({r->second, c->second, e.value});
  }
  return SparseOperator::from_triplets(static_cast<Index>(sector.size()), std::move(t));
}

double sector_ground(const SparseOperator& h, double* residual) {
  const SpectrumResult r = extremal_eigs(h, Which::Smallest, 1, 1e-11);
  if (!r.converged) throw std::runtime_error("energy_separation: eigensolver did not converge");
  if (residual) *residual = r.residuals[0];
  return r.eigenvalues[0];
}

}  // namespace

SeparationResult energy_separation_experiment(int ring_sites, double epsilon,
                                              std::optional<QmaInstance> no_instance,
                                              std::optional<QmaInstance> yes_instance) {
  if (ring_sites != 3)
    throw std::invalid_argument(
        "energy_separation_experiment: the minimal odd full-space ring is 3");

  QmaInstance yes;
  yes.ring_sites = 3;
  yes.tape = {globalprog::CommandKind::G};
  yes.output_site = 3;
  yes.x_targets = {{2, 1}};  // pin the tape slot to its command
  if (yes_instance) yes = *yes_instance;

  QmaInstance no = yes;
  no.x_targets[no.output_site] = 0;  // pin the witness against the output check
  if (no_instance) no = *no_instance;

  check_instance(yes);
  check_instance(no);
  if (yes.ring_sites != ring_sites || no.ring_sites != ring_sites)
    throw std::invalid_argument("energy_separation_experiment: instance ring size mismatch");

  SeparationResult res;

  // the coupling formulas parametrize the clock (XX-chain) length, which for
  // one ring site per command loop is much longer than the ring itself
  const int m = ring_sites;
  {
    const int n_data = m - bus_size_of(yes);
    const ClockPath path = reachable_clock_path(
        initial_configuration(yes.tape, std::vector<int>(static_cast<size_t>(n_data), 1)));
    res.path_nodes = static_cast<int>(path.nodes.size());
  }
  res.m_effective = res.path_nodes - 1;
  res.schedule = schedule_couplings(res.m_effective, epsilon);

  const std::vector<Index> sector = enumerate_sector(yes);
  res.sector_dim = static_cast<Index>(sector.size());
  const SparseOperator ht = restrict_to_sector(build_extended_ht(ring_sites), sector);

  const SpectrumResult top = extremal_eigs(ht, Which::Largest, 1, 1e-11);
  if (!top.converged) throw std::runtime_error("energy_separation: eigensolver did not converge");
  res.kappa = res.schedule.j_0 * top.eigenvalues[0];

  auto assemble = [&](const QmaInstance& inst) {
    const PenaltyEval eval{inst, bus_size_of(inst)};
    std::vector<Triplet> t = ht.scaled(-res.schedule.j_0).triplets();
    for (size_t k = 0; k < sector.size(); ++k) {
      const Configuration c = decode(sector[k], m);
      const double diag = res.schedule.j_b * eval.h_b(c) + res.schedule.j_in * eval.h_in(c) +
                          res.schedule.j_out * eval.h_out(c) + res.kappa;
      t.push_back({static_cast<Index>(k), static_cast<Index>(k), diag});
    }
    return SparseOperator::from_triplets(static_cast<Index>(sector.size()), std::move(t));
  };

  res.lambda_yes = sector_ground(assemble(yes), &res.residual_yes);
  res.lambda_no = sector_ground(assemble(no), &res.residual_no);
  return res;
}

}  // namespace qma
}  // namespace symham
