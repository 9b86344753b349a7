#include "symham/flagpattern.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>
#include <map>
#include <set>

namespace symham {
namespace flagpat {

using nlohmann::json;

ComplexVector psi_minus() {
  ComplexVector s = ComplexVector::Zero(4);
  const double a = 1.0 / std::sqrt(2.0);
  s[1] = a;
  s[2] = -a;
  return s;
}

ComplexMatrix pair_projector(PairFactor::Tag tag, const ComplexVector& state) {
  switch (tag) {
    case PairFactor::Tag::P1: {
      const ComplexVector s = psi_minus();
      return s * s.adjoint();
    }
    case PairFactor::Tag::P3: {
      const ComplexVector s = psi_minus();
      return ComplexMatrix::Identity(4, 4) - s * s.adjoint();
    }
    case PairFactor::Tag::Id:
      return ComplexMatrix::Identity(4, 4);
    case PairFactor::Tag::State:
      return state * state.adjoint();
  }
  throw std::logic_error("pair_projector");
}

namespace {

// canonical +1 eigenstate of each projector tag, used on the state side
ComplexVector tag_state(const PairFactor& f) {
  switch (f.tag) {
    case PairFactor::Tag::P1:
      return psi_minus();
    case PairFactor::Tag::P3: {
      ComplexVector s = ComplexVector::Zero(4);
      s[0] = 1.0;  // |00>
      return s;
    }
    case PairFactor::Tag::Id: {
      ComplexVector s = ComplexVector::Zero(2);
      s[0] = 1.0;  // |0>
      return s;
    }
    case PairFactor::Tag::State:
      return f.state;
  }
  throw std::logic_error("tag_state");
}

}  // namespace

void PairProductPattern::validate() const {
  std::set<int> seen;
  for (const PairFactor& f : factors) {
    if (f.positions.empty() || f.positions.size() > 2)
      throw std::invalid_argument("pattern factor must cover one or two positions");
    for (int p : f.positions) {
      if (p < 0 || p >= span) throw std::invalid_argument("pattern factor outside span");
      if (!seen.insert(p).second) throw std::invalid_argument("pattern factors overlap");
    }
    if (f.tag == PairFactor::Tag::State &&
        f.state.size() != (f.positions.size() == 1 ? 2 : 4))
      throw std::invalid_argument("pattern state dimension mismatch");
  }
  for (int p : free_positions) {
    if (p < 0 || p >= span) throw std::invalid_argument("free position outside span");
    if (!seen.insert(p).second) throw std::invalid_argument("free position overlaps a factor");
  }
}

// ---- contraction engine ------------------------------------------------

namespace {

constexpr int kComponentCap = 32;

// leg index of one position: b*2 + k (bra and ket bits)
using Transfer = Eigen::Matrix4cd;  // T(leg_a, leg_b)

struct TwoFactor {
  int pos_a, pos_b;
  Transfer t;
};

struct Cap {
  enum class Kind { Delta, Vector, Open } kind = Kind::Delta;
  Eigen::Vector4cd v;
};

// per-position wiring: each position has a state-side item and a proj-side
// item; items are either an index into `pairs` or a cap
struct Side {
  int pair = -1;  // index into pairs, -1 = cap
  Cap cap;
};

Transfer state_pair_transfer(const ComplexVector& s) {
  Transfer t;
  for (int ba = 0; ba < 2; ++ba)
    for (int ka = 0; ka < 2; ++ka)
      for (int bb = 0; bb < 2; ++bb)
        for (int kb = 0; kb < 2; ++kb)
          t(ba * 2 + ka, bb * 2 + kb) = std::conj(s[ba * 2 + bb]) * s[ka * 2 + kb];
  return t;
}

Transfer proj_pair_transfer(const ComplexMatrix& p) {
  Transfer t;
  for (int ba = 0; ba < 2; ++ba)
    for (int ka = 0; ka < 2; ++ka)
      for (int bb = 0; bb < 2; ++bb)
        for (int kb = 0; kb < 2; ++kb)
          t(ba * 2 + ka, bb * 2 + kb) = p(ba * 2 + bb, ka * 2 + kb);
  return t;
}

Cap state_single_cap(const ComplexVector& s) {
  Cap c;
  c.kind = Cap::Kind::Vector;
  for (int b = 0; b < 2; ++b)
    for (int k = 0; k < 2; ++k) c.v[b * 2 + k] = std::conj(s[b]) * s[k];
  return c;
}

Cap proj_single_cap(const ComplexMatrix& p) {
  Cap c;
  c.kind = Cap::Kind::Vector;
  for (int b = 0; b < 2; ++b)
    for (int k = 0; k < 2; ++k) c.v[b * 2 + k] = p(b, k);
  return c;
}

Cap delta_cap() {
  Cap c;
  c.kind = Cap::Kind::Delta;
  c.v << 1.0, 0.0, 0.0, 1.0;
  return c;
}

Cap open_cap() {
  Cap c;
  c.kind = Cap::Kind::Open;
  return c;
}

struct Network {
  std::vector<TwoFactor> pairs;
  std::map<int, Side> state_side;  // keyed by absolute position
  std::map<int, Side> proj_side;
};

// contraction of one connected component; returns the spectral norm of the
// residual operator on the open (free) legs, a plain scalar magnitude if
// none are open
double contract_component(const Network& net, const std::vector<int>& positions) {
  if (static_cast<int>(positions.size()) > kComponentCap)
    throw std::length_error("pattern component exceeds the 32-qubit cap (degenerate layout)");

  std::set<int> in_component(positions.begin(), positions.end());
  std::set<int> used_pairs;

  // carried tensor: bond(4) x 4^n_open, plus an optional reference bond for
  // cycle starts
  Eigen::MatrixXcd carry;        // (4 or 16) x 4^n_open
  bool cycle = false;            // carry rows indexed by (ref_leg*4 + cur_leg)
  int n_open = 0;

  auto side_of = [&](int pos, bool state) -> const Side& {
    const auto& m = state ? net.state_side : net.proj_side;
    return m.at(pos);
  };

  // find a starting cap
  int start_pos = -1;
  bool start_state_side = false;
  for (int p : positions) {
    if (side_of(p, true).pair < 0) {
      start_pos = p;
      start_state_side = true;
      break;
    }
    if (side_of(p, false).pair < 0) {
      start_pos = p;
      start_state_side = false;
      break;
    }
  }

  int cur_pos;
  bool next_is_state;  // which side of cur_pos to consume next
  if (start_pos >= 0) {
    const Cap& cap = side_of(start_pos, start_state_side).cap;
    if (cap.kind == Cap::Kind::Open) {
      carry = Eigen::MatrixXcd::Identity(4, 4);  // open leg recorded as columns
      n_open = 1;
    } else {
      carry = Eigen::MatrixXcd(4, 1);
      carry.col(0) = cap.v;
    }
    cur_pos = start_pos;
    next_is_state = !start_state_side;
  } else {
    // cycle: seed with the identity on a reference leg
    cycle = true;
    carry = Eigen::MatrixXcd::Zero(16, 1);
    for (int l = 0; l < 4; ++l) carry(l * 4 + l, 0) = 1.0;
    cur_pos = positions.front();
    next_is_state = true;  // arbitrary; both sides of a cycle position are pairs
  }

  auto apply_transfer = [&](const Transfer& t) {
    const Index cols = carry.cols();
    if (!cycle) {
      Eigen::MatrixXcd next(4, cols);
      next.noalias() = t.transpose() * carry;
      carry = std::move(next);
    } else {
      Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(16, cols);
      for (int ref = 0; ref < 4; ++ref)
        next.block(ref * 4, 0, 4, cols).noalias() =
            t.transpose() * carry.block(ref * 4, 0, 4, cols);
      carry = std::move(next);
    }
  };

  long guard = 4L * kComponentCap + 8;
  while (true) {
    if (--guard < 0) throw std::logic_error("pattern contraction failed to terminate");
    const Side& side = side_of(cur_pos, next_is_state);
    if (side.pair < 0) {
      // terminal cap (path end)
      const Cap& cap = side.cap;
      if (cap.kind == Cap::Kind::Open) {
        // promote the bond to an open leg: columns gain a factor 4
        const Index cols = carry.cols();
        Eigen::MatrixXcd next(1, cols * 4);
        for (int l = 0; l < 4; ++l) next.block(0, l * cols, 1, cols) = carry.row(l);
        carry = std::move(next);
        ++n_open;
      } else {
        carry = (cap.v.transpose() * carry).eval();
      }
      break;
    }
    const TwoFactor& f = net.pairs[static_cast<size_t>(side.pair)];
    if (used_pairs.count(side.pair)) {
      if (!cycle) throw std::logic_error("pattern contraction revisited a factor");
      // cycle closes here: trace ref against current bond
      Eigen::MatrixXcd closed(1, carry.cols());
      closed.setZero();
      for (int l = 0; l < 4; ++l) closed += carry.row(l * 4 + l);
      carry = std::move(closed);
      break;
    }
    used_pairs.insert(side.pair);
    const bool forward = (f.pos_a == cur_pos);
    const int other = forward ? f.pos_b : f.pos_a;
    if (!in_component.count(other)) throw std::logic_error("pattern component mismatch");
    apply_transfer(forward ? f.t : Transfer(f.t.transpose()));
    cur_pos = other;
    next_is_state = !next_is_state;
  }

  if (n_open == 0) {
    if (carry.rows() != 1 || carry.cols() != 1) throw std::logic_error("contraction shape");
    return std::abs(carry(0, 0));
  }
  // assemble the residual operator on the open legs and take its norm
  const Index dim = Index(1) << n_open;
  ComplexMatrix op(dim, dim);
  for (Index row = 0; row < dim; ++row)
    for (Index col = 0; col < dim; ++col) {
      Index idx = 0;
      for (int l = 0; l < n_open; ++l) {
        const Index b = (row >> l) & 1;
        const Index k = (col >> l) & 1;
        idx += (b * 2 + k) << (2 * l);
      }
      op(row, col) = carry(0, idx);
    }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(op);
  double norm = 0.0;
  for (Index i = 0; i < dim; ++i) norm = std::max(norm, std::abs(es.eigenvalues()(i)));
  return norm;
}

}  // namespace

double shifted_expectation(const PairProductPattern& projector,
                           const PairProductPattern& state_period, int shift, int period) {
  projector.validate();
  state_period.validate();
  if (period < 1 || state_period.span != period)
    throw std::invalid_argument("shifted_expectation: state pattern span must equal the period");

  Network net;

  // state side: tile the periodic pattern over every position the shifted
  // projector can touch, with one period of margin on both sides
  const int lo = shift - period - 4;
  const int hi = shift + projector.span + period + 4;
  const int k_min = static_cast<int>(std::floor(double(lo) / period)) - 1;
  const int k_max = static_cast<int>(std::ceil(double(hi) / period)) + 1;
  for (int k = k_min; k <= k_max; ++k) {
    const int off = k * period;
    for (const PairFactor& f : state_period.factors) {
      const ComplexVector s = tag_state(f);
      if (f.positions.size() == 2) {
        const int a = f.positions[0] + off, b = f.positions[1] + off;
        const int id = static_cast<int>(net.pairs.size());
        net.pairs.push_back({a, b, state_pair_transfer(s)});
        net.state_side[a] = {id, {}};
        net.state_side[b] = {id, {}};
      } else {
        net.state_side[f.positions[0] + off] = {-1, state_single_cap(s)};
      }
    }
    for (int p : state_period.free_positions) net.state_side[p + off] = {-1, open_cap()};
  }

  // projector side at offset `shift`; uncovered positions default to identity
  std::vector<int> seeds;
  for (const PairFactor& f : projector.factors) {
    if (f.tag == PairFactor::Tag::Id) continue;  // identity contributes nothing
    const ComplexMatrix p = pair_projector(f.tag, f.state);
    if (f.positions.size() == 2) {
      const int a = f.positions[0] + shift, b = f.positions[1] + shift;
      const int id = static_cast<int>(net.pairs.size());
      net.pairs.push_back({a, b, proj_pair_transfer(p)});
      net.proj_side[a] = {id, {}};
      net.proj_side[b] = {id, {}};
      seeds.push_back(a);
    } else {
      net.proj_side[f.positions[0] + shift] = {-1, proj_single_cap(p)};
      seeds.push_back(f.positions[0] + shift);
    }
  }
  for (const auto& [pos, side] : net.state_side)
    if (!net.proj_side.count(pos)) net.proj_side[pos] = {-1, delta_cap()};
  for (const auto& [pos, side] : net.proj_side)
    if (!net.state_side.count(pos))
      throw std::logic_error("projector touches a position outside the tiled state");

  // connected components seeded from projector factors
  std::set<int> visited;
  double total = 1.0;
  for (int seed : seeds) {
    if (visited.count(seed)) continue;
    std::vector<int> stack = {seed}, comp;
    visited.insert(seed);
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      comp.push_back(p);
      for (const auto* m : {&net.state_side, &net.proj_side}) {
        const Side& s = m->at(p);
        if (s.pair < 0) continue;
        const TwoFactor& f = net.pairs[static_cast<size_t>(s.pair)];
        for (int q : {f.pos_a, f.pos_b})
          if (!visited.count(q)) {
            visited.insert(q);
            stack.push_back(q);
          }
      }
    }
    total *= contract_component(net, comp);
    if (total == 0.0) return 0.0;
  }
  return total;
}

// ---- layout -----------------------------------------------------------

FlagLayout default_flag_layout() {
  FlagLayout l;
  PairProductPattern& p = l.projector;
  p.span = 43;
  // section A: interleaved quad plus one adjacent singlet pair
  p.factors.push_back(PairFactor::p1(0, 2));
  p.factors.push_back(PairFactor::p3(1, 3));
  p.factors.push_back(PairFactor::p1(4, 5));
  // section B: eight adjacent P3 pairs
  for (int s = 6; s <= 20; s += 2) p.factors.push_back(PairFactor::p3(s, s + 1));
  // bridge pair plus the parity-shifting spare qubit
  p.factors.push_back(PairFactor::p1(22, 23));
  p.factors.push_back(PairFactor::id1(24));
  // section C: nine adjacent P3 pairs on the shifted parity
  for (int s = 25; s <= 41; s += 2) p.factors.push_back(PairFactor::p3(s, s + 1));
  p.validate();
  return l;
}

PairProductPattern FlagLayout::state_pattern() const {
  PairProductPattern s;
  s.span = projector.span;
  s.factors = projector.factors;  // tags reinterpret on the state side
  return s;
}

int FlagLayout::p3_pairs_in(int lo, int hi) const {
  int count = 0;
  for (const PairFactor& f : projector.factors)
    if (f.tag == PairFactor::Tag::P3 && f.positions.size() == 2 && f.positions[0] >= lo &&
        f.positions[0] <= hi)
      ++count;
  return count;
}

namespace {

// one full period of the layout's flag state; uncovered positions (the
// logical block and any mutated-away flag qubits) are adversarially free
PairProductPattern periodic_state(const FlagLayout& layout, int period) {
  PairProductPattern state = layout.state_pattern();
  state.span = period;
  std::set<int> covered;
  for (const PairFactor& f : state.factors)
    for (int p : f.positions) covered.insert(p);
  state.free_positions.clear();
  for (int p = 0; p < period; ++p)
    if (!covered.count(p)) state.free_positions.push_back(p);
  return state;
}

}  // namespace

SuppressionReport verify_suppression(const FlagLayout& layout, int period) {
  if (period <= layout.projector.span)
    throw std::invalid_argument("verify_suppression: period must exceed the flag span");
  const PairProductPattern state = periodic_state(layout, period);

  SuppressionReport rep;
  rep.at_zero = shifted_expectation(layout.projector, state, 0, period);
  if (std::abs(rep.at_zero - 1.0) > 1e-12) rep.offenders.push_back({0, rep.at_zero});
  for (int shift = 1; shift < period; ++shift) {
    const double v = shifted_expectation(layout.projector, state, shift, period);
    if (v > 1e-12) rep.offenders.push_back({shift, v});
  }
  rep.passed = rep.offenders.empty();
  return rep;
}

// ---- serialization -----------------------------------------------------

std::string pattern_to_json(const PairProductPattern& p) {
  json out = json::array();
  for (const PairFactor& f : p.factors) {
    json jf;
    jf["pair"] = f.positions;
    switch (f.tag) {
      case PairFactor::Tag::P1: jf["tag"] = "P1"; break;
      case PairFactor::Tag::P3: jf["tag"] = "P3"; break;
      case PairFactor::Tag::Id: jf["tag"] = "ID"; break;
      case PairFactor::Tag::State: {
        jf["tag"] = "state";
        json st = json::array();
        for (Index i = 0; i < f.state.size(); ++i)
          st.push_back({f.state[i].real(), f.state[i].imag()});
        jf["state"] = st;
        break;
      }
    }
    out.push_back(jf);
  }
  for (int fp : p.free_positions) out.push_back({{"pair", {fp}}, {"tag", "free"}});
  return out.dump();
}

PairProductPattern pattern_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (!j.is_array()) throw std::invalid_argument("pattern_from_json: expected an array");
  PairProductPattern p;
  int max_pos = -1;
  for (const auto& jf : j) {
    const std::vector<int> pos = jf.at("pair").get<std::vector<int>>();
    for (int x : pos) max_pos = std::max(max_pos, x);
    const std::string tag = jf.at("tag").get<std::string>();
    if (tag == "free") {
      if (pos.size() != 1) throw std::invalid_argument("pattern_from_json: free takes one position");
      p.free_positions.push_back(pos[0]);
      continue;
    }
    PairFactor f;
    f.positions = pos;
    if (tag == "P1") f.tag = PairFactor::Tag::P1;
    else if (tag == "P3") f.tag = PairFactor::Tag::P3;
    else if (tag == "ID") f.tag = PairFactor::Tag::Id;
    else if (tag == "state") {
      f.tag = PairFactor::Tag::State;
      const auto& st = jf.at("state");
      f.state.resize(static_cast<Index>(st.size()));
      for (size_t i = 0; i < st.size(); ++i)
        f.state[static_cast<Index>(i)] = Complex(st[i][0].get<double>(), st[i][1].get<double>());
    } else {
      throw std::invalid_argument("pattern_from_json: unknown tag " + tag);
    }
    p.factors.push_back(std::move(f));
  }
  p.span = max_pos + 1;
  p.validate();
  return p;
}

// ---- descriptor ---------------------------------------------------------

HrtTermDescriptor hrt_term_descriptor(int bond_index, FlagLayout layout,
                                      std::shared_ptr<dfs::EncodedTwoSiteOperator> encoded) {
  if (bond_index < 1) throw std::invalid_argument("hrt_term_descriptor: bond index from 1");
  if (!encoded) throw std::invalid_argument("hrt_term_descriptor: missing encoded term");
  if (encoded->isometry().n_qubits != 10)
    throw std::invalid_argument("hrt_term_descriptor: logical blocks must hold 10 qubits");
  HrtTermDescriptor d;
  d.bond_index = bond_index;
  d.layout = std::move(layout);
  d.encoded = std::move(encoded);
  return d;
}

HrtApplication apply_descriptor(const HrtTermDescriptor& term, const HrtProbe& probe) {
  if (probe.logical_left.size() != 1024 || probe.logical_right.size() != 1024)
    throw std::invalid_argument("apply_descriptor: logical blocks must have 1024 amplitudes");
  const PairProductPattern state = periodic_state(term.layout, 53);

  // rigid shift of the probe's flag pattern relative to the projector is the
  // same as shifting the projector the other way
  const int shift = ((-probe.flag_shift) % 53 + 53) % 53;
  double overlap = shifted_expectation(term.layout.projector, state, shift, 53);
  if (overlap <= 1e-12) overlap = 0.0;  // suppressed misalignment
  HrtApplication out;
  out.flag_weight = overlap * overlap;  // both flag blocks
  out.logical_out = ComplexVector::Zero(Index(1) << 20);
  if (out.flag_weight == 0.0) return out;

  ComplexVector joint = ComplexVector::Zero(Index(1) << 20);
  for (Index x = 0; x < 1024; ++x) {
    if (probe.logical_left[x] == Complex(0.0, 0.0)) continue;
    for (Index y = 0; y < 1024; ++y)
      joint[x * 1024 + y] = probe.logical_left[x] * probe.logical_right[y];
  }
  out.logical_out = term.encoded->apply(joint) * out.flag_weight;
  return out;
}

}  // namespace flagpat
}  // namespace symham
