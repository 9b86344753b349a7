#include "symham/uqi.hpp"

#include <json.hpp>

namespace symham {
namespace uqi {

using nlohmann::json;

int head_dim(Gadget g) {
  switch (g) {
    case Gadget::Hop: return 2;
    case Gadget::Alternating: return 3;
    case Gadget::TwoGate: return 3;
    case Gadget::Combined: return 5;
  }
  throw std::logic_error("head_dim: bad enum");
}

int combined_head_value(int active, int program) {
  if (active < 0 || active > 1 || program < 0 || program > 1)
    throw std::out_of_range("combined_head_value");
  return 1 + 2 * active + program;
}

UqiChainSpec UqiChainSpec::swap_chain(int n) {
  UqiChainSpec s;
  s.n_sites = n;
  s.gadget = Gadget::Hop;
  s.u = swap_gate();
  return s;
}

namespace {

void check_spec(const UqiChainSpec& s) {
  if (s.n_sites < 2) throw std::invalid_argument("UqiChainSpec: need >= 2 sites");
  if (s.u.rows() != 4 || s.u.cols() != 4 || !is_unitary(s.u))
    throw std::invalid_argument("UqiChainSpec: U must be a 4x4 unitary");
  if (s.gadget == Gadget::TwoGate || s.gadget == Gadget::Combined) {
    if (s.v.rows() != 4 || s.v.cols() != 4 || !is_unitary(s.v))
      throw std::invalid_argument("UqiChainSpec: V must be a 4x4 unitary");
  }
}

int full_space_cap(Gadget g) {
  switch (g) {
    case Gadget::Hop: return 8;
    case Gadget::Alternating:
    case Gadget::TwoGate: return 7;
    case Gadget::Combined: return 6;
  }
  throw std::logic_error("full_space_cap");
}

// Transition rule of one rightward hop: from head value h, returns the head
// value after the hop and the gate applied to the two computational qubits.
struct HopRule {
  int value_after;
  const ComplexMatrix* gate;  // nullptr = identity
};

HopRule hop_rule(const UqiChainSpec& s, int h) {
  switch (s.gadget) {
    case Gadget::Hop:
      return {1, &s.u};
    case Gadget::Alternating:
      return (h == 1) ? HopRule{2, &s.u} : HopRule{1, nullptr};
    case Gadget::TwoGate:
      return (h == 1) ? HopRule{1, &s.u} : HopRule{2, &s.v};
    case Gadget::Combined: {
      const int active = (h - 1) / 2;
      const int program = (h - 1) % 2;
      const ComplexMatrix* g = active ? (program == 0 ? &s.u : &s.v) : nullptr;
      return {combined_head_value(1 - active, program), g};
    }
  }
  throw std::logic_error("hop_rule");
}

}  // namespace

SparseOperator build_uqi(const UqiChainSpec& spec) {
  check_spec(spec);
  const int n = spec.n_sites;
  if (n > full_space_cap(spec.gadget))
    throw std::length_error("build_uqi: full-space size cap exceeded");
  const int hd = head_dim(spec.gadget);
  const int d = 2 * hd;

  std::vector<PairElement> elems;
  for (int h = 1; h < hd; ++h) {
    const HopRule rule = hop_rule(spec, h);
    for (int qi = 0; qi < 2; ++qi)
      for (int qj = 0; qj < 2; ++qj)
        for (int qi2 = 0; qi2 < 2; ++qi2)
          for (int qj2 = 0; qj2 < 2; ++qj2) {
            const Complex g = rule.gate ? (*rule.gate)(qi2 * 2 + qj2, qi * 2 + qj)
                                        : Complex(qi2 == qi && qj2 == qj ? 1.0 : 0.0, 0.0);
            if (g == Complex(0.0, 0.0)) continue;
            // ket: head h at left site, none at right; bra: none left, hopped value right
            elems.push_back({0 * 2 + qi2, rule.value_after * 2 + qj2, h * 2 + qi, 0 * 2 + qj, g});
          }
  }
  append_conjugates(elems);

  std::vector<Triplet> triplets;
  for (int bond = 0; bond + 1 < n; ++bond)
    emit_two_site_term(triplets, elems, d, n, bond, /*periodic=*/false);
  return SparseOperator::from_triplets(ipow(d, n), std::move(triplets), Symmetry::Hermitian);
}

FactorizedState evolve_factorized(const UqiChainSpec& spec, const ComplexVector& psi1,
                                  int head_init_value, double t, int head_init_pos) {
  check_spec(spec);
  const int n = spec.n_sites;
  if (psi1.size() != (Index(1) << n))
    throw std::invalid_argument("evolve_factorized: psi1 must have 2^N amplitudes");
  if (!is_normalized(psi1, 1e-10))
    throw std::invalid_argument("evolve_factorized: psi1 must be normalized");
  if (head_init_value < 1 || head_init_value >= head_dim(spec.gadget))
    throw std::invalid_argument("evolve_factorized: bad head value");
  if (head_init_pos < 1 || head_init_pos > n)
    throw std::invalid_argument("evolve_factorized: bad head position");

  FactorizedState fs;
  fs.head_values.resize(static_cast<size_t>(n));
  fs.staged.resize(static_cast<size_t>(n));

  // stage forward from the initial position; positions left of it are staged
  // by the inverse rule (the head may spread both ways)
  fs.head_values[static_cast<size_t>(head_init_pos) - 1] = head_init_value;
  fs.staged[static_cast<size_t>(head_init_pos) - 1] = psi1;
  for (int j = head_init_pos; j < n; ++j) {
    const HopRule rule = hop_rule(spec, fs.head_values[static_cast<size_t>(j) - 1]);
    ComplexVector next = fs.staged[static_cast<size_t>(j) - 1];
    if (rule.gate) next = apply_2q(*rule.gate, next, n, j, j + 1);
    fs.head_values[static_cast<size_t>(j)] = rule.value_after;
    fs.staged[static_cast<size_t>(j)] = std::move(next);
  }
  for (int j = head_init_pos - 1; j >= 1; --j) {
    // invert: find h with hop_rule(h).value_after == value at j+1, staged_j = W^dagger staged_{j+1}
    const int target = fs.head_values[static_cast<size_t>(j)];
    int found = -1;
    for (int h = 1; h < head_dim(spec.gadget); ++h)
      if (hop_rule(spec, h).value_after == target) {
        found = h;
        break;
      }
    if (found < 0) throw std::logic_error("evolve_factorized: gadget rule not invertible");
    const HopRule rule = hop_rule(spec, found);
    ComplexVector prev = fs.staged[static_cast<size_t>(j)];
    if (rule.gate) prev = apply_2q(rule.gate->adjoint(), prev, n, j, j + 1);
    fs.head_values[static_cast<size_t>(j) - 1] = found;
    fs.staged[static_cast<size_t>(j) - 1] = std::move(prev);
  }

  const xxchain::HoppingChain chain{n, 1.0};
  fs.head_amplitudes.resize(static_cast<size_t>(n));
  for (int j = 1; j <= n; ++j)
    fs.head_amplitudes[static_cast<size_t>(j) - 1] =
        xxchain::transfer_amplitude(chain, head_init_pos, j, t);
  return fs;
}

ComplexVector embed_factorized(const UqiChainSpec& spec, const FactorizedState& fs) {
  const int n = spec.n_sites;
  const int d = site_dim(spec);
  const Index full = ipow(d, n);
  ComplexVector out = ComplexVector::Zero(full);
  std::vector<Index> stride(static_cast<size_t>(n));
  stride[static_cast<size_t>(n) - 1] = 1;
  for (int s = n - 2; s >= 0; --s) stride[static_cast<size_t>(s)] = stride[static_cast<size_t>(s) + 1] * d;

  for (int j = 1; j <= n; ++j) {
    const Complex c = fs.head_amplitudes[static_cast<size_t>(j) - 1];
    if (c == Complex(0.0, 0.0)) continue;
    const ComplexVector& psi = fs.staged[static_cast<size_t>(j) - 1];
    for (Index b = 0; b < psi.size(); ++b) {
      if (psi[b] == Complex(0.0, 0.0)) continue;
      Index idx = 0;
      for (int s = 0; s < n; ++s) {
        const int qbit = static_cast<int>((b >> (n - 1 - s)) & 1);
        const int head = (s == j - 1) ? fs.head_values[static_cast<size_t>(j) - 1] : 0;
        idx += Index(head * 2 + qbit) * stride[static_cast<size_t>(s)];
      }
      out[idx] += c * psi[b];
    }
  }
  return out;
}

ComplexVector cycle_all(const ComplexVector& state, int n) {
  const Index dim = Index(1) << n;
  if (state.size() != dim) throw std::invalid_argument("cycle_all: bad state size");
  ComplexVector out(dim);
  for (Index idx = 0; idx < dim; ++idx) {
    // content at position p moves to p-1 (p >= 2); position 1 wraps to N
    Index nidx = 0;
    for (int p = 1; p <= n; ++p) {
      const Index bit = (idx >> (n - p)) & 1;
      const int dest = (p == 1) ? n : p - 1;
      nidx |= bit << (n - dest);
    }
    out[nidx] = state[idx];
  }
  return out;
}

ComplexVector cycle_tail(const ComplexVector& state, int n) {
  const Index dim = Index(1) << n;
  if (state.size() != dim) throw std::invalid_argument("cycle_tail: bad state size");
  ComplexVector out(dim);
  for (Index idx = 0; idx < dim; ++idx) {
    Index nidx = 0;
    for (int p = 1; p <= n; ++p) {
      const Index bit = (idx >> (n - p)) & 1;
      int dest = p;
      if (p >= 3) dest = p - 1;
      else if (p == 2) dest = n;
      nidx |= bit << (n - dest);
    }
    out[nidx] = state[idx];
  }
  return out;
}

namespace {

ComplexMatrix named_gate(const std::string& name) {
  if (name == "X") return pauli_x();
  if (name == "Y") return pauli_y();
  if (name == "Z") return pauli_z();
  if (name == "H") return hadamard();
  if (name == "CNOT") return cnot_gate();
  if (name == "SWAP") return swap_gate();
  if (name == "CZ") return cz_gate();
  throw std::invalid_argument("unknown gate name: " + name);
}

struct ProtocolSim {
  int n;
  ComplexVector state;
  std::vector<int> logical_at;  // logical_at[p] = logical qubit at position p (1-based)
  double epsilon;
  long round_cap;
  ProtocolStats stats;

  void herald(int start) {
    const xxchain::HoppingChain chain{n, 1.0};
    // jittered schedule: fixed measurement periods can leave near-dark modes
    const auto trace = xxchain::heralded_transfer(chain, epsilon,
                                                  xxchain::default_measure_period(chain), start, n,
                                                  round_cap, 0.15);
    if (!trace.succeeded) throw std::runtime_error("run_uqi_protocol: herald round cap exceeded");
    stats.transfers += 1;
    stats.herald_rounds += trace.rounds;
    stats.total_time += trace.total_time;
  }

  void cycle() {  // heralded transfer 1 -> N
    herald(1);
    state = cycle_all(state, n);
    std::vector<int> next(static_cast<size_t>(n) + 1);
    for (int p = 1; p <= n; ++p) next[static_cast<size_t>(p == 1 ? n : p - 1)] = logical_at[static_cast<size_t>(p)];
    logical_at = std::move(next);
  }

  void cycle_partial() {  // heralded transfer 2 -> N
    herald(2);
    state = cycle_tail(state, n);
    std::vector<int> next(static_cast<size_t>(n) + 1);
    next[1] = logical_at[1];
    for (int p = 2; p <= n; ++p) {
      const int dest = (p == 2) ? n : p - 1;
      next[static_cast<size_t>(dest)] = logical_at[static_cast<size_t>(p)];
    }
    logical_at = std::move(next);
  }

  int position_of(int logical) const {
    for (int p = 1; p <= n; ++p)
      if (logical_at[static_cast<size_t>(p)] == logical) return p;
    throw std::logic_error("position_of: logical qubit missing");
  }

  void bring_to_front(int logical) {
    int p = position_of(logical);
    for (int k = 0; k < p - 1; ++k) cycle();
  }

  void bring_second(int logical) {
    int p = position_of(logical);
    if (p == 1) throw std::logic_error("bring_second: qubit sits on spin 1");
    while (p != 2) {
      cycle_partial();
      p = position_of(logical);
    }
  }

  void swap_front() {  // transposition of positions 1,2 = cycle then (N-2) partials
    cycle();
    for (int k = 0; k < n - 2; ++k) cycle_partial();
  }

  void swap_adjacent(int p) {  // transposition of positions p, p+1
    for (int k = 0; k < p - 1; ++k) cycle();
    swap_front();
    for (int k = 0; k < n - p + 1; ++k) cycle();  // total rotation = n = identity
  }

  void restore_home_order() {
    // bubble sort out of adjacent transpositions, each built from transfers
    for (int pass = 0; pass < n; ++pass) {
      bool swapped = false;
      for (int p = 1; p < n; ++p)
        if (logical_at[static_cast<size_t>(p)] > logical_at[static_cast<size_t>(p) + 1]) {
          swap_adjacent(p);
          swapped = true;
        }
      if (!swapped) return;
    }
    for (int p = 1; p <= n; ++p)
      if (logical_at[static_cast<size_t>(p)] != p)
        throw std::logic_error("restore_home_order: sort failed");
  }
};

}  // namespace

std::vector<GateOp> program_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  if (!j.is_array()) throw std::invalid_argument("program_from_json: expected an array");
  std::vector<GateOp> prog;
  for (const auto& jg : j) {
    GateOp op;
    op.name = jg.at("name").get<std::string>();
    op.targets = jg.at("targets").get<std::vector<int>>();
    if (jg.contains("matrix")) {
      const auto& jm = jg.at("matrix");
      const size_t dim = (op.targets.size() == 1) ? 2 : 4;
      if (jm.size() != dim * dim) throw std::invalid_argument("program_from_json: bad matrix size");
      ComplexMatrix m(dim, dim);
      for (size_t k = 0; k < dim * dim; ++k)
        m(static_cast<Index>(k / dim), static_cast<Index>(k % dim)) =
            Complex(jm[k][0].get<double>(), jm[k][1].get<double>());
      if (!is_unitary(m, 1e-10)) throw std::invalid_argument("program_from_json: matrix not unitary");
      op.matrix = m;
    } else {
      op.matrix = named_gate(op.name);
    }
    const size_t want = (op.matrix.rows() == 2) ? 1 : 2;
    if (op.targets.size() != want)
      throw std::invalid_argument("program_from_json: target count does not match gate arity");
    prog.push_back(op);
  }
  return prog;
}

ComplexVector run_uqi_protocol(int n, const std::vector<GateOp>& program,
                               const ComplexVector& psi1, ProtocolStats* stats,
                               double epsilon_per_transfer, long round_cap) {
  if (n < 2) throw std::invalid_argument("run_uqi_protocol: need n >= 2");
  if (psi1.size() != (Index(1) << n))
    throw std::invalid_argument("run_uqi_protocol: psi1 must have 2^n amplitudes");
  ProtocolSim sim;
  sim.n = n;
  sim.state = psi1;
  sim.logical_at.resize(static_cast<size_t>(n) + 1);
  for (int p = 1; p <= n; ++p) sim.logical_at[static_cast<size_t>(p)] = p;
  sim.epsilon = epsilon_per_transfer;
  sim.round_cap = round_cap;

  for (const GateOp& op : program) {
    for (int t : op.targets)
      if (t < 1 || t > n) throw std::out_of_range("run_uqi_protocol: gate target out of range");
    if (op.targets.size() == 1) {
      sim.bring_to_front(op.targets[0]);
      sim.state = apply_1q(op.matrix, sim.state, n, 1);
    } else {
      if (op.targets[0] == op.targets[1])
        throw std::invalid_argument("run_uqi_protocol: identical gate targets");
      sim.bring_to_front(op.targets[0]);
      sim.bring_second(op.targets[1]);
      sim.state = apply_2q(op.matrix, sim.state, n, 1, 2);
    }
  }
  sim.restore_home_order();
  if (stats) *stats = sim.stats;
  return sim.state;
}

ComplexVector circuit_oracle(int n, const std::vector<GateOp>& program,
                             const ComplexVector& psi1) {
  ComplexVector psi = psi1;
  for (const GateOp& op : program) {
    if (op.targets.size() == 1) psi = apply_1q(op.matrix, psi, n, op.targets[0]);
    else psi = apply_2q(op.matrix, psi, n, op.targets[0], op.targets[1]);
  }
  return psi;
}

}  // namespace uqi
}  // namespace symham
