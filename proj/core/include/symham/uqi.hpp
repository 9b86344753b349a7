#pragma once

#include <string>

#include "symham/gates.hpp"
#include "symham/sparse_operator.hpp"
#include "symham/xxchain.hpp"

namespace symham {
namespace uqi {

// Read-head gadget variants.  The head register per site has dimension 2, 3
// or 5; every bond carries the same rule (translational invariance of the
// interaction).
enum class Gadget {
  Hop,          // 2-level head, U applied on every rightward hop
  Alternating,  // 3-level head, U only on 1->2 hops, identity on 2->1
  TwoGate,      // 3-level head, U for head value 1, V for head value 2
  Combined,     // 5-level head (active ⊗ program) ⊕ none
};

struct UqiChainSpec {
  int n_sites = 2;
  Gadget gadget = Gadget::Hop;
  ComplexMatrix u;  // 4x4 two-qubit unitary
  ComplexMatrix v;  // second gate, TwoGate/Combined only

  static UqiChainSpec swap_chain(int n);  // plain swap rule: U = SWAP
};

int head_dim(Gadget g);
inline int site_dim(const UqiChainSpec& s) { return 2 * head_dim(s.gadget); }

// Head-register encodings (site value = head * 2 + qubit):
//   Hop:          0 none, 1 head
//   Alternating:  0 none, 1, 2
//   TwoGate:      0 none, 1, 2
//   Combined:     0 none, 1 + 2*active + program
int combined_head_value(int active, int program);

// Full-space hermitian operator.  Caps: 2-level head N <= 8, 3-level N <= 7,
// 5-level N <= 6.
SparseOperator build_uqi(const UqiChainSpec& spec);

// Factorized clock-subspace representation: head amplitude per chain
// position plus memoized staged computational states
// psi_{i+1} = W_i psi_i (W_i from the gadget rule).
struct FactorizedState {
  std::vector<Complex> head_amplitudes;  // index j-1 <-> head at site j
  std::vector<int> head_values;          // head internal value at site j
  std::vector<ComplexVector> staged;     // psi_j, dim 2^N, computed once
};

FactorizedState evolve_factorized(const UqiChainSpec& spec, const ComplexVector& psi1,
                                  int head_init_value, double t, int head_init_pos = 1);

// Embeds a factorized state into the full chain Hilbert space (tests, small N).
ComplexVector embed_factorized(const UqiChainSpec& spec, const FactorizedState& fs);

// ---- boundary-control protocol ---------------------------------------------

// Cyclic data permutations generated by heralded head transfers with U = SWAP:
// cycle_all: content of position p -> p-1 (p >= 2), position 1 -> N.
// cycle_tail: same on positions 2..N, position 1 untouched.
ComplexVector cycle_all(const ComplexVector& state, int n);
ComplexVector cycle_tail(const ComplexVector& state, int n);

struct GateOp {
  std::string name;          // X,Y,Z,H,CNOT,SWAP,CZ or "custom"
  std::vector<int> targets;  // 1-based logical qubits
  ComplexMatrix matrix;      // resolved 2x2 or 4x4
};

// JSON wire format: ordered list of
//   {"name": str, "targets": [int...], "matrix": optional [[re,im]...] row-major}
std::vector<GateOp> program_from_json(const std::string& json_text);

struct ProtocolStats {
  int transfers = 0;
  long herald_rounds = 0;
  double total_time = 0.0;
};

// Runs the boundary-control protocol: cyclic transfers position the targets
// on spins 1 and 2, local gates act there, and further transfers restore the
// home order.  Every transfer is heralded (xxchain); exceeding the round cap
// is an error.
ComplexVector run_uqi_protocol(int n, const std::vector<GateOp>& program,
                               const ComplexVector& psi1, ProtocolStats* stats = nullptr,
                               double epsilon_per_transfer = 1e-9, long round_cap = 1000000);

// Direct statevector circuit oracle for the same program.
ComplexVector circuit_oracle(int n, const std::vector<GateOp>& program,
                             const ComplexVector& psi1);

}  // namespace uqi
}  // namespace symham
