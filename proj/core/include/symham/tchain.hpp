#pragma once

#include <optional>
#include <string>

#include "symham/globalprog.hpp"
#include "symham/sparse_operator.hpp"

namespace symham {
namespace tchain {

// One 31-level ring site: (q ⊗ l ⊗ ((a ⊗ r) ⊕ n)) ⊕ m.
//
// Site kinds: Data (l=0, q in {0,1} holds a computational qubit), Program
// (l=1, q in {0:skip, 1:G, 2:S}), Marker (l=0, q=2, the active-command
// token), MLevel (the extra level that carries the marker over a skip).
// head: 0 = empty, 1 + 2a + r = read-head with active bit a, program bit r.
// Data q may be -1 in "skeleton" configurations where the qubit value is
// tracked symbolically by the clock-path machinery.
struct Site {
  enum class Kind : std::uint8_t { Data, Program, Marker, MLevel };
  Kind kind = Kind::Data;
  std::int8_t q = 0;
  std::int8_t head = 0;

  static Site data(int q, int head = 0) { return {Kind::Data, static_cast<std::int8_t>(q), static_cast<std::int8_t>(head)}; }
  static Site program(int q, int head = 0) { return {Kind::Program, static_cast<std::int8_t>(q), static_cast<std::int8_t>(head)}; }
  static Site marker(int head = 0) { return {Kind::Marker, 2, static_cast<std::int8_t>(head)}; }
  static Site m_level() { return {Kind::MLevel, 0, 0}; }

  bool has_head() const { return kind != Kind::MLevel && head != 0; }
  int head_active() const { return (head - 1) / 2; }
  int head_program() const { return (head - 1) % 2; }

  bool operator==(const Site&) const = default;
};

using Configuration = std::vector<Site>;

constexpr int kSiteDim = 31;
constexpr int kMIndex = 30;
inline int head_index(int a, int r) { return 1 + 2 * a + r; }

// Bijective encoding of a concrete site onto 0..30: m = 30, otherwise
// q*10 + l*5 + head.
int site_to_index(const Site& s);
Site site_from_index(int index);

// Text format, one token per site, e.g. "P:G P:skip MARK D:0 D:1".  Head
// suffix "+hAR" (A = active bit, R = program bit), m level = "m",
// symbolic data qubit = "D:?".
std::string to_text(const Configuration& c);
Configuration from_text(const std::string& text);

Configuration strip_data(const Configuration& c);  // data q -> -1
bool is_skeleton(const Configuration& c);

// Structural validity: exactly one marker plus exactly one read-head and no
// m level, or exactly one m level and neither marker nor head; the program
// arc (program sites plus the marker/m position) is contiguous on the ring.
struct ValidityReport {
  bool valid = false;
  std::string reason;
};
ValidityReport check_configuration(const Configuration& c);

// Canonical launch layout: ring = [marker+inactive head(r=0)] [tape...] [data...],
// ring size M = tape length + 1 + data length, M odd.
Configuration initial_configuration(const std::vector<globalprog::CommandKind>& tape,
                                    const std::vector<int>& data_bits);

// Full-space translationally invariant ring Hamiltonian, dimension 31^M.
// M <= 4.
SparseOperator build_ht(int ring_sites);

// The single two-site term h_{i,i+1} the ring Hamiltonian sums over,
// dimension 31^2 (used by the rotation-invariant encodings).
SparseOperator bond_operator();

// ---- clock-path machinery ----------------------------------------------

struct GateAction {
  int kind = -1;       // -1 none, 0 = G, 1 = S
  int ring_bond = -1;  // 1-based left site of the bond
  bool dagger = false;
};

struct ClockPath {
  std::vector<Configuration> nodes;        // skeletons, ordered along the path
  std::vector<GateAction> edge_actions;    // action of edge nodes[k] -> nodes[k+1]
  int initial_index = 0;                   // where the BFS origin sits
  int n_data = 0;
  int bus_size = 0;                        // program sites + marker/m slots
};

// Breadth-first closure of `init` under the machine rules; throws
// std::runtime_error (with the offending configuration) if the reachability
// graph is not a simple path.
ClockPath reachable_clock_path(const Configuration& init);

// Staged data states along the path: node `initial_index` carries `data0`,
// edges apply their attached two-qubit gates.
std::vector<ComplexVector> staged_states(const ClockPath& path, const ComplexVector& data0);

// Embeds path node `k` (with its staged data state) into the 31^M space.
ComplexVector embed_path_node(const ClockPath& path, int k, const ComplexVector& staged_k);

// Explicit-alignment oracle commands equivalent to running `tape` on this
// machine: command k of the tape executes with the marker on ring slot k+1,
// which fixes its pairing parity.
std::vector<globalprog::GlobalCommand> oracle_commands(
    const std::vector<globalprog::CommandKind>& tape, int n_data);

struct ComputationResult {
  ComplexVector data_state;  // heralded terminal data state, dim 2^n_data
  int path_length = 0;
  int herald_rounds = 0;
  double total_time = 0.0;
};

// Factorized evolution of the launch configuration plus repeated projective
// herald measurement of the terminal clock configuration.  The heralded data
// state is exact; epsilon only sets the demanded cumulative success.
ComputationResult run_computation(const std::vector<globalprog::CommandKind>& tape,
                                  const std::vector<int>& data_bits, double epsilon = 1e-3,
                                  double measure_period = 0.0 /* 0 = auto */,
                                  long herald_cap = 1000000);

}  // namespace tchain
}  // namespace symham
