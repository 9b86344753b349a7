#pragma once

#include <map>
#include <optional>

#include "symham/eigs.hpp"
#include "symham/globalprog.hpp"
#include "symham/tchain.hpp"

namespace symham {
namespace qma {

// One 49-level site: (q ⊗ l ⊗ ((a ⊗ r) ⊕ n)) ⊕ m with a three-valued
// active register and a two-level n system.  head encoding: 0 = n0 (no
// head), 1 = n1 (the one-shot input checker), 2 + 2a + r = read-head.
// a = 2 marks the output sweep that carries the result check.
struct Site {
  enum class Kind : std::uint8_t { Data, Program, Marker, MLevel };
  Kind kind = Kind::Data;
  std::int8_t q = 0;
  std::int8_t head = 0;

  static Site data(int q, int head = 0) { return {Kind::Data, static_cast<std::int8_t>(q), static_cast<std::int8_t>(head)}; }
  static Site program(int q, int head = 0) { return {Kind::Program, static_cast<std::int8_t>(q), static_cast<std::int8_t>(head)}; }
  static Site marker(int head = 0) { return {Kind::Marker, 2, static_cast<std::int8_t>(head)}; }
  static Site m_level() { return {Kind::MLevel, 0, 0}; }

  bool has_head() const { return kind != Kind::MLevel && head >= 2; }
  bool has_n1() const { return kind != Kind::MLevel && head == 1; }
  int head_active() const { return (head - 2) / 2; }
  int head_program() const { return (head - 2) % 2; }

  bool operator==(const Site&) const = default;
};

using Configuration = std::vector<Site>;

constexpr int kSiteDim = 49;
constexpr int kMIndex = 48;
inline int head_index(int a, int r) { return 2 + 2 * a + r; }

int site_to_index(const Site& s);
Site site_from_index(int index);

// tchain text format extended with "+n1" and three-valued head suffixes.
std::string to_text(const Configuration& c);
Configuration from_text(const std::string& text);
Configuration strip_data(const Configuration& c);

// Launch layout: [marker][tape...][data...] with the roving input checker n1
// on the first tape slot; with_marker = false replaces the marker by a skip
// slot (the early-termination variant).
Configuration initial_configuration(const std::vector<globalprog::CommandKind>& tape,
                                    const std::vector<int>& data_bits, bool with_marker = true);

// Full-space translationally invariant operator on 49^M, M <= 4.
SparseOperator build_extended_ht(int ring_sites);
SparseOperator bond_operator_extended();

using tchain::GateAction;

struct ClockPath {
  std::vector<Configuration> nodes;
  std::vector<GateAction> edge_actions;
  int initial_index = 0;
  int n_data = 0;
};

ClockPath reachable_clock_path(const Configuration& init);

// ---- penalties and couplings ------------------------------------------

struct QmaInstance {
  int ring_sites = 3;
  std::vector<globalprog::CommandKind> tape;
  int output_site = 3;           // ring position of the verifier output qubit
  std::map<int, int> x_targets;  // ring position -> demanded q value at the n1 visit
};

struct Penalties {
  SparseOperator h_in;   // input/tape checks, triggered by the roving n1
  SparseOperator h_out;  // output check, triggered by the a=2 sweep
  SparseOperator h_b;    // static site-typing penalties (the local fields)
};

Penalties build_penalties(const QmaInstance& instance);

struct GapBounds {
  double short_path = 0.0;  // ground-energy gap to one-step-shorter paths
  double excited = 0.0;     // gap to the first excited state of the full path
};

// -2cos(pi/(M+1)) + 2cos(pi/(M+2)) and -2cos(2pi/(M+2)) + 2cos(pi/(M+2)).
GapBounds gap_lower_bounds(int m_sites);

struct CouplingSchedule {
  double j_0 = 0.0, j_b = 0.0, j_in = 0.0, j_out = 0.0;
  double delta_e = 0.0;
  double epsilon = 0.0;
  bool satisfied() const;  // the two inequality invariants
};

// J_out = (M+1)/sin^2(pi/(M+2)); J_in = 8 J_out^2 + 2 J_out; J_b and
// J_0*DeltaE minimal with min(J_b, J_0 DeltaE) >= 8(J_out+J_in)^2 + 2(J_out+J_in).
CouplingSchedule schedule_couplings(int m_sites, double epsilon);

// ---- projection lemma ---------------------------------------------------

struct ProjectionBound {
  double lhs = 0.0;  // lambda(H1|_S) - ||H1||^2 / (J - 2||H1||)
  double rhs = 0.0;  // lambda(H1 + H2)
  bool holds = false;
};

// S spans the kernel of H2 (columns); J is the smallest nonzero eigenvalue
// of H2 and must exceed 2||H1||, otherwise the bound is inapplicable and an
// exception is raised.  Dense arithmetic, intended for dimensions <= a few
// hundred.
ProjectionBound projection_lemma_bound(const SparseOperator& h1, const SparseOperator& h2,
                                       const ComplexMatrix& s_basis, double tol = 1e-9);

// ---- ground-energy separation -------------------------------------------

struct SeparationResult {
  CouplingSchedule schedule;
  double kappa = 0.0;
  double lambda_yes = 0.0;
  double lambda_no = 0.0;
  double residual_yes = 0.0;
  double residual_no = 0.0;
  Index sector_dim = 0;
  int path_nodes = 0;    // clock length of the canonical computation
  int m_effective = 0;   // path_nodes - 1; the coupling formulas' size parameter
};

// Minimal yes/no instance pair on an odd ring: one command, one data qubit
// carrying the output; the no-instance pins that qubit against the output
// check.  Energies are computed on the legal-layout single-token sector
// (which every valid launch stays inside).
SeparationResult energy_separation_experiment(int ring_sites = 3, double epsilon = 1.0 / 3.0,
                                              std::optional<QmaInstance> no_instance = std::nullopt,
                                              std::optional<QmaInstance> yes_instance = std::nullopt);

// Sector machinery, exposed for tests and the report generator.
std::vector<Index> enumerate_sector(const QmaInstance& instance);

}  // namespace qma
}  // namespace symham
