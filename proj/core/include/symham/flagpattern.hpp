#pragma once

#include <memory>
#include <string>

#include "symham/dfs.hpp"

namespace symham {
namespace flagpat {

// One factor of a pair-product pattern.  In a projector pattern the tags
// read P1 = |psi-><psi-|, P3 = 1 - |psi-><psi-|, Id = identity,
// State = projector onto the given pure state; in a state pattern P1 and P3
// stand for their canonical +1 eigenstates (|psi-> and |00>), Id for |0>,
// State for the state itself.
struct PairFactor {
  enum class Tag { P1, P3, Id, State };
  Tag tag = Tag::Id;
  std::vector<int> positions;  // one or two qubit positions
  ComplexVector state;         // Tag::State only: dim 2 or 4

  static PairFactor p1(int a, int b) { return {Tag::P1, {a, b}, {}}; }
  static PairFactor p3(int a, int b) { return {Tag::P3, {a, b}, {}}; }
  static PairFactor id1(int a) { return {Tag::Id, {a}, {}}; }
  static PairFactor pure(std::vector<int> pos, ComplexVector s) {
    return {Tag::State, std::move(pos), std::move(s)};
  }
};

// A set of disjoint factors over integer positions plus unconstrained (free)
// positions.
struct PairProductPattern {
  int span = 0;
  std::vector<PairFactor> factors;
  std::vector<int> free_positions;

  void validate() const;  // disjointness, positions within span
};

ComplexVector psi_minus();                    // (|01> - |10>)/sqrt(2)
ComplexMatrix pair_projector(PairFactor::Tag tag, const ComplexVector& state);

// <state| Projector(shift) |state> maximized adversarially over the free
// positions (spectral norm of the residual operator), with the state pattern
// repeated with the given period and the projector offset by `shift`.
// Components of the factor-overlap graph are contracted exactly.
double shifted_expectation(const PairProductPattern& projector,
                           const PairProductPattern& state_period, int shift, int period);

// The 43-qubit block-boundary layout: section A (interleaved P1/P3 plus one
// adjacent P1 pair) kills single-qubit offsets, section B (8 adjacent P3
// pairs) even offsets, section C (9 adjacent P3 pairs, parity-shifted by one
// spare identity qubit) odd offsets.
struct FlagLayout {
  PairProductPattern projector;  // span 43
  PairProductPattern state_pattern() const;
  int p3_pairs_in(int lo, int hi) const;  // count of P3 pairs starting in [lo, hi]
};

FlagLayout default_flag_layout();

struct SuppressionReport {
  bool passed = false;
  double at_zero = 0.0;
  std::vector<std::pair<int, double>> offenders;  // (shift, expectation) above tolerance
};

// shift 0 must give 1, every other shift 1..period-1 must vanish (<= 1e-12)
// with the logical positions adversarially free.
SuppressionReport verify_suppression(const FlagLayout& layout, int period = 53);

// JSON: [{"pair":[a,b],"tag":"P1|P3|ID|state|free","state":[[re,im],...]?}, ...]
std::string pattern_to_json(const PairProductPattern& p);
PairProductPattern pattern_from_json(const std::string& text);

// ---- rotation- and translation-invariant term descriptor --------------------

// One bond term of the doubled construction: two flag projectors at offsets
// 53(i-1) and 53i followed by the encoded two-logical-spin operator; spans
// 106 qubits and is never materialized.
struct HrtTermDescriptor {
  int bond_index = 1;
  FlagLayout layout;
  std::shared_ptr<dfs::EncodedTwoSiteOperator> encoded;

  Index flag_offset_left() const { return Index(53) * (bond_index - 1); }
  Index flag_offset_right() const { return Index(53) * bond_index; }
  Index logical_offset_left() const { return flag_offset_left() + 43; }
  Index logical_offset_right() const { return flag_offset_right() + 43; }
  int total_qubits() const { return 106; }
};

HrtTermDescriptor hrt_term_descriptor(int bond_index, FlagLayout layout,
                                      std::shared_ptr<dfs::EncodedTwoSiteOperator> encoded);

// A probe state in pair-product form: both flag blocks carry the layout's
// flag state rigidly shifted by flag_shift, the logical blocks carry
// explicit states.
struct HrtProbe {
  int flag_shift = 0;
  ComplexVector logical_left;   // dim 2^10
  ComplexVector logical_right;  // dim 2^10
};

struct HrtApplication {
  double flag_weight = 0.0;     // product of the two flag overlaps
  ComplexVector logical_out;    // encoded action scaled by flag_weight, dim 2^20
};

HrtApplication apply_descriptor(const HrtTermDescriptor& term, const HrtProbe& probe);

}  // namespace flagpat
}  // namespace symham
