#pragma once

#include <memory>

#include "symham/sparse_operator.hpp"

namespace symham {
namespace dfs {

// Decomposition of (C^2)^{tensor N} into total-spin sectors.  multiplicity[2j]
// is the dimension of the spin-j multiplicity (decoherence-free) subsystem.
struct SpinDecomposition {
  int n_qubits = 0;
  std::vector<Index> multiplicity;  // indexed by 2j, entries of matching parity

  Index mult(int two_j) const {
    if (two_j < 0 || two_j >= static_cast<int>(multiplicity.size())) return 0;
    return multiplicity[static_cast<size_t>(two_j)];
  }
};

// Multiplicities from the half-integer walk recursion, cross-checked against
// a brute-force count of S^2_total eigenspaces (hard error on mismatch;
// the cross-check runs for n_qubits <= 10).
SpinDecomposition spin_multiplicities(int n_qubits);

// S^2_total as a sparse operator (brute-force side of the cross-check,
// exposed for tests).
SparseOperator total_spin_squared(int n_qubits);

struct EncodingIsometry {
  Eigen::MatrixXd v;  // 2^n_qubits x d, orthonormal columns
  int n_qubits = 0;
  int two_j = 0;
};

// Orthonormal basis of the j = 0 sector built by sequential spin-1/2
// coupling over zero-returning intermediate-spin paths, enumerated
// lexicographically (lower intermediate spin first).
EncodingIsometry singlet_basis(int n_qubits);

// First d_logical singlet columns; collective rotations act on the image as
// a pure phase (+1 for determinant-1 rotations).
EncodingIsometry encode_levels(int d_logical = 31, int n_qubits = 10);

// U applied to every qubit of an n_qubit register.
ComplexVector apply_uniform_rotation(const ComplexMatrix& u, const ComplexVector& state,
                                     int n_qubits);

// (V (x) V) h (V (x) V)^T on 2^(2 n_qubits) qubits, kept in factored form;
// materializing it is infeasible and never needed (probes are apply-based).
class EncodedTwoSiteOperator final : public LinearOperator {
 public:
  EncodedTwoSiteOperator(SparseOperator h_logical, EncodingIsometry isometry);

  Index dim() const override { return dim_; }
  bool hermitian() const override { return h_.hermitian(); }
  void apply_to(const ComplexVector& in, ComplexVector& out) const override;

  const SparseOperator& logical_operator() const { return h_; }
  const EncodingIsometry& isometry() const { return iso_; }

 private:
  SparseOperator h_;
  EncodingIsometry iso_;
  Index block_ = 0;  // 2^n_qubits
  Index dim_ = 0;    // block_^2
};

std::shared_ptr<EncodedTwoSiteOperator> build_hr_term(const SparseOperator& h_logical,
                                                      const EncodingIsometry& isometry);

// Binary isometry table, little-endian: a 16-byte header ("symhamV1" + rows
// + cols as int32) followed by one record per nonzero entry:
// int64 row, int64 column, double real, double imag.
void write_isometry(const EncodingIsometry& iso, const std::string& path);
EncodingIsometry read_isometry(const std::string& path);

}  // namespace dfs
}  // namespace symham
