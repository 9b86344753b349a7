#pragma once

#include <vector>

#include "symham/linalg.hpp"

namespace symham {

// Abstract linear map on C^dim.  SparseOperator is the concrete workhorse;
// isometry-conjugated operators (dfs) implement the same interface without
// materializing their matrix.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual Index dim() const = 0;
  virtual void apply_to(const ComplexVector& in, ComplexVector& out) const = 0;
  virtual bool hermitian() const = 0;

  ComplexVector apply(const ComplexVector& in) const {
    ComplexVector out;
    apply_to(in, out);
    return out;
  }
};

struct Triplet {
  Index row = 0;
  Index col = 0;
  Complex value{};
};

enum class Symmetry { None, Hermitian };

// Complex sparse matrix with explicit dimension.  Duplicate triplets are
// summed at build time; the hermitian flag is enforced by an exact
// symmetrization check (tolerance 1e-12), violations are hard errors.
class SparseOperator final : public LinearOperator {
 public:
  SparseOperator() = default;

  static SparseOperator from_triplets(Index dim, std::vector<Triplet> triplets,
                                      Symmetry sym = Symmetry::Hermitian);
  static SparseOperator identity(Index dim);

  Index dim() const override { return dim_; }
  bool hermitian() const override { return hermitian_; }
  Index nnz() const { return static_cast<Index>(triplets_.size()); }

  // Canonical representation: sorted by (row, col), duplicates merged,
  // exact zeros dropped.
  const std::vector<Triplet>& triplets() const { return triplets_; }

  void apply_to(const ComplexVector& in, ComplexVector& out) const override;
  using LinearOperator::apply;

  ComplexMatrix to_dense(Index max_dim = 8192) const;

  SparseOperator scaled(Complex factor) const;
  // this + factor * other
  SparseOperator plus(const SparseOperator& other, Complex factor = 1.0) const;
  SparseOperator shifted(Complex diagonal) const;  // this + diagonal * I

  // Max |A - A^dagger| entry; exact 0 for operators built as term + h.c.
  double hermiticity_residual() const;

 private:
  Index dim_ = 0;
  bool hermitian_ = false;
  std::vector<Triplet> triplets_;
  // CSR form for apply()
  std::vector<Index> row_ptr_;
  std::vector<Index> col_;
  std::vector<Complex> val_;

  void build_csr();
};

// ---- chain-builder helpers -------------------------------------------------

// One matrix element of a two-site operator: |bra_a, bra_b><ket_a, ket_b|.
struct PairElement {
  int bra_a, bra_b, ket_a, ket_b;
  Complex value;
};

inline void append_conjugates(std::vector<PairElement>& elems) {
  const size_t n = elems.size();
  for (size_t k = 0; k < n; ++k) {
    const PairElement& e = elems[k];
    elems.push_back({e.ket_a, e.ket_b, e.bra_a, e.bra_b, std::conj(e.value)});
  }
}

// Emits `elems` acting on sites (site, site+1) of a chain of `n_sites`
// d-level sites into `out`.  Site 0 is the slowest (most significant) digit.
// With `periodic`, site = n_sites-1 couples to site 0.
void emit_two_site_term(std::vector<Triplet>& out, const std::vector<PairElement>& elems,
                        int d, int n_sites, int site, bool periodic);

// Same for a single-site element list |bra><ket|.
struct SiteElement {
  int bra, ket;
  Complex value;
};
void emit_one_site_term(std::vector<Triplet>& out, const std::vector<SiteElement>& elems,
                        int d, int n_sites, int site);

}  // namespace symham
