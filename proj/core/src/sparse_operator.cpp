#include "symham/sparse_operator.hpp"

#include <algorithm>
#include <cmath>

namespace symham {

namespace {
constexpr double kHermTol = 1e-12;

void canonicalize(std::vector<Triplet>& t) {
  std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  size_t w = 0;
  for (size_t r = 0; r < t.size();) {
    Triplet acc = t[r];
    size_t s = r + 1;
    while (s < t.size() && t[s].row == acc.row && t[s].col == acc.col) {
      acc.value += t[s].value;
      ++s;
    }
    if (acc.value != Complex(0.0, 0.0)) t[w++] = acc;
    r = s;
  }
  t.resize(w);
}
}  // namespace

SparseOperator SparseOperator::from_triplets(Index dim, std::vector<Triplet> triplets,
                                             Symmetry sym) {
  if (dim <= 0) throw std::invalid_argument("SparseOperator: dim must be positive");
  for (const Triplet& t : triplets)
    if (t.row < 0 || t.row >= dim || t.col < 0 || t.col >= dim)
      throw std::out_of_range("SparseOperator: triplet index out of range");

  SparseOperator op;
  op.dim_ = dim;
  op.triplets_ = std::move(triplets);
  canonicalize(op.triplets_);
  op.hermitian_ = (sym == Symmetry::Hermitian);
  if (op.hermitian_) {
    const double res = op.hermiticity_residual();
    if (res > kHermTol)
      throw std::invalid_argument("SparseOperator: hermiticity violated, residual " +
                                  std::to_string(res));
  }
  op.build_csr();
  return op;
}

SparseOperator SparseOperator::identity(Index dim) {
  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(dim));
  for (Index i = 0; i < dim; ++i) t.push_back({i, i, 1.0});
  return from_triplets(dim, std::move(t), Symmetry::Hermitian);
}

void SparseOperator::build_csr() {
  row_ptr_.assign(static_cast<size_t>(dim_) + 1, 0);
  col_.resize(triplets_.size());
  val_.resize(triplets_.size());
  for (const Triplet& t : triplets_) ++row_ptr_[static_cast<size_t>(t.row) + 1];
  for (size_t i = 1; i < row_ptr_.size(); ++i) row_ptr_[i] += row_ptr_[i - 1];
  // triplets_ are already row-sorted
  for (size_t k = 0; k < triplets_.size(); ++k) {
    col_[k] = triplets_[k].col;
    val_[k] = triplets_[k].value;
  }
}

void SparseOperator::apply_to(const ComplexVector& in, ComplexVector& out) const {
  if (in.size() != dim_) throw std::invalid_argument("SparseOperator::apply: dimension mismatch");
  out.setZero(dim_);
  for (Index r = 0; r < dim_; ++r) {
    Complex acc(0.0, 0.0);
    const Index lo = row_ptr_[static_cast<size_t>(r)];
    const Index hi = row_ptr_[static_cast<size_t>(r) + 1];
    for (Index k = lo; k < hi; ++k) acc += val_[static_cast<size_t>(k)] * in[col_[static_cast<size_t>(k)]];
    out[r] = acc;
  }
}

ComplexMatrix SparseOperator::to_dense(Index max_dim) const {
  if (dim_ > max_dim) throw std::length_error("SparseOperator::to_dense: dimension above cap");
  ComplexMatrix m = ComplexMatrix::Zero(dim_, dim_);
  for (const Triplet& t : triplets_) m(t.row, t.col) += t.value;
  return m;
}

SparseOperator SparseOperator::scaled(Complex factor) const {
  std::vector<Triplet> t = triplets_;
  for (Triplet& e : t) e.value *= factor;
  const bool herm = hermitian_ && std::abs(factor.imag()) == 0.0;
  return from_triplets(dim_, std::move(t), herm ? Symmetry::Hermitian : Symmetry::None);
}

SparseOperator SparseOperator::plus(const SparseOperator& other, Complex factor) const {
  if (other.dim_ != dim_) throw std::invalid_argument("SparseOperator::plus: dimension mismatch");
  std::vector<Triplet> t = triplets_;
  t.reserve(t.size() + other.triplets_.size());
  for (const Triplet& e : other.triplets_) t.push_back({e.row, e.col, factor * e.value});
  const bool herm = hermitian_ && other.hermitian_ && std::abs(factor.imag()) == 0.0;
  return from_triplets(dim_, std::move(t), herm ? Symmetry::Hermitian : Symmetry::None);
}

SparseOperator SparseOperator::shifted(Complex diagonal) const {
  std::vector<Triplet> t = triplets_;
  for (Index i = 0; i < dim_; ++i) t.push_back({i, i, diagonal});
  const bool herm = hermitian_ && std::abs(diagonal.imag()) == 0.0;
  return from_triplets(dim_, std::move(t), herm ? Symmetry::Hermitian : Symmetry::None);
}

double SparseOperator::hermiticity_residual() const {
  // triplets_ are canonical, so the adjoint entry can be binary-searched.
  double worst = 0.0;
  for (const Triplet& t : triplets_) {
    const Triplet probe{t.col, t.row, 0.0};
    auto it = std::lower_bound(triplets_.begin(), triplets_.end(), probe,
                               [](const Triplet& a, const Triplet& b) {
                                 return a.row != b.row ? a.row < b.row : a.col < b.col;
                               });
    Complex adj(0.0, 0.0);
    if (it != triplets_.end() && it->row == t.col && it->col == t.row) adj = it->value;
    worst = std::max(worst, std::abs(t.value - std::conj(adj)));
  }
  return worst;
}

void emit_two_site_term(std::vector<Triplet>& out, const std::vector<PairElement>& elems,
                        int d, int n_sites, int site, bool periodic) {
  if (site < 0 || site >= n_sites) throw std::out_of_range("emit_two_site_term: bad site");
  const int site_b = (site + 1 == n_sites) ? 0 : site + 1;
  if (site_b == 0 && !periodic) throw std::invalid_argument("emit_two_site_term: open chain has no wrap bond");
  const Index dI = d;
  // strides: site 0 is the most significant digit
  std::vector<Index> stride(static_cast<size_t>(n_sites));
  stride[static_cast<size_t>(n_sites) - 1] = 1;
  for (int s = n_sites - 2; s >= 0; --s) stride[static_cast<size_t>(s)] = stride[static_cast<size_t>(s) + 1] * dI;
  const Index sa = stride[static_cast<size_t>(site)];
  const Index sb = stride[static_cast<size_t>(site_b)];
  const Index total = stride[0] * dI;

  const Index n_env = total / (dI * dI);
  // enumerate environment configurations around the two active digits
  for (Index env = 0; env < n_env; ++env) {
    // spread env digits over all sites except `site`, `site_b`
    Index base = 0;
    Index e = env;
    for (int s = n_sites - 1; s >= 0; --s) {
      if (s == site || s == site_b) continue;
      base += (e % dI) * stride[static_cast<size_t>(s)];
      e /= dI;
    }
    for (const PairElement& el : elems) {
      const Index col = base + Index(el.ket_a) * sa + Index(el.ket_b) * sb;
      const Index row = base + Index(el.bra_a) * sa + Index(el.bra_b) * sb;
      out.push_back({row, col, el.value});
    }
  }
}

void emit_one_site_term(std::vector<Triplet>& out, const std::vector<SiteElement>& elems,
                        int d, int n_sites, int site) {
  if (site < 0 || site >= n_sites) throw std::out_of_range("emit_one_site_term: bad site");
  const Index dI = d;
  std::vector<Index> stride(static_cast<size_t>(n_sites));
  stride[static_cast<size_t>(n_sites) - 1] = 1;
  for (int s = n_sites - 2; s >= 0; --s) stride[static_cast<size_t>(s)] = stride[static_cast<size_t>(s) + 1] * dI;
  const Index sa = stride[static_cast<size_t>(site)];
  const Index total = stride[0] * dI;
  const Index n_env = total / dI;
  for (Index env = 0; env < n_env; ++env) {
    Index base = 0;
    Index e = env;
    for (int s = n_sites - 1; s >= 0; --s) {
      if (s == site) continue;
      base += (e % dI) * stride[static_cast<size_t>(s)];
      e /= dI;
    }
    for (const SiteElement& el : elems)
      out.push_back({base + Index(el.bra) * sa, base + Index(el.ket) * sa, el.value});
  }
}

}  // namespace symham
