#include "symham/eigs.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace symham {

namespace {

SpectrumResult dense_eigs(const LinearOperator& op, Which which, int k, double tol) {
  const Index n = op.dim();
  ComplexMatrix m(n, n);
  ComplexVector e(n), col;
  for (Index j = 0; j < n; ++j) {
    e.setZero();
    e[j] = 1.0;
    op.apply_to(e, col);
    m.col(j) = col;
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");

  SpectrumResult res;
  res.iterations = 1;
  const double scale = std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(n - 1)));
  for (int i = 0; i < k; ++i) {
    const Index idx = (which == Which::Smallest) ? i : n - 1 - i;
    const double lambda = es.eigenvalues()(idx);
    ComplexVector v = es.eigenvectors().col(idx);
    ComplexVector hv;
    op.apply_to(v, hv);
    res.eigenvalues.push_back(lambda);
    res.residuals.push_back((hv - lambda * v).norm());
    res.vectors.push_back(std::move(v));
  }
  res.converged = true;
  for (double r : res.residuals)
    if (r > tol * std::max(scale, 1e-300)) res.converged = false;
  if (!res.converged) res.message = "dense path residuals above tol*||op||";
  return res;
}

}  // namespace

SpectrumResult extremal_eigs(const LinearOperator& op, Which which, int k, double tol,
                             int max_iter, std::optional<unsigned> seed) {
  if (!op.hermitian()) throw std::invalid_argument("extremal_eigs: operator must be hermitian");
  if (k < 1) throw std::invalid_argument("extremal_eigs: k must be >= 1");
  const Index n = op.dim();
  if (k > n) throw std::invalid_argument("extremal_eigs: k exceeds dimension");

  if (n <= kDenseThreshold) return dense_eigs(op, which, k, tol);

  if (max_iter <= 0) max_iter = std::min<Index>(n, std::max(400, 20 * k));
  std::mt19937_64 rng(seed.value_or(0x5eed5eedULL));

  // Lanczos with full reorthogonalization.
  std::vector<ComplexVector> basis;
  std::vector<double> alpha, beta;
  ComplexVector v = random_state(n, rng);
  basis.push_back(v);
  ComplexVector w;

  SpectrumResult res;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  double norm_est = 0.0;

  for (int it = 0; it < max_iter; ++it) {
    op.apply_to(basis.back(), w);
    const double a = std::real(basis.back().dot(w));
    alpha.push_back(a);
    w -= a * basis.back();
    if (basis.size() > 1) w -= beta.back() * basis[basis.size() - 2];
    // full reorthogonalization, twice for stability
    for (int pass = 0; pass < 2; ++pass)
      for (const ComplexVector& q : basis) w -= q.dot(w) * q;
    const double b = w.norm();

    const int m = static_cast<int>(alpha.size());
    const bool breakdown = (b < 1e-14);
    // check convergence every few steps
    if (breakdown || m >= 2 * k + 2) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) T(i, i) = alpha[static_cast<size_t>(i)];
      for (int i = 0; i + 1 < m; ++i)
        T(i, i + 1) = T(i + 1, i) = beta[static_cast<size_t>(i)];
      es.compute(T);
      norm_est = std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(m - 1)));
      bool all_ok = m >= k;
      for (int i = 0; i < k && all_ok; ++i) {
        const int idx = (which == Which::Smallest) ? i : m - 1 - i;
        const double bound = breakdown ? 0.0 : b * std::abs(es.eigenvectors()(m - 1, idx));
        if (bound > 0.1 * tol * std::max(norm_est, 1e-300)) all_ok = false;
      }
      if (all_ok || breakdown || it + 1 == max_iter) {
        res.iterations = m;
        for (int i = 0; i < k; ++i) {
          const int idx = (which == Which::Smallest) ? i : m - 1 - i;
          const double lambda = es.eigenvalues()(idx);
          ComplexVector ritz = ComplexVector::Zero(n);
          for (int j = 0; j < m; ++j) ritz += es.eigenvectors()(j, idx) * basis[static_cast<size_t>(j)];
          ritz /= ritz.norm();
          ComplexVector hv;
          op.apply_to(ritz, hv);
          res.eigenvalues.push_back(lambda);
          res.residuals.push_back((hv - lambda * ritz).norm());
          res.vectors.push_back(std::move(ritz));
        }
        res.converged = true;
        for (double r : res.residuals)
          if (r > tol * std::max(norm_est, 1e-300)) res.converged = false;
        if (!res.converged)
          res.message = "lanczos did not meet residual contract after " + std::to_string(m) +
                        " iterations; partial results returned";
        return res;
      }
    }
    if (breakdown) break;
    beta.push_back(b);
    basis.push_back(w / b);
  }
  res.converged = false;
  res.message = "lanczos failed to converge";
  return res;
}

double op_norm(const LinearOperator& op) {
  if (!op.hermitian()) throw std::invalid_argument("op_norm: operator must be hermitian");
  SpectrumResult lo = extremal_eigs(op, Which::Smallest, 1, 1e-8);
  SpectrumResult hi = extremal_eigs(op, Which::Largest, 1, 1e-8);
  if (!lo.converged || !hi.converged) throw std::runtime_error("op_norm: eigensolver did not converge");
  return std::max(std::abs(lo.eigenvalues[0]), std::abs(hi.eigenvalues[0]));
}

}  // namespace symham
