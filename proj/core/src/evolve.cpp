#include "symham/evolve.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "symham/eigs.hpp"

namespace symham {

namespace {

ComplexVector evolve_dense(const LinearOperator& op, const ComplexVector& v, double t) {
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
  if (es.info() != Eigen::Success) throw std::runtime_error("evolve: dense eigensolver failed");
  ComplexVector w = es.eigenvectors().adjoint() * v;
  for (Index i = 0; i < n; ++i) w[i] *= std::exp(Complex(0.0, -es.eigenvalues()(i) * t));
  return es.eigenvectors() * w;
}

// One Lanczos step segment: returns the propagated vector over time tau and
// a residual-style error estimate (Saad's a posteriori bound).
ComplexVector krylov_segment(const LinearOperator& op, const ComplexVector& v, double tau,
                             int m_max, double& err_est) {
  const Index n = op.dim();
  const double vnorm = v.norm();
  std::vector<ComplexVector> basis;
  std::vector<double> alpha, beta;
  basis.push_back(v / vnorm);
  ComplexVector w;
  int m = 0;
  double last_b = 0.0;
  bool breakdown = false;
  for (int j = 0; j < m_max; ++j) {
    op.apply_to(basis.back(), w);
    const double a = std::real(basis.back().dot(w));
    alpha.push_back(a);
    w -= a * basis.back();
    if (basis.size() > 1) w -= beta.back() * basis[basis.size() - 2];
    for (int pass = 0; pass < 2; ++pass)
      for (const ComplexVector& q : basis) w -= q.dot(w) * q;
    last_b = w.norm();
    m = static_cast<int>(alpha.size());
    if (last_b < 1e-14) {
      breakdown = true;
      break;
    }
    if (m == m_max) break;
    beta.push_back(last_b);
    basis.push_back(w / last_b);
  }

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) T(i, i) = alpha[static_cast<size_t>(i)];
  for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta[static_cast<size_t>(i)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  Eigen::VectorXcd f = Eigen::VectorXcd::Zero(m);
  for (int i = 0; i < m; ++i) {
    Complex phase = std::exp(Complex(0.0, -es.eigenvalues()(i) * tau));
    f += phase * (es.eigenvectors().col(i) * es.eigenvectors()(0, i)).cast<Complex>();
  }
  err_est = breakdown ? 0.0 : std::abs(tau) * last_b * std::abs(f[m - 1]);
  ComplexVector out = ComplexVector::Zero(n);
  for (int j = 0; j < m; ++j) out += f[j] * basis[static_cast<size_t>(j)];
  return vnorm * out;
}

ComplexVector evolve_krylov(const LinearOperator& op, const ComplexVector& v, double t,
                            double tol) {
  const int m_max = 48;
  ComplexVector cur = v;
  double remaining = t;
  const double sign = (t >= 0) ? 1.0 : -1.0;
  double tau = remaining;
  int guard = 0;
  while (std::abs(remaining) > 1e-15 * std::max(1.0, std::abs(t))) {
    if (++guard > 100000) throw std::runtime_error("evolve: krylov stepper failed to advance");
    tau = sign * std::min(std::abs(tau), std::abs(remaining));
    double err = 0.0;
    ComplexVector attempt = krylov_segment(op, cur, tau, m_max, err);
    const double budget = tol * std::max(1.0, std::abs(tau) / std::abs(t));
    if (err > budget && std::abs(tau) > 1e-12) {
      tau *= 0.5;  // too ambitious, halve the step
      continue;
    }
    cur = std::move(attempt);
    remaining -= tau;
    if (err < 0.01 * budget) tau *= 1.5;
  }
  return cur;
}

}  // namespace

ComplexVector evolve(const LinearOperator& op, const ComplexVector& v, double t,
                     EvolveMethod method, double tol) {
  if (!op.hermitian()) throw std::invalid_argument("evolve: operator must be hermitian");
  if (op.dim() != v.size()) throw std::invalid_argument("evolve: dimension mismatch");
  if (t == 0.0) return v;
  const bool dense = (method == EvolveMethod::Dense) ||
                     (method == EvolveMethod::Auto && op.dim() <= kDenseThreshold);
  return dense ? evolve_dense(op, v, t) : evolve_krylov(op, v, t, tol);
}

}  // namespace symham
