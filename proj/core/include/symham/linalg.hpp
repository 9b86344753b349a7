#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace symham {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = std::int64_t;

constexpr double kNormTol = 1e-12;

inline bool is_normalized(const ComplexVector& v, double tol = kNormTol) {
  return std::abs(v.norm() - 1.0) < tol;
}

inline ComplexVector basis_state(Index dim, Index k) {
  if (k < 0 || k >= dim) throw std::out_of_range("basis_state: index out of range");
  ComplexVector v = ComplexVector::Zero(dim);
  v[k] = 1.0;
  return v;
}

inline ComplexVector random_state(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexVector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = Complex(g(rng), g(rng));
  v /= v.norm();
  return v;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Fidelity error 1 - |<a|b>|^2 for normalized inputs.
inline double fidelity_error(const ComplexVector& a, const ComplexVector& b) {
  const Complex ov = a.dot(b);  // Eigen's dot conjugates the first argument
  return 1.0 - std::norm(ov) / (a.squaredNorm() * b.squaredNorm());
}

// Integer power, used for Hilbert-space dimensions.
inline Index ipow(Index base, int exp) {
  Index r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > (Index(1) << 62) / base) throw std::overflow_error("ipow overflow");
    r *= base;
  }
  return r;
}

}  // namespace symham
