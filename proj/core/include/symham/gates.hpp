#pragma once

#include "symham/linalg.hpp"

namespace symham {

inline ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

inline ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline ComplexMatrix hadamard() {
  ComplexMatrix m(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

// Two-qubit gates in the basis |00>,|01>,|10>,|11>, first qubit = high bit.
inline ComplexMatrix swap_gate() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(3, 3) = 1.0;
  m(1, 2) = m(2, 1) = 1.0;
  return m;
}

inline ComplexMatrix cnot_gate() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = 1.0;
  m(2, 3) = m(3, 2) = 1.0;
  return m;
}

inline ComplexMatrix cz_gate() {
  ComplexMatrix m = ComplexMatrix::Identity(4, 4);
  m(3, 3) = -1.0;
  return m;
}

inline bool is_unitary(const ComplexMatrix& u, double tol = 1e-12) {
  return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() < tol;
}

// Random SU(2) element.
inline ComplexMatrix random_su2(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Vector4d q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  ComplexMatrix u(2, 2);
  u << Complex(q[0], q[1]), Complex(q[2], q[3]), Complex(-q[2], q[3]), Complex(q[0], -q[1]);
  return u;
}

// Applies a single-qubit gate to qubit `target` (1-based, qubit 1 = most
// significant bit) of an n_q-qubit statevector.
inline ComplexVector apply_1q(const ComplexMatrix& u, const ComplexVector& state, int n_q,
                              int target) {
  if (target < 1 || target > n_q) throw std::out_of_range("apply_1q: bad target");
  if (state.size() != (Index(1) << n_q)) throw std::invalid_argument("apply_1q: bad state size");
  const Index n = state.size();
  ComplexVector out = ComplexVector::Zero(n);
  const Index shift = Index(n_q - target);
  for (Index idx = 0; idx < n; ++idx) {
    const Index bit = (idx >> shift) & 1;
    const Index base = idx & ~(Index(1) << shift);
    for (Index bp = 0; bp < 2; ++bp)
      out[base | (bp << shift)] += u(bp, bit) * state[idx];
  }
  return out;
}

// Applies a two-qubit gate to qubits (a, b); a supplies the high bit of the
// gate's 4-dim basis.
inline ComplexVector apply_2q(const ComplexMatrix& u, const ComplexVector& state, int n_q, int a,
                              int b) {
  if (a < 1 || a > n_q || b < 1 || b > n_q || a == b) throw std::out_of_range("apply_2q: bad targets");
  if (state.size() != (Index(1) << n_q)) throw std::invalid_argument("apply_2q: bad state size");
  const Index n = state.size();
  ComplexVector out = ComplexVector::Zero(n);
  const Index sa = Index(n_q - a), sb = Index(n_q - b);
  for (Index idx = 0; idx < n; ++idx) {
    const Index ba = (idx >> sa) & 1, bb = (idx >> sb) & 1;
    const Index in_pair = ba * 2 + bb;
    const Index base = idx & ~(Index(1) << sa) & ~(Index(1) << sb);
    for (Index op = 0; op < 4; ++op) {
      const Complex coeff = u(op, in_pair);
      if (coeff == Complex(0.0, 0.0)) continue;
      out[base | ((op >> 1) << sa) | ((op & 1) << sb)] += coeff * state[idx];
    }
  }
  return out;
}

}  // namespace symham
