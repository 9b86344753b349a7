#pragma once

#include <optional>
#include <string>

#include "symham/sparse_operator.hpp"

namespace symham {

enum class Which { Smallest, Largest };

struct SpectrumResult {
  std::vector<double> eigenvalues;  // sorted ascending (Smallest) / descending (Largest)
  std::vector<double> residuals;    // ||H v - lambda v|| per reported pair
  std::vector<ComplexVector> vectors;
  int iterations = 0;
  bool converged = true;
  std::string message;
};

// Threshold below which the dense eigensolver path is used.
constexpr Index kDenseThreshold = 2048;

// k extremal eigenvalues of a hermitian operator.  Lanczos with full
// reorthogonalization above kDenseThreshold, dense diagonalization below.
// Residual contract: residuals[i] <= tol * ||op|| on every converged return.
SpectrumResult extremal_eigs(const LinearOperator& op, Which which, int k, double tol = 1e-10,
                             int max_iter = 0, std::optional<unsigned> seed = std::nullopt);

// Spectral norm (largest |eigenvalue|), relative accuracy ~1e-6 or better.
double op_norm(const LinearOperator& op);

}  // namespace symham
