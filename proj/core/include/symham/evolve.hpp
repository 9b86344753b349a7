#pragma once

#include "symham/sparse_operator.hpp"

namespace symham {

enum class EvolveMethod { Auto, Dense, Krylov };

// e^{-i op t} v for hermitian op.  Dense eigendecomposition below
// kDenseThreshold (see eigs.hpp), Lanczos-Krylov propagation with adaptive
// step above; both agree to ~1e-9 and preserve the norm to 1e-10.
ComplexVector evolve(const LinearOperator& op, const ComplexVector& v, double t,
                     EvolveMethod method = EvolveMethod::Auto, double tol = 1e-12);

}  // namespace symham
