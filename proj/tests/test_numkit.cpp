#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "symham/eigs.hpp"
#include "symham/evolve.hpp"
#include "symham/gates.hpp"
#include "symham/xxchain.hpp"

using namespace symham;

namespace {

SparseOperator random_hermitian(Index dim, std::mt19937_64& rng, double density = 0.4) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Triplet> t;
  for (Index r = 0; r < dim; ++r)
    for (Index c = r; c < dim; ++c) {
      if (u(rng) > 2.0 * density - 1.0) continue;
      const Complex v = (r == c) ? Complex(u(rng), 0.0) : Complex(u(rng), u(rng));
      t.push_back({r, c, v});
      if (r != c) t.push_back({c, r, std::conj(v)});
    }
  t.push_back({0, 0, 1.0});  // never empty
  return SparseOperator::from_triplets(dim, std::move(t), Symmetry::Hermitian);
}

// independent dense evolution oracle
ComplexVector dense_expm_apply(const ComplexMatrix& h, const ComplexVector& v, double t) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  ComplexVector w = es.eigenvectors().adjoint() * v;
  for (Index i = 0; i < w.size(); ++i) w[i] *= std::exp(Complex(0, -es.eigenvalues()(i) * t));
  return es.eigenvectors() * w;
}

}  // namespace

TEST_CASE("apply: identity and permutation cases") {
  std::mt19937_64 rng(7);
  const SparseOperator id = SparseOperator::identity(4);
  const ComplexVector v = random_state(4, rng);
  CHECK((id.apply(v) - v).norm() == 0.0);

  // two-site hopping |0><1| + |1><0|
  const SparseOperator hop = SparseOperator::from_triplets(2, {{0, 1, 1.0}, {1, 0, 1.0}});
  ComplexVector e0(2), want(2);
  e0 << 1.0, 0.0;
  want << 0.0, 1.0;
  CHECK((hop.apply(e0) - want).norm() == 0.0);
}

TEST_CASE("apply matches a dense reference on random hermitian operators") {
  std::mt19937_64 rng(11);
  const SparseOperator op = random_hermitian(8, rng);
  const ComplexMatrix d = op.to_dense();
  for (int rep = 0; rep < 5; ++rep) {
    const ComplexVector v = random_state(8, rng);
    CHECK((op.apply(v) - d * v).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("apply is linear and deterministic") {
  std::mt19937_64 rng(13);
  const SparseOperator op = random_hermitian(16, rng);
  const ComplexVector u = random_state(16, rng), v = random_state(16, rng);
  const Complex a(0.3, -1.1), b(-0.7, 0.2);
  const ComplexVector lhs = op.apply(a * u + b * v);
  const ComplexVector rhs = a * op.apply(u) + b * op.apply(v);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
  const ComplexVector again = op.apply(a * u + b * v);
  CHECK((lhs - again).norm() == 0.0);  // bitwise stable
}

TEST_CASE("triplet duplicates are summed and hermiticity is enforced") {
  const SparseOperator op =
      SparseOperator::from_triplets(2, {{0, 1, 0.5}, {0, 1, 0.5}, {1, 0, 1.0}});
  CHECK(op.nnz() == 2);
  CHECK(op.triplets()[0].value == Complex(1.0, 0.0));
  CHECK_THROWS_AS(SparseOperator::from_triplets(2, {{0, 1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(SparseOperator::from_triplets(2, {{0, 3, 1.0}}), std::out_of_range);
}

TEST_CASE("evolve: trivial cases") {
  std::mt19937_64 rng(17);
  const SparseOperator hop = SparseOperator::from_triplets(2, {{0, 1, 1.0}, {1, 0, 1.0}});
  const ComplexVector v = random_state(2, rng);
  CHECK((evolve(hop, v, 0.0) - v).norm() == 0.0);

  // half Rabi period moves |1> to |2> up to phase
  ComplexVector e0(2);
  e0 << 1.0, 0.0;
  const ComplexVector out = evolve(hop, e0, std::numbers::pi / 2);
  CHECK(std::abs(std::abs(out[1]) - 1.0) < 1e-12);
}

TEST_CASE("evolve agrees with an independent dense eigendecomposition oracle") {
  const SparseOperator h = xxchain::hopping_operator({8, 1.0});
  ComplexVector e0 = basis_state(8, 0);
  const ComplexVector got = evolve(h, e0, 3.0);
  const ComplexVector want = dense_expm_apply(h.to_dense(), e0, 3.0);
  CHECK(fidelity_error(got, want) < 1e-10);
}

TEST_CASE("evolve: norm preservation and group law") {
  std::mt19937_64 rng(19);
  const SparseOperator op = random_hermitian(24, rng);
  const ComplexVector v = random_state(24, rng);
  for (double t : {0.3, 1.7, -2.4}) {
    const ComplexVector w = evolve(op, v, t);
    CHECK(std::abs(w.norm() - 1.0) < 1e-10);
  }
  const ComplexVector one = evolve(op, evolve(op, v, 0.8), 1.4);
  const ComplexVector two = evolve(op, v, 2.2);
  CHECK((one - two).norm() < 1e-9);
}

TEST_CASE("evolve: krylov and dense paths agree") {
  std::mt19937_64 rng(23);
  const SparseOperator h = xxchain::hopping_operator({160, 1.0});
  const ComplexVector v = random_state(160, rng);
  const ComplexVector a = evolve(h, v, 5.5, EvolveMethod::Dense);
  const ComplexVector b = evolve(h, v, 5.5, EvolveMethod::Krylov);
  CHECK((a - b).norm() < 1e-9);
}

TEST_CASE("evolve rejects non-hermitian input") {
  const SparseOperator nh =
      SparseOperator::from_triplets(2, {{0, 1, 1.0}}, Symmetry::None);
  ComplexVector v(2);
  v << 1.0, 0.0;
  CHECK_THROWS_AS(evolve(nh, v, 1.0), std::invalid_argument);
}

TEST_CASE("extremal_eigs: identity and hopping chains") {
  const SpectrumResult rid = extremal_eigs(SparseOperator::identity(16), Which::Smallest, 1);
  CHECK(rid.converged);
  CHECK(rid.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));

  const SpectrumResult r5 =
      extremal_eigs(xxchain::hopping_operator({5, 1.0}), Which::Smallest, 1, 1e-12);
  CHECK(r5.converged);
  CHECK(std::abs(r5.eigenvalues[0] - 2.0 * std::cos(5.0 * std::numbers::pi / 6.0)) < 1e-12);
}

TEST_CASE("extremal_eigs matches a dense oracle on random operators") {
  std::mt19937_64 rng(29);
  const SparseOperator op = random_hermitian(50, rng);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(op.to_dense());
  const SpectrumResult lo = extremal_eigs(op, Which::Smallest, 3, 1e-10);
  const SpectrumResult hi = extremal_eigs(op, Which::Largest, 2, 1e-10);
  REQUIRE(lo.converged);
  REQUIRE(hi.converged);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(lo.eigenvalues[i] - es.eigenvalues()(i)) < 1e-9);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(hi.eigenvalues[i] - es.eigenvalues()(49 - i)) < 1e-9);
}

TEST_CASE("extremal_eigs residual contract on the lanczos path") {
  // hopping chain with an attractive end impurity -u: an isolated bound
  // state at -(u + 1/u), exponentially converged at this length
  const int L = 3000;  // above the dense threshold
  const double u = 3.0;
  std::vector<Triplet> t;
  for (Index i = 0; i + 1 < L; ++i) {
    t.push_back({i, i + 1, 1.0});
    t.push_back({i + 1, i, 1.0});
  }
  t.push_back({0, 0, -u});
  const SparseOperator h = SparseOperator::from_triplets(L, std::move(t));
  const SpectrumResult r = extremal_eigs(h, Which::Smallest, 1, 1e-10);
  REQUIRE(r.converged);
  const double analytic = -(u + 1.0 / u);
  CHECK(std::abs(r.eigenvalues[0] - analytic) < 1e-9);
  CHECK(r.residuals[0] <= 1e-10 * (u + 1.0 / u) * 1.0001);
}

TEST_CASE("op_norm") {
  CHECK(op_norm(SparseOperator::identity(8)) == doctest::Approx(1.0).epsilon(1e-10));
  // X (x) identity on two qubits
  std::vector<Triplet> t = {{0, 2, 1.0}, {2, 0, 1.0}, {1, 3, 1.0}, {3, 1, 1.0}};
  CHECK(op_norm(SparseOperator::from_triplets(4, std::move(t))) ==
        doctest::Approx(1.0).epsilon(1e-10));
  const double got = op_norm(xxchain::hopping_operator({4, 1.0}));
  CHECK(std::abs(got - 2.0 * std::cos(std::numbers::pi / 5.0)) < 1e-6);
}
