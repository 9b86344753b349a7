#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "symham/dfs.hpp"
#include "symham/eigs.hpp"
#include "symham/gates.hpp"

using namespace symham;
using namespace symham::dfs;

namespace {

// independent combinatorial route: mult(j) = C(N, N/2-j) - C(N, N/2-j-1)
Index binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  Index r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

ComplexVector total_spin_component(const ComplexMatrix& half_pauli, const ComplexVector& v,
                                   int n) {
  ComplexVector out = ComplexVector::Zero(v.size());
  for (int q = 1; q <= n; ++q) out += apply_1q(half_pauli, v, n, q);
  return out;
}

}  // namespace

TEST_CASE("spin multiplicities: closed cases and the ballot-number route") {
  const SpinDecomposition d2 = spin_multiplicities(2);
  CHECK(d2.mult(0) == 1);
  CHECK(d2.mult(2) == 1);

  const SpinDecomposition d4 = spin_multiplicities(4);
  CHECK(d4.mult(0) == 2);
  CHECK(d4.mult(2) == 3);
  CHECK(d4.mult(4) == 1);

  // the constructor already cross-checks against the S^2 eigenspace count for
  // every even N <= 10; compare against the ballot numbers as a third route
  for (int n : {2, 4, 6, 8}) {
    const SpinDecomposition d = spin_multiplicities(n);
    for (int tj = 0; tj <= n; tj += 2)
      CHECK(d.mult(tj) == binom(n, (n - tj) / 2) - binom(n, (n - tj) / 2 - 1));
  }

  CHECK(spin_multiplicities(10).mult(0) == 42);
  CHECK_THROWS_AS(spin_multiplicities(3), std::invalid_argument);
  CHECK_THROWS_AS(spin_multiplicities(14), std::length_error);
}

TEST_CASE("singlet basis: the two-qubit column is the singlet state") {
  const EncodingIsometry iso = singlet_basis(2);
  REQUIRE(iso.v.cols() == 1);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(iso.v(1, 0) - s) < 1e-15);   // |01>
  CHECK(std::abs(iso.v(2, 0) + s) < 1e-15);   // |10>
  CHECK(std::abs(iso.v(0, 0)) < 1e-15);
  CHECK(std::abs(iso.v(3, 0)) < 1e-15);
}

TEST_CASE("singlet columns are annihilated by the total spin") {
  for (int n : {4, 6}) {
    const EncodingIsometry iso = singlet_basis(n);
    CHECK(iso.v.cols() == spin_multiplicities(n).mult(0));
    const SparseOperator s2 = total_spin_squared(n);
    const ComplexMatrix half_x = 0.5 * pauli_x();
    const ComplexMatrix half_y = 0.5 * pauli_y();
    const ComplexMatrix half_z = 0.5 * pauli_z();
    for (Index c = 0; c < iso.v.cols(); ++c) {
      const ComplexVector col = iso.v.col(c).cast<Complex>();
      CHECK(s2.apply(col).norm() < 1e-12);
      CHECK(total_spin_component(half_x, col, n).norm() < 1e-12);
      CHECK(total_spin_component(half_y, col, n).norm() < 1e-12);
      CHECK(total_spin_component(half_z, col, n).norm() < 1e-12);
    }
  }
}

TEST_CASE("ten-qubit singlet sector has dimension 42 and orthonormal columns") {
  const EncodingIsometry iso = singlet_basis(10);
  CHECK(iso.v.rows() == 1024);
  CHECK(iso.v.cols() == 42);
  const Eigen::MatrixXd gram = iso.v.transpose() * iso.v;
  CHECK((gram - Eigen::MatrixXd::Identity(42, 42)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("encoded levels are invariant under collective rotations") {
  const EncodingIsometry iso = encode_levels(31);
  CHECK(iso.v.cols() == 31);
  const Eigen::MatrixXd gram = iso.v.transpose() * iso.v;
  CHECK((gram - Eigen::MatrixXd::Identity(31, 31)).cwiseAbs().maxCoeff() < 1e-12);

  std::mt19937_64 rng(1234);
  const ComplexMatrix vc = iso.v.cast<Complex>();
  for (int rep = 0; rep < 20; ++rep) {
    const ComplexMatrix u = random_su2(rng);
    ComplexMatrix rotated(1024, 31);
    for (Index c = 0; c < 31; ++c)
      rotated.col(c) = apply_uniform_rotation(u, vc.col(c), 10);
    const ComplexMatrix residual = vc.adjoint() * rotated - ComplexMatrix::Identity(31, 31);
    // spectral norm via the largest singular value
    Eigen::JacobiSVD<ComplexMatrix> svd(residual);
    CHECK(svd.singularValues()(0) < 1e-9);
  }

  // a uniform global phase on every qubit accumulates tenfold
  const double alpha = 0.731;
  const ComplexMatrix up = std::exp(Complex(0, alpha)) * ComplexMatrix::Identity(2, 2);
  const ComplexVector col = vc.col(5);
  const ComplexVector rot = apply_uniform_rotation(up, col, 10);
  CHECK((rot - std::exp(Complex(0, 10.0 * alpha)) * col).norm() < 1e-12);
}

TEST_CASE("encoded identity acts as the doubled singlet projector") {
  const EncodingIsometry iso = encode_levels(2, 4);  // small register keeps this cheap
  const auto term = build_hr_term(SparseOperator::identity(4), iso);
  CHECK(term->dim() == 256);

  std::mt19937_64 rng(77);
  const ComplexVector r = random_state(256, rng);
  const ComplexVector once = term->apply(r);
  const ComplexVector twice = term->apply(once);
  CHECK((twice - once).norm() < 1e-12);  // projector

  // acts as identity on encoded product vectors
  ComplexVector enc = ComplexVector::Zero(256);
  const Eigen::VectorXd va = iso.v.col(0), vb = iso.v.col(1);
  for (Index x = 0; x < 16; ++x)
    for (Index y = 0; y < 16; ++y) enc[x * 16 + y] = va(x) * vb(y);
  CHECK((term->apply(enc) - enc).norm() < 1e-12);
}

TEST_CASE("encoded spectrum is the logical spectrum plus zeros") {
  std::mt19937_64 rng(91);
  const int d = 2;
  const EncodingIsometry iso = encode_levels(d, 4);
  // random hermitian logical term
  ComplexMatrix hm = ComplexMatrix::Random(d * d, d * d);
  hm = (hm + hm.adjoint()).eval();
  std::vector<Triplet> t;
  for (Index r = 0; r < d * d; ++r)
    for (Index c = 0; c < d * d; ++c) t.push_back({r, c, hm(r, c)});
  const SparseOperator h = SparseOperator::from_triplets(d * d, std::move(t));
  const auto term = build_hr_term(h, iso);

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hm);
  for (int k : {0, d * d - 1}) {
    // lift the logical eigenvector through the doubled isometry
    ComplexVector lifted = ComplexVector::Zero(term->dim());
    for (Index a = 0; a < d; ++a)
      for (Index b = 0; b < d; ++b) {
        const Complex amp = es.eigenvectors()(a * d + b, k);
        for (Index x = 0; x < 16; ++x)
          for (Index y = 0; y < 16; ++y)
            lifted[x * 16 + y] += amp * iso.v(x, a) * iso.v(y, b);
      }
    const ComplexVector out = term->apply(lifted);
    CHECK((out - es.eigenvalues()(k) * lifted).norm() < 1e-10);
  }

  // orthogonal complement maps to zero
  ComplexVector r = random_state(term->dim(), rng);
  const auto proj = build_hr_term(SparseOperator::identity(d * d), iso);
  const ComplexVector perp = r - proj->apply(r);
  CHECK(term->apply(perp).norm() < 1e-10);
}

TEST_CASE("isometry binary table round-trips") {
  const EncodingIsometry iso = encode_levels(5, 6);
  const std::string path = "/tmp/symham_isometry.bin";
  write_isometry(iso, path);
  const EncodingIsometry back = read_isometry(path);
  CHECK(back.n_qubits == 6);
  CHECK(back.v.rows() == iso.v.rows());
  CHECK(back.v.cols() == iso.v.cols());
  CHECK((back.v - iso.v).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS(read_isometry("/tmp/definitely_not_there.bin"));
}
