#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "symham/qma.hpp"

using namespace symham;
using namespace symham::qma;
using globalprog::CommandKind;

namespace {

Index rotate_index(Index idx, int m) {
  std::vector<int> digits(static_cast<size_t>(m));
  for (int s = m - 1; s >= 0; --s) {
    digits[static_cast<size_t>(s)] = static_cast<int>(idx % kSiteDim);
    idx /= kSiteDim;
  }
  Index out = 0;
  for (int s = 0; s < m; ++s)
    out = out * kSiteDim + digits[static_cast<size_t>((s + m - 1) % m)];
  return out;
}

Index encode(const Configuration& c) {
  Index idx = 0;
  for (const Site& s : c) idx = idx * kSiteDim + site_to_index(s);
  return idx;
}

SparseOperator random_psd_with_kernel(Index dim, Index kernel_dim, double j_min,
                                      std::mt19937_64& rng, ComplexMatrix* kernel_out,
                                      bool exact_min = false) {
  // random unitary column frame via QR of a Gaussian matrix
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix a(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  const ComplexMatrix q = qr.householderQ();
  std::uniform_real_distribution<double> u(1.0, 2.0);
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (Index i = kernel_dim; i < dim; ++i) {
    const double lambda = (exact_min && i == kernel_dim) ? j_min : j_min * u(rng);
    h += lambda * (q.col(i) * q.col(i).adjoint());
  }
  std::vector<Triplet> t;
  for (Index r = 0; r < dim; ++r)
    for (Index c = 0; c < dim; ++c)
      if (std::abs(h(r, c)) > 0) t.push_back({r, c, 0.5 * (h(r, c) + std::conj(h(c, r)))});
  *kernel_out = q.leftCols(kernel_dim);
  return SparseOperator::from_triplets(dim, std::move(t));
}

SparseOperator random_hermitian_dense(Index dim, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix a(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
  ComplexMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const double norm = std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(dim - 1)));
  h *= scale / norm;
  std::vector<Triplet> t;
  for (Index r = 0; r < dim; ++r)
    for (Index c = 0; c < dim; ++c) t.push_back({r, c, h(r, c)});
  return SparseOperator::from_triplets(dim, std::move(t));
}

}  // namespace

TEST_CASE("49-level site encoding is a bijection") {
  for (int i = 0; i < kSiteDim; ++i) CHECK(site_to_index(site_from_index(i)) == i);
  CHECK(site_to_index(Site::m_level()) == 48);
  const std::string text = "MARK P:G+n1 D:0+h21 m D:?";
  CHECK(to_text(from_text(text)) == text);
}

TEST_CASE("extended ring operator: hermitian, translation invariant") {
  const SparseOperator h = build_extended_ht(3);
  CHECK(h.hermiticity_residual() == 0.0);
  std::vector<Triplet> rotated;
  for (const Triplet& t : h.triplets())
    rotated.push_back({rotate_index(t.row, 3), rotate_index(t.col, 3), t.value});
  const SparseOperator hr = SparseOperator::from_triplets(h.dim(), std::move(rotated));
  REQUIRE(hr.nnz() == h.nnz());
  const auto& a = h.triplets();
  const auto& b = hr.triplets();
  for (size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].row == b[k].row);
    CHECK(a[k].col == b[k].col);
    CHECK(a[k].value == b[k].value);
  }
}

TEST_CASE("canonical launch runs checker, computation and output sweep") {
  const Configuration init = initial_configuration({CommandKind::G}, {1});
  const ClockPath path = reachable_clock_path(init);
  CHECK(path.initial_index == 0);
  CHECK(path.nodes.size() == 8);

  // terminal: output sweep parked on the data site
  const Configuration& last = path.nodes.back();
  CHECK(last[2].kind == Site::Kind::Data);
  CHECK(last[2].has_head());
  CHECK(last[2].head_active() == 2);

  // leak test against the full-space operator
  const SparseOperator h = build_extended_ht(3);
  std::vector<ComplexVector> emb;
  for (const Configuration& skel : path.nodes) {
    Configuration conc = skel;
    for (Site& s : conc)
      if (s.kind == Site::Kind::Data) s.q = 1;
    ComplexVector v = ComplexVector::Zero(h.dim());
    v[encode(conc)] = 1.0;
    emb.push_back(std::move(v));
  }
  for (size_t k = 0; k < emb.size(); ++k) {
    ComplexVector want = ComplexVector::Zero(h.dim());
    if (k > 0) want += emb[k - 1];
    if (k + 1 < emb.size()) want += emb[k + 1];
    CHECK((h.apply(emb[k]) - want).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("a launch without the active program label terminates early") {
  const ClockPath with = reachable_clock_path(initial_configuration({CommandKind::G}, {1}, true));
  const ClockPath without =
      reachable_clock_path(initial_configuration({CommandKind::G}, {1}, false));
  CHECK(without.nodes.size() < with.nodes.size());
  // the sweep parks at the end of the program region
  const Configuration& last = without.nodes.back();
  bool parked_sweeper = false;
  for (const Site& s : last)
    parked_sweeper |= (s.kind == Site::Kind::Program && s.has_head() && s.head_active() == 2);
  CHECK(parked_sweeper);
}

TEST_CASE("penalties act as advertised on hand-built configurations") {
  QmaInstance inst;
  inst.ring_sites = 3;
  inst.tape = {CommandKind::G};
  inst.output_site = 3;
  inst.x_targets = {{2, 1}, {3, 0}};
  const Penalties pen = build_penalties(inst);

  auto value = [](const SparseOperator& op, const Configuration& c) {
    const Index idx = encode(c);
    ComplexVector v = ComplexVector::Zero(op.dim());
    v[idx] = 1.0;
    return std::real(op.apply(v)[idx]);
  };

  // output site holding the sweep over the correct answer is free
  CHECK(value(pen.h_out, from_text("P:G MARK D:1+h20")) == 0.0);
  CHECK(value(pen.h_out, from_text("P:G MARK D:0+h20")) == 1.0);
  CHECK(value(pen.h_out, from_text("P:G MARK D:0+h00")) == 0.0);  // no sweep, no check

  // legal launch carries no static penalty and no input penalty
  const Configuration launch = initial_configuration(inst.tape, {0});
  CHECK(value(pen.h_b, launch) == 0.0);
  CHECK(value(pen.h_in, launch) == 0.0);

  // the roving checker catches a wrong tape value and a wrong ancilla
  CHECK(value(pen.h_in, from_text("MARK P:S+n1 D:0")) == 1.0);
  CHECK(value(pen.h_in, from_text("MARK P:G D:1+n1")) == 1.0);
  CHECK(value(pen.h_in, from_text("MARK P:G D:0+n1")) == 0.0);

  // site typing penalties
  CHECK(value(pen.h_b, from_text("MARK D:0 D:1")) == 1.0);    // data qubit on the bus
  CHECK(value(pen.h_b, from_text("MARK P:G P:S")) == 1.0);    // program value on a data site
  CHECK(value(pen.h_b, from_text("P:G m D:0")) == 0.0);       // m level is not penalized
}

TEST_CASE("gap bounds evaluate exactly and stay positive") {
  const GapBounds g3 = gap_lower_bounds(3);
  CHECK(g3.short_path ==
        doctest::Approx(-2.0 * std::cos(std::numbers::pi / 4) + 2.0 * std::cos(std::numbers::pi / 5))
            .epsilon(1e-14));
  CHECK(g3.short_path == doctest::Approx(0.20382).epsilon(1e-4));
  for (int m : {2, 3, 10, 100, 1000, 10000}) {
    const GapBounds g = gap_lower_bounds(m);
    CHECK(g.short_path > 0.0);
    CHECK(g.excited > 0.0);
  }
  // scaled asymptotics: the excited gap is c/M^2 with c -> 3 pi^2, the
  // shorter-path gap decays one power faster, like 2 pi^2 / M^3
  for (int m : {50, 200, 1000}) {
    const GapBounds g = gap_lower_bounds(m);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    CHECK(g.excited * m * m / pi2 > 2.5);
    CHECK(g.excited * m * m / pi2 < 3.5);
    CHECK(g.short_path * m * m * m / pi2 > 1.5);
    CHECK(g.short_path * m * m * m / pi2 < 2.5);
  }
}

TEST_CASE("coupling schedule: pinned value and invariants over a sweep") {
  const CouplingSchedule s3 = schedule_couplings(3, 1.0 / 3.0);
  CHECK(s3.j_out ==
        doctest::Approx(4.0 / std::pow(std::sin(std::numbers::pi / 5.0), 2)).epsilon(1e-12));
  CHECK(s3.j_out == doctest::Approx(11.5778).epsilon(1e-4));
  CHECK(s3.satisfied());

  for (int m = 2; m <= 100; ++m) CHECK(schedule_couplings(m, 1.0 / 3.0).satisfied());

  // cubic growth of the transfer-matched coupling
  const double r = schedule_couplings(128, 0.0).j_out / schedule_couplings(64, 0.0).j_out;
  CHECK(r == doctest::Approx(8.0).epsilon(0.1));
}

TEST_CASE("projection lemma: trivial case and the 1/8 calibration") {
  std::mt19937_64 rng(2024);
  // H1 = 0: the bound degenerates to 0 <= lambda(H2)
  ComplexMatrix kernel;
  const SparseOperator h2 = random_psd_with_kernel(12, 3, 10.0, rng, &kernel);
  const SparseOperator zero = SparseOperator::from_triplets(12, {{0, 0, 0.0}});
  const ProjectionBound trivial = projection_lemma_bound(zero, h2, kernel);
  CHECK(trivial.holds);
  CHECK(std::abs(trivial.lhs) < 1e-12);

  // J = 8||H1||^2 + 2||H1|| reproduces the -1/8 offset
  const SparseOperator h1 = random_hermitian_dense(12, 1.3, rng);
  const double n1 = 1.3;
  const double j = 8.0 * n1 * n1 + 2.0 * n1;
  ComplexMatrix kernel2;
  SparseOperator h2j = random_psd_with_kernel(12, 4, j, rng, &kernel2, /*exact_min=*/true);
  const ProjectionBound bound = projection_lemma_bound(h1, h2j, kernel2);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(kernel2.adjoint() * h1.to_dense() * kernel2);
  CHECK(std::abs(bound.lhs - (es.eigenvalues()(0) - 1.0 / 8.0)) < 1e-9);
  CHECK(bound.holds);
}

TEST_CASE("projection lemma holds across a randomized suite") {
  std::mt19937_64 rng(515151);
  std::uniform_int_distribution<Index> dims(8, 64);
  int checked = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Index dim = dims(rng);
    const Index kdim = std::uniform_int_distribution<Index>(1, dim / 2)(rng);
    const double h1_norm = std::uniform_real_distribution<double>(0.2, 2.0)(rng);
    const double j = 2.0 * h1_norm * (1.1 + std::uniform_real_distribution<double>(0.0, 4.0)(rng));
    ComplexMatrix kernel;
    const SparseOperator h2 = random_psd_with_kernel(dim, kdim, j, rng, &kernel);
    const SparseOperator h1 = random_hermitian_dense(dim, h1_norm, rng);
    const ProjectionBound b = projection_lemma_bound(h1, h2, kernel);
    CHECK(b.holds);
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("projection lemma rejects inapplicable inputs") {
  std::mt19937_64 rng(8);
  ComplexMatrix kernel;
  const SparseOperator h2 = random_psd_with_kernel(10, 2, 0.5, rng, &kernel);
  const SparseOperator h1 = random_hermitian_dense(10, 5.0, rng);  // J <= 2||H1||
  CHECK_THROWS_AS(projection_lemma_bound(h1, h2, kernel), std::invalid_argument);
}

TEST_CASE("ground-state separation on the minimal instance") {
  const SeparationResult res = energy_separation_experiment(3);
  CHECK(res.path_nodes == 8);
  CHECK(res.m_effective == 7);
  CHECK(res.schedule.satisfied());
  CHECK(res.sector_dim > 100);

  CHECK(std::abs(res.lambda_yes) < 1e-8 * res.kappa);
  CHECK(res.lambda_no - res.lambda_yes > 0.5);
}
