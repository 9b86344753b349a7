#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "symham/tchain.hpp"
#include "symham/xxchain.hpp"

using namespace symham;
using namespace symham::tchain;
using globalprog::Alignment;
using globalprog::CommandKind;

namespace {

// cyclic digit rotation of a base-31 index (site 0 -> site 1 -> ...)
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

std::vector<int> base31_digits(Index idx, int m) {
  std::vector<int> d(static_cast<size_t>(m));
  for (int s = m - 1; s >= 0; --s) {
    d[static_cast<size_t>(s)] = static_cast<int>(idx % kSiteDim);
    idx /= kSiteDim;
  }
  return d;
}

struct CanonicalTriplet {
  Index row, col;
  Complex v;
  bool operator<(const CanonicalTriplet& o) const {
    return row != o.row ? row < o.row : col < o.col;
  }
};

std::vector<CanonicalTriplet> canonical(const SparseOperator& h) {
  std::vector<CanonicalTriplet> out;
  for (const Triplet& t : h.triplets()) out.push_back({t.row, t.col, t.value});
  std::sort(out.begin(), out.end());
  return out;
}

void check_path_is_hopping(const ClockPath& path, const ComplexVector& data0,
                           const SparseOperator& h) {
  const auto staged = staged_states(path, data0);
  const int len = static_cast<int>(path.nodes.size());
  std::vector<ComplexVector> embedded(static_cast<size_t>(len));
  for (int k = 0; k < len; ++k)
    embedded[static_cast<size_t>(k)] = embed_path_node(path, k, staged[static_cast<size_t>(k)]);

  // leak test: H maps each node vector exactly to the sum of its neighbors
  for (int k = 0; k < len; ++k) {
    ComplexVector want = ComplexVector::Zero(h.dim());
    if (k > 0) want += embedded[static_cast<size_t>(k) - 1];
    if (k + 1 < len) want += embedded[static_cast<size_t>(k) + 1];
    const ComplexVector got = h.apply(embedded[static_cast<size_t>(k)]);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
  }

  // restricted block equals the hopping chain; spectrum is the analytic one
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(len, len);
  for (int a = 0; a < len; ++a) {
    const ComplexVector ha = h.apply(embedded[static_cast<size_t>(a)]);
    for (int b = 0; b < len; ++b)
      t(a, b) = std::real(embedded[static_cast<size_t>(b)].dot(ha));
  }
  for (int a = 0; a < len; ++a)
    for (int b = 0; b < len; ++b) {
      const double want = (std::abs(a - b) == 1) ? 1.0 : 0.0;
      CHECK(std::abs(t(a, b) - want) < 1e-12);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  const auto analytic = xxchain::analytic_spectrum({len, 1.0});
  for (int i = 0; i < len; ++i)
    CHECK(std::abs(es.eigenvalues()(i) - analytic[static_cast<size_t>(i)]) < 1e-10);
}

}  // namespace

TEST_CASE("site encoding is a bijection on 0..30") {
  for (int i = 0; i < kSiteDim; ++i) CHECK(site_to_index(site_from_index(i)) == i);
  CHECK(site_to_index(Site::m_level()) == 30);
  CHECK_THROWS(site_to_index(Site::data(-1)));  // symbolic data has no index
}

TEST_CASE("configuration text format round-trips") {
  const std::string text = "P:G P:skip MARK D:0 D:1";
  CHECK(to_text(from_text(text)) == text);
  const std::string with_heads = "MARK+h00 P:S D:1+h11 m D:?";
  CHECK(to_text(from_text(with_heads)) == with_heads);
  CHECK_THROWS(from_text("banana"));
}

TEST_CASE("validity checker") {
  CHECK(check_configuration(initial_configuration({CommandKind::S}, {0})).valid);
  CHECK_FALSE(check_configuration(from_text("D:0 D:1 D:0")).valid);       // no program block
  CHECK_FALSE(check_configuration(from_text("MARK P:G D:0")).valid);      // no head
  CHECK(check_configuration(from_text("P:G m P:skip D:0 D:1")).valid);    // m transit
  CHECK_FALSE(check_configuration(from_text("MARK+h00 D:0 P:G D:1 D:0")).valid);  // split block
}

TEST_CASE("initial_configuration layout and errors") {
  const Configuration c = initial_configuration({CommandKind::S}, {0});
  REQUIRE(c.size() == 3);
  CHECK(c[0].kind == Site::Kind::Marker);
  CHECK(c[0].head == head_index(0, 0));
  CHECK(c[1].kind == Site::Kind::Program);
  CHECK(c[1].q == 2);
  CHECK(c[2].kind == Site::Kind::Data);

  CHECK_THROWS_AS(initial_configuration({CommandKind::G}, {0, 1}), std::invalid_argument);  // even ring
  CHECK_THROWS_AS(initial_configuration({}, {0}), std::invalid_argument);
}

TEST_CASE("ring Hamiltonian: hermitian, translation invariant, two-body") {
  const SparseOperator h = build_ht(3);
  CHECK(h.hermiticity_residual() == 0.0);

  // exact translational invariance as canonical triplet-set equality
  std::vector<Triplet> rotated;
  for (const Triplet& t : h.triplets())
    rotated.push_back({rotate_index(t.row, 3), rotate_index(t.col, 3), t.value});
  const SparseOperator hr = SparseOperator::from_triplets(h.dim(), std::move(rotated));
  const auto a = canonical(h), b = canonical(hr);
  REQUIRE(a.size() == b.size());
  for (size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].row == b[k].row);
    CHECK(a[k].col == b[k].col);
    CHECK(a[k].v == b[k].v);
  }

  // every matrix element touches at most two adjacent ring sites
  for (const Triplet& t : h.triplets()) {
    const auto dr = base31_digits(t.row, 3);
    const auto dc = base31_digits(t.col, 3);
    std::vector<int> diff;
    for (int s = 0; s < 3; ++s)
      if (dr[static_cast<size_t>(s)] != dc[static_cast<size_t>(s)]) diff.push_back(s);
    REQUIRE(diff.size() <= 2);
    if (diff.size() == 2) {
      const int gap = (diff[1] - diff[0] + 3) % 3;
      CHECK((gap == 1 || gap == 2));  // adjacent on the ring
    }
  }
}

TEST_CASE("frozen configuration: no token, path of length 1") {
  const Configuration frozen = from_text("P:G P:S P:skip D:0 D:1");
  const ClockPath path = reachable_clock_path(frozen);
  CHECK(path.nodes.size() == 1);
  CHECK(path.initial_index == 0);
}

TEST_CASE("launch configuration is a path endpoint and the path is simple") {
  for (auto tape : {std::vector<CommandKind>{CommandKind::Skip},
                    std::vector<CommandKind>{CommandKind::G},
                    std::vector<CommandKind>{CommandKind::S}}) {
    const ClockPath path = reachable_clock_path(initial_configuration(tape, {0}));
    CHECK(path.nodes.size() >= 2);
    CHECK(path.initial_index == 0);
  }
}

TEST_CASE("restricted dynamics on the clock path is an exact hopping chain (M=3)") {
  std::mt19937_64 rng(71);
  for (auto tape : {std::vector<CommandKind>{CommandKind::G},
                    std::vector<CommandKind>{CommandKind::Skip}}) {
    const Configuration init = initial_configuration(tape, {1});
    const ClockPath path = reachable_clock_path(init);
    check_path_is_hopping(path, random_state(2, rng), build_ht(3));
  }
}

TEST_CASE("restricted dynamics with real gates is an exact hopping chain (M=4)") {
  // valid launches need an odd ring, so gate-carrying transitions at the
  // M = 4 full-space cap are exercised from hand-built mid-cycle states
  std::mt19937_64 rng(73);
  const SparseOperator h = build_ht(4);

  // active head inside the data block: applies G on the data bond, then
  // parks (an even ring truncates the cycle, which is fine for this check)
  const ClockPath walk = reachable_clock_path(from_text("P:G MARK D:?+h10 D:?"));
  CHECK(walk.n_data == 2);
  bool saw_gate = false;
  for (const GateAction& a : walk.edge_actions) saw_gate |= a.kind >= 0;
  CHECK(saw_gate);
  check_path_is_hopping(walk, random_state(4, rng), h);

  // active head on the marker: exercises the hand-off transition
  const ClockPath emit = reachable_clock_path(from_text("MARK+h10 P:S D:? D:?"));
  check_path_is_hopping(emit, random_state(4, rng), h);

  // marker pickup plus a skip absorption on the even ring
  const ClockPath skip = reachable_clock_path(from_text("MARK+h00 P:skip D:? D:?"));
  check_path_is_hopping(skip, random_state(4, rng), h);
}

TEST_CASE("terminal configuration: marker at the end of the bus") {
  const ClockPath path = reachable_clock_path(initial_configuration({CommandKind::G}, {0}));
  const Configuration& last = path.nodes.back();
  CHECK(last[1].kind == Site::Kind::Marker);  // bus slots are 0 (launch) and 1
  CHECK(last[1].has_head());
  CHECK(last[1].head_active() == 0);
}

TEST_CASE("consecutive skips traverse via the sliding m level") {
  const std::vector<CommandKind> tape = {CommandKind::Skip, CommandKind::Skip};
  const Configuration init = initial_configuration(tape, {1, 0});  // M = 5
  const ClockPath path = reachable_clock_path(init);
  CHECK(path.initial_index == 0);
  // terminal: the m parked at the end of the bus
  const Configuration& last = path.nodes.back();
  CHECK(last[2].kind == Site::Kind::MLevel);
  // and the computation is a no-op on the data
  const ComputationResult res = run_computation(tape, {1, 0});
  ComplexVector want = ComplexVector::Zero(4);
  want[2] = 1.0;  // |10>
  CHECK(fidelity_error(res.data_state, want) < 1e-12);
}

TEST_CASE("emergent alignment matches the oracle-command formula") {
  // tape [G] with 3 data qubits: single command, marker lands on slot 2 of a
  // 5-ring with a 2-slot bus -> gates on the even data pair (2,3)
  const std::vector<CommandKind> tape = {CommandKind::G};
  const ClockPath path = reachable_clock_path(initial_configuration(tape, {0, 0, 0}));
  int gate_edges = 0;
  for (const GateAction& act : path.edge_actions) {
    if (act.kind < 0) continue;
    ++gate_edges;
    CHECK(act.kind == 0);       // G
    CHECK(act.ring_bond == 4);  // ring sites (4,5) = data pair (2,3)
  }
  CHECK(gate_edges == 1);
  const auto cmds = oracle_commands(tape, 3);
  REQUIRE(cmds.size() == 1);
  CHECK(cmds[0].align == Alignment::EvenPairs);
}

TEST_CASE("heralded computation equals the explicit-alignment oracle") {
  std::mt19937_64 rng(79);
  const std::vector<std::vector<CommandKind>> tapes = {
      {CommandKind::S},
      {CommandKind::G},
      {CommandKind::G, CommandKind::Skip},
      {CommandKind::S, CommandKind::G},
      {CommandKind::Skip, CommandKind::S},
      {CommandKind::G, CommandKind::G},
  };
  for (const auto& tape : tapes) {
    // ring size = tape + marker + data must be odd
    const int n_data = (tape.size() % 2 == 0) ? 2 : 3;
    std::vector<int> bits;
    for (int i = 0; i < n_data; ++i) bits.push_back((i + 1) % 2);

    const ComputationResult res = run_computation(tape, bits);
    globalprog::ProgramTape oracle{oracle_commands(tape, n_data), n_data};
    ComplexVector psi0 = ComplexVector::Zero(Index(1) << n_data);
    Index b = 0;
    for (int bit : bits) b = (b << 1) | Index(bit);
    psi0[b] = 1.0;
    const ComplexVector want = globalprog::execute_tape(oracle, psi0);
    CHECK(fidelity_error(res.data_state, want) < 1e-9);
    CHECK(res.herald_rounds >= 1);
  }
}

TEST_CASE("all-skip tapes leave the data unchanged") {
  const ComputationResult res =
      run_computation({CommandKind::Skip, CommandKind::Skip, CommandKind::Skip}, {1});
  ComplexVector want = ComplexVector::Zero(2);
  want[1] = 1.0;
  CHECK(fidelity_error(res.data_state, want) < 1e-12);
}

TEST_CASE("herald cap is reported") {
  CHECK_THROWS_AS(run_computation({CommandKind::G}, {0}, 1e-12, 0.0, 1),
                  std::runtime_error);
}
