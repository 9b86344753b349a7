#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "symham/globalprog.hpp"

using namespace symham;
using namespace symham::globalprog;

namespace {

Index ket(const std::string& bits) {
  Index v = 0;
  for (char c : bits) v = (v << 1) | (c == '1');
  return v;
}

// dense full-register matrix of one global command, for the oracle
ComplexMatrix command_matrix(const GlobalCommand& c, int n_q) {
  const Index dim = Index(1) << n_q;
  ComplexMatrix m(dim, dim);
  for (Index col = 0; col < dim; ++col) {
    ComplexVector e = ComplexVector::Zero(dim);
    e[col] = 1.0;
    m.col(col) = apply_global(c, e, n_q);
  }
  return m;
}

}  // namespace

TEST_CASE("g_gate structure") {
  const ComplexMatrix g = g_gate();
  CHECK(is_unitary(g, 1e-15));
  CHECK(g(0, 0) == Complex(1.0, 0.0));
  CHECK(g(1, 1) == Complex(1.0, 0.0));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(g(2, 2) - s) < 1e-15);
  CHECK(std::abs(g(2, 3) + s) < 1e-15);
  CHECK(std::abs(g(3, 2) - s) < 1e-15);
  CHECK(std::abs(g(3, 3) - s) < 1e-15);
}

TEST_CASE("apply_global: skip, swaps, rotation block") {
  std::mt19937_64 rng(3);
  const ComplexVector psi = random_state(16, rng);
  CHECK((apply_global({CommandKind::Skip, Alignment::OddPairs}, psi, 4) - psi).norm() == 0.0);

  ComplexVector e = basis_state(16, ket("0110"));
  const ComplexVector swapped = apply_global({CommandKind::S, Alignment::OddPairs}, e, 4);
  CHECK(std::abs(swapped[ket("1001")] - 1.0) < 1e-15);

  ComplexVector q10 = basis_state(4, ket("10"));
  const ComplexVector g10 = apply_global({CommandKind::G, Alignment::OddPairs}, q10, 2);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(g10[ket("10")] - s) < 1e-15);
  CHECK(std::abs(g10[ket("11")] - s) < 1e-15);
}

TEST_CASE("apply_global preserves norm and leaves an unpaired final qubit alone") {
  std::mt19937_64 rng(5);
  for (int n_q : {3, 5}) {
    const ComplexVector psi = random_state(Index(1) << n_q, rng);
    for (CommandKind k : {CommandKind::G, CommandKind::S})
      for (Alignment a : {Alignment::OddPairs, Alignment::EvenPairs}) {
        const ComplexVector out = apply_global({k, a}, psi, n_q);
        CHECK(std::abs(out.norm() - 1.0) < 1e-13);
      }
  }
  // n_q = 3, odd pairs: qubit 3 untouched -> applying S twice is identity
  const ComplexVector psi = random_state(8, rng);
  ComplexVector out = apply_global({CommandKind::S, Alignment::OddPairs}, psi, 3);
  out = apply_global({CommandKind::S, Alignment::OddPairs}, out, 3);
  CHECK((out - psi).norm() < 1e-14);
}

TEST_CASE("execute_tape: involutions and the matrix-product oracle") {
  std::mt19937_64 rng(9);
  const ComplexVector psi = random_state(16, rng);

  ProgramTape skip_tape{{{CommandKind::Skip, Alignment::OddPairs},
                         {CommandKind::Skip, Alignment::EvenPairs}},
                        4};
  CHECK((execute_tape(skip_tape, psi) - psi).norm() == 0.0);

  ProgramTape ss{{{CommandKind::S, Alignment::OddPairs}, {CommandKind::S, Alignment::OddPairs}}, 4};
  CHECK((execute_tape(ss, psi) - psi).norm() < 1e-14);

  ProgramTape tape{{{CommandKind::G, Alignment::OddPairs},
                    {CommandKind::S, Alignment::EvenPairs},
                    {CommandKind::G, Alignment::OddPairs}},
                   4};
  const ComplexMatrix oracle = command_matrix(tape.commands[2], 4) *
                               command_matrix(tape.commands[1], 4) *
                               command_matrix(tape.commands[0], 4);
  CHECK((execute_tape(tape, psi) - oracle * psi).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tape JSON round trip and validation") {
  const std::string text =
      R"({"n_q":4,"commands":[{"kind":"G","align":"odd"},{"kind":"skip"},{"kind":"S","align":"even"}]})";
  const ProgramTape tape = tape_from_json(text);
  REQUIRE(tape.commands.size() == 3);
  CHECK(tape.commands[0].kind == CommandKind::G);
  CHECK(tape.commands[1].kind == CommandKind::Skip);
  CHECK(tape.commands[2].align == Alignment::EvenPairs);

  const ProgramTape back = tape_from_json(tape_to_json(tape));
  CHECK(back.n_q == tape.n_q);
  REQUIRE(back.commands.size() == tape.commands.size());
  for (size_t i = 0; i < back.commands.size(); ++i) {
    CHECK(back.commands[i].kind == tape.commands[i].kind);
    CHECK(back.commands[i].align == tape.commands[i].align);
  }

  CHECK_THROWS(tape_from_json(R"({"n_q":4,"commands":[]})"));
  CHECK_THROWS(tape_from_json(R"({"n_q":4,"commands":[{"kind":"Q"}]})"));
  CHECK_THROWS(tape_from_json(R"({"n_q":1,"commands":[{"kind":"G"}]})"));
}
