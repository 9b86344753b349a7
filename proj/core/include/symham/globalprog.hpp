#pragma once

#include <string>

#include "symham/gates.hpp"

namespace symham {
namespace globalprog {

enum class CommandKind { G, S, Skip };
enum class Alignment { OddPairs, EvenPairs };  // (2i-1,2i) vs (2i,2i+1), 1-based

struct GlobalCommand {
  CommandKind kind = CommandKind::Skip;
  Alignment align = Alignment::OddPairs;
};

struct ProgramTape {
  std::vector<GlobalCommand> commands;
  int n_q = 2;
};

// 1 (+) (Z - iY)/sqrt(2): identity on |00>,|01>, the rotation block
// [[1,-1],[1,1]]/sqrt(2) on |10>,|11>.
ComplexMatrix g_gate();

// Applies the command's two-qubit gate to every disjoint pair of the chosen
// alignment across an n_q-qubit register; skip is the identity.  A final
// unpaired qubit is untouched.
ComplexVector apply_global(const GlobalCommand& cmd, const ComplexVector& state, int n_q);

// Left-to-right application; the oracle Hamiltonian evolution is judged against.
ComplexVector execute_tape(const ProgramTape& tape, const ComplexVector& psi0);

// JSON wire format:
//   {"n_q": int, "commands": [{"kind":"G|S|skip","align":"odd|even"}, ...]}
ProgramTape tape_from_json(const std::string& json_text);
std::string tape_to_json(const ProgramTape& tape);

std::string kind_name(CommandKind k);

}  // namespace globalprog
}  // namespace symham
