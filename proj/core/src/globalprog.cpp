#include "symham/globalprog.hpp"

#include <json.hpp>

namespace symham {
namespace globalprog {

using nlohmann::json;

ComplexMatrix g_gate() {
  ComplexMatrix g = ComplexMatrix::Identity(4, 4);
  const double s = 1.0 / std::sqrt(2.0);
  g(2, 2) = s;
  g(2, 3) = -s;
  g(3, 2) = s;
  g(3, 3) = s;
  return g;
}

ComplexVector apply_global(const GlobalCommand& cmd, const ComplexVector& state, int n_q) {
  if (state.size() != (Index(1) << n_q))
    throw std::invalid_argument("apply_global: state dimension != 2^n_q");
  if (cmd.kind == CommandKind::Skip) return state;
  const ComplexMatrix u = (cmd.kind == CommandKind::G) ? g_gate() : swap_gate();
  ComplexVector out = state;
  const int first = (cmd.align == Alignment::OddPairs) ? 1 : 2;
  for (int a = first; a + 1 <= n_q; a += 2) out = apply_2q(u, out, n_q, a, a + 1);
  return out;
}

ComplexVector execute_tape(const ProgramTape& tape, const ComplexVector& psi0) {
  ComplexVector psi = psi0;
  for (const GlobalCommand& c : tape.commands) psi = apply_global(c, psi, tape.n_q);
  return psi;
}

std::string kind_name(CommandKind k) {
  switch (k) {
    case CommandKind::G: return "G";
    case CommandKind::S: return "S";
    case CommandKind::Skip: return "skip";
  }
  throw std::logic_error("kind_name: bad enum");
}

ProgramTape tape_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  ProgramTape tape;
  tape.n_q = j.at("n_q").get<int>();
  if (tape.n_q < 2) throw std::invalid_argument("tape_from_json: n_q must be >= 2");
  if (!j.at("commands").is_array() || j.at("commands").empty())
    throw std::invalid_argument("tape_from_json: commands must be a nonempty array");
  for (const auto& jc : j.at("commands")) {
    GlobalCommand c;
    const std::string kind = jc.at("kind").get<std::string>();
    if (kind == "G") c.kind = CommandKind::G;
    else if (kind == "S") c.kind = CommandKind::S;
    else if (kind == "skip") c.kind = CommandKind::Skip;
    else throw std::invalid_argument("tape_from_json: kind must be G|S|skip");
    const std::string align = jc.value("align", "odd");
    if (align == "odd") c.align = Alignment::OddPairs;
    else if (align == "even") c.align = Alignment::EvenPairs;
    else throw std::invalid_argument("tape_from_json: align must be odd|even");
    tape.commands.push_back(c);
  }
  return tape;
}

std::string tape_to_json(const ProgramTape& tape) {
  json j;
  j["n_q"] = tape.n_q;
  j["commands"] = json::array();
  for (const GlobalCommand& c : tape.commands) {
    j["commands"].push_back(
        {{"kind", kind_name(c.kind)},
         {"align", c.align == Alignment::OddPairs ? "odd" : "even"}});
  }
  return j.dump();
}

}  // namespace globalprog
}  // namespace symham
