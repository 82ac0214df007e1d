#include "gateminer/circuit.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gateminer {

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::Input: return "INPUT";
    case GateKind::Not: return "NOT";
    case GateKind::And: return "AND";
    case GateKind::Or: return "OR";
    case GateKind::Output: return "OUTPUT";
  }
  return "?";
}

std::string to_string(SizeMetric metric) { return metric == SizeMetric::Terms ? "terms" : "gates"; }

SizeMetric size_metric_from_string(const std::string& text) {
  if (text == "terms") return SizeMetric::Terms;
  if (text == "gates") return SizeMetric::Gates;
  throw std::invalid_argument("unknown size metric \"" + text + "\"");
}

std::size_t Netlist::count(GateKind kind) const {
  return static_cast<std::size_t>(std::count_if(gates.begin(), gates.end(), [&](const Gate& g) { return g.kind == kind; }));
}

std::size_t Netlist::gate_count() const { return count(GateKind::Not) + count(GateKind::And) + count(GateKind::Or); }

Netlist netlist_from_sop(const SopExpression& sop, bool not_sharing) {
  if (sop.is_constant()) throw CircuitError("constant expression " + format_sop(sop) + " has no gates to build");
  const auto canon = canonical(sop);
  Netlist net;
  net.n_inputs = sop.n_inputs;
  auto add = [&](GateKind kind, std::vector<std::size_t> inputs, int var = -1) {
    const std::size_t id = net.gates.size();
    net.gates.push_back(Gate{id, kind, std::move(inputs), var});
    return id;
  };

  std::map<int, std::size_t> input_gate;
  for (int v = 0; v < sop.n_inputs; ++v) {
    for (const auto& t : canon.terms) {
      auto lits = t.literals();
      if (std::any_of(lits.begin(), lits.end(), [&](const Literal& l) { return l.var == v; })) {
        input_gate[v] = add(GateKind::Input, {}, v);
        break;
      }
    }
  }

  std::map<int, std::size_t> shared_not;
  auto literal_gate = [&](const Literal& lit) {
    if (!lit.negated) return input_gate.at(lit.var);
    if (not_sharing) {
      auto it = shared_not.find(lit.var);
      if (it != shared_not.end()) return it->second;
      return shared_not[lit.var] = add(GateKind::Not, {input_gate.at(lit.var)});
    }
    return add(GateKind::Not, {input_gate.at(lit.var)});
  };

  std::vector<std::size_t> term_outputs;
  for (const auto& t : canon.terms) {
    std::vector<std::size_t> ins;
    for (const auto& lit : t.literals()) ins.push_back(literal_gate(lit));
    term_outputs.push_back(ins.size() == 1 ? ins.front() : add(GateKind::And, ins));
  }
  const std::size_t root = term_outputs.size() == 1 ? term_outputs.front() : add(GateKind::Or, term_outputs);
  net.output = add(GateKind::Output, {root});
  return net;
}

void validate(const Netlist& net) {
  std::size_t outputs = 0;
  for (std::size_t i = 0; i < net.gates.size(); ++i) {
    const auto& g = net.gates[i];
    if (g.id != i) throw CircuitError("gate ids must equal their position");
    for (auto in : g.inputs) {
      if (in >= i) throw CircuitError("gate " + std::to_string(i) + " reads a later gate (not topological)");
      if (net.gates[in].kind == GateKind::Output) throw CircuitError("OUTPUT cannot drive other gates");
    }
    switch (g.kind) {
      case GateKind::Input:
        if (!g.inputs.empty() || g.var < 0 || g.var >= net.n_inputs) throw CircuitError("malformed INPUT");
        break;
      case GateKind::Not:
        if (g.inputs.size() != 1) throw CircuitError("NOT needs fan-in 1");
        break;
      case GateKind::And:
      case GateKind::Or:
        if (g.inputs.size() < 2) throw CircuitError(to_string(g.kind) + " needs fan-in >= 2");
        break;
      case GateKind::Output:
        if (g.inputs.size() != 1) throw CircuitError("OUTPUT needs fan-in 1");
        ++outputs;
        break;
    }
  }
  if (outputs != 1) throw CircuitError("netlist needs exactly one OUTPUT");
  if (net.output >= net.gates.size() || net.gates[net.output].kind != GateKind::Output) {
    throw CircuitError("output id does not name the OUTPUT gate");
  }
}

bool evaluate(const Netlist& net, std::uint32_t ordinal) {
  std::vector<bool> value(net.gates.size());
  for (const auto& g : net.gates) {
    switch (g.kind) {
      case GateKind::Input: value[g.id] = (ordinal >> (net.n_inputs - 1 - g.var)) & 1U; break;
      case GateKind::Not: value[g.id] = !value[g.inputs[0]]; break;
      case GateKind::And:
        value[g.id] = std::all_of(g.inputs.begin(), g.inputs.end(), [&](std::size_t i) { return value[i]; });
        break;
      case GateKind::Or:
        value[g.id] = std::any_of(g.inputs.begin(), g.inputs.end(), [&](std::size_t i) { return value[i]; });
        break;
      case GateKind::Output: value[g.id] = value[g.inputs[0]]; break;
    }
  }
  return value[net.output];
}

std::size_t circuit_size(const SopExpression& sop, SizeMetric metric) {
  if (sop.is_constant()) return 0;
  if (metric == SizeMetric::Terms) return sop.terms.size();
  return netlist_from_sop(sop, true).gate_count();
}

StateGraph build_state_graph(const std::vector<std::pair<InputState, std::string>>& per_state_outputs,
                             StateNodeMode mode) {
  StateGraph g;
  if (per_state_outputs.empty()) return g;
  const std::size_t width = per_state_outputs.front().second.size();
  std::map<std::string, std::size_t> index;
  std::vector<std::size_t> node_of;
  for (const auto& [state, out] : per_state_outputs) {
    if (out.size() != width) {
      throw CircuitError("output string \"" + out + "\" width differs from " + std::to_string(width));
    }
    const std::string label = mode == StateNodeMode::MergedOutputs ? out : state.bits() + "/" + out;
    auto [it, inserted] = index.emplace(label, g.nodes.size());
    if (inserted) g.nodes.push_back(label);
    node_of.push_back(it->second);
  }
  for (std::size_t i = 0; i + 1 < per_state_outputs.size(); ++i) {
    g.edges.push_back(StateEdge{node_of[i], node_of[i + 1], per_state_outputs[i].first, per_state_outputs[i + 1].first});
  }
  return g;
}

namespace {

std::string dot_shape(GateKind kind) {
  switch (kind) {
    case GateKind::Input: return "plaintext";
    case GateKind::Not: return "invtriangle";
    case GateKind::And:
    case GateKind::Or: return "box";
    case GateKind::Output: return "doublecircle";
  }
  return "box";
}

}  // namespace

std::string to_dot(const Netlist& net) {
  std::ostringstream out;
  out << "digraph netlist {\n  rankdir=LR;\n";
  for (const auto& g : net.gates) {
    std::string label = g.kind == GateKind::Input ? variable_name(g.var) : to_string(g.kind);
    out << "  g" << g.id << " [label=\"" << label << "\", shape=" << dot_shape(g.kind) << "];\n";
  }
  for (const auto& g : net.gates) {
    for (auto in : g.inputs) out << "  g" << in << " -> g" << g.id << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string to_dot(const StateGraph& graph) {
  std::ostringstream out;
  out << "digraph states {\n";
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    out << "  s" << i << " [label=\"" << graph.nodes[i] << "\"];\n";
  }
  for (const auto& e : graph.edges) {
    out << "  s" << e.from << " -> s" << e.to << " [label=\"" << e.from_state.bits() << "->" << e.to_state.bits()
        << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

std::string netlist_to_json(const Netlist& net) {
  nlohmann::ordered_json j;
  auto gates = nlohmann::ordered_json::array();
  for (const auto& g : net.gates) {
    nlohmann::ordered_json gj;
    gj["id"] = g.id;
    gj["kind"] = to_string(g.kind);
    gj["inputs"] = g.inputs;
    if (g.kind == GateKind::Input) gj["var"] = variable_name(g.var);
    gates.push_back(std::move(gj));
  }
  j["gates"] = std::move(gates);
  j["output"] = net.output;
  return j.dump(2) + "\n";
}

}  // namespace gateminer
