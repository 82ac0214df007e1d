#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gateminer/logic.hpp"
#include "gateminer/recording.hpp"

namespace gateminer {

enum class GateKind { Input, Not, And, Or, Output };

std::string to_string(GateKind kind);

struct Gate {
  std::size_t id = 0;
  GateKind kind = GateKind::Input;
  std::vector<std::size_t> inputs;
  /// Input variable for INPUT gates.
  int var = -1;
};

/// Two-level gate netlist. Gates are stored in topological order and a
/// gate's id is its position.
struct Netlist {
  int n_inputs = 0;
  std::vector<Gate> gates;
  std::size_t output = 0;

  /// NOT + AND + OR gates; INPUT and OUTPUT terminals are not counted.
  std::size_t gate_count() const;
  std::size_t count(GateKind kind) const;
};

class CircuitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws CircuitError for constant expressions.
Netlist netlist_from_sop(const SopExpression& sop, bool not_sharing = true);
bool evaluate(const Netlist& net, std::uint32_t ordinal);
/// Throws CircuitError when an invariant (acyclic, fan-in, single output) fails.
void validate(const Netlist& net);

enum class SizeMetric { Terms, Gates };

std::string to_string(SizeMetric metric);
SizeMetric size_metric_from_string(const std::string& text);

std::size_t circuit_size(const SopExpression& sop, SizeMetric metric = SizeMetric::Terms);

struct StateEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  InputState from_state;
  InputState to_state;
};

enum class StateNodeMode {
  /// One node per distinct output string.
  MergedOutputs,
  /// One node per (input state, output string) pair.
  PerState,
};

struct StateGraph {
  /// Node labels in order of first appearance.
  std::vector<std::string> nodes;
  std::vector<StateEdge> edges;
};

StateGraph build_state_graph(const std::vector<std::pair<InputState, std::string>>& per_state_outputs,
                             StateNodeMode mode = StateNodeMode::MergedOutputs);

std::string to_dot(const Netlist& net);
std::string to_dot(const StateGraph& graph);
/// `{gates:[{id, kind, inputs:[ids]}], output: id}`
std::string netlist_to_json(const Netlist& net);

}  // namespace gateminer
