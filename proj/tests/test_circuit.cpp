#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "gateminer/circuit.hpp"
#include "oracles.hpp"

using namespace gateminer;

namespace {

SopExpression sop2(const std::string& bits) { return minimize(table_from_bits(2, bits)); }

std::vector<std::pair<InputState, std::string>> outputs(int n, const std::vector<std::string>& outs) {
  std::vector<std::pair<InputState, std::string>> v;
  const auto schedule = state_schedule(n);
  for (std::size_t i = 0; i < outs.size(); ++i) v.emplace_back(schedule[i], outs[i]);
  return v;
}

const char* kFourInputForms[] = {
    R"($(A \cdot \overline{B}) + (B \cdot \overline{A} \cdot \overline{C}) + (B \cdot \overline{C} \cdot \overline{D})$)",
    R"($(C \cdot D \cdot \overline{B}) + (A \cdot \overline{B} \cdot \overline{D}) + (B \cdot \overline{A} \cdot \overline{D}) + (D \cdot \overline{A} \cdot \overline{C})$)",
    R"($(A \cdot \overline{B} \cdot \overline{D}) + (B \cdot \overline{A} \cdot \overline{C} \cdot \overline{D})$)",
    R"($(\overline{A} \cdot \overline{D}) + (A \cdot B \cdot C \cdot D) + (B \cdot \overline{A} \cdot \overline{C}) + (C \cdot \overline{A} \cdot \overline{B})$)",
    R"($(A \cdot \overline{B} \cdot \overline{D}) + (B \cdot \overline{A} \cdot \overline{C}) + (B \cdot \overline{C} \cdot \overline{D})$)",
    R"($A \cdot D \cdot \overline{B} \cdot \overline{C}$)",
    R"($A \cdot \overline{B} \cdot \overline{C} \cdot \overline{D}$)",
    R"($(B \cdot C \cdot D) + (B \cdot C \cdot \overline{A}) + (C \cdot D \cdot \overline{A}) + (A \cdot \overline{B} \cdot \overline{C} \cdot \overline{D})$)",
    R"($(A \cdot D \cdot \overline{B}) + (B \cdot D \cdot \overline{A}) + (A \cdot \overline{B} \cdot \overline{C}) + (B \cdot \overline{A} \cdot \overline{C}) + (D \cdot \overline{A} \cdot \overline{C})$)",
    R"($(D \cdot \overline{A}) + (D \cdot \overline{B}) + (B \cdot \overline{A} \cdot \overline{C})$)",
};

void expect_equivalent(const SopExpression& sop, const Netlist& net) {
  const std::uint32_t states = 1U << sop.n_inputs;
  for (std::uint32_t x = 0; x < states; ++x) {
    ASSERT_EQ(evaluate(net, x), evaluate(sop, x)) << format_sop(sop) << " at " << x;
  }
}

}  // namespace

TEST(Netlist, GateCountsFromConstructionRule) {
  auto nand = netlist_from_sop(sop2("1110"));
  EXPECT_EQ(nand.count(GateKind::Not), 2u);
  EXPECT_EQ(nand.count(GateKind::Or), 1u);
  EXPECT_EQ(nand.gate_count(), 3u);

  auto and_gate = netlist_from_sop(sop2("0001"));
  EXPECT_EQ(and_gate.gate_count(), 1u);
  EXPECT_EQ(and_gate.count(GateKind::And), 1u);

  auto xor_gate = netlist_from_sop(sop2("0110"));
  EXPECT_EQ(xor_gate.count(GateKind::Not), 2u);
  EXPECT_EQ(xor_gate.count(GateKind::And), 2u);
  EXPECT_EQ(xor_gate.count(GateKind::Or), 1u);
  EXPECT_EQ(xor_gate.gate_count(), 5u);
}

TEST(Netlist, SharingOffDuplicatesNots) {
  auto sop = parse_sop(3, "(A·B') + (C·B')");
  EXPECT_EQ(netlist_from_sop(sop, true).count(GateKind::Not), 1u);
  auto unshared = netlist_from_sop(sop, false);
  EXPECT_EQ(unshared.count(GateKind::Not), 2u);
  expect_equivalent(sop, unshared);
}

TEST(Netlist, ConstantsRejected) {
  EXPECT_THROW(netlist_from_sop(sop2("0000")), CircuitError);
  EXPECT_THROW(netlist_from_sop(sop2("1111")), CircuitError);
}

TEST(Netlist, SingleLiteralWiresInputToOutput) {
  auto net = netlist_from_sop(parse_sop(2, "B"));
  EXPECT_EQ(net.gate_count(), 0u);
  expect_equivalent(parse_sop(2, "B"), net);
  auto neg = netlist_from_sop(parse_sop(2, "A'"));
  EXPECT_EQ(neg.gate_count(), 1u);
}

TEST(Netlist, StructuralInvariants) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 4;
    std::string bits;
    for (int i = 0; i < (1 << n); ++i) bits.push_back(rng() % 2 ? '1' : '0');
    auto sop = minimize(table_from_bits(n, bits));
    if (sop.is_zero() || sop.is_one()) continue;
    for (bool share : {true, false}) {
      auto net = netlist_from_sop(sop, share);
      EXPECT_NO_THROW(validate(net));
      EXPECT_EQ(net.count(GateKind::Output), 1u);
      for (const auto& g : net.gates) {
        for (auto in : g.inputs) EXPECT_LT(in, g.id);
        if (g.kind == GateKind::And) EXPECT_GE(g.inputs.size(), 2u);
        if (g.kind == GateKind::Not) EXPECT_EQ(g.inputs.size(), 1u);
      }
    }
  }
}

TEST(Netlist, EquivalentToSopExhaustivelyUpToFourInputs) {
  for (int n = 1; n <= 3; ++n) {
    for (std::uint32_t f = 1; f + 1 < (1U << (1U << n)); ++f) {
      std::string bits;
      for (int x = 0; x < (1 << n); ++x) bits.push_back((f >> x) & 1U ? '1' : '0');
      auto sop = minimize(table_from_bits(n, bits));
      expect_equivalent(sop, netlist_from_sop(sop));
      expect_equivalent(sop, netlist_from_sop(sop, false));
    }
  }
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 300; ++trial) {
    std::string bits;
    for (int x = 0; x < 16; ++x) bits.push_back(rng() % 2 ? '1' : '0');
    auto sop = minimize(table_from_bits(4, bits));
    if (sop.is_zero() || sop.is_one()) continue;
    expect_equivalent(sop, netlist_from_sop(sop));
  }
}

TEST(Netlist, EightInputSampledEquivalence) {
  const std::string text =
      "(A·B·F·C'·E') + (A·D·F·C'·E') + (A·G·H·B'·C') + (B·D·E·A'·F') + (B·E·H·A'·C') + (C·D·E·B'·F') + "
      "(B·C·D·F·G·H') + (A·C·D·E·F·H·G') + (G·A'·C'·D'·E'·H')";
  auto sop = parse_sop(8, text);
  auto net = netlist_from_sop(sop);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 10000; ++i) {
    const auto x = static_cast<std::uint32_t>(rng() % 256);
    ASSERT_EQ(evaluate(net, x), evaluate(sop, x));
  }
  for (std::uint32_t x = 0; x < 256; ++x) ASSERT_EQ(evaluate(net, x), evaluate(sop, x));
}

TEST(CircuitSize, TermsAndGatesMetrics) {
  auto single = parse_sop(4, kFourInputForms[5]);
  EXPECT_EQ(circuit_size(single, SizeMetric::Terms), 1u);
  auto five = parse_sop(4, kFourInputForms[8]);
  EXPECT_EQ(circuit_size(five, SizeMetric::Terms), 5u);
  EXPECT_EQ(circuit_size(sop2("0000")), 0u);
  EXPECT_EQ(circuit_size(sop2("1111"), SizeMetric::Gates), 0u);
  EXPECT_EQ(circuit_size(sop2("0110"), SizeMetric::Gates), 5u);
  EXPECT_EQ(size_metric_from_string("gates"), SizeMetric::Gates);
  EXPECT_EQ(to_string(SizeMetric::Terms), "terms");
}

TEST(CircuitSize, FourInputTableSmallestAndLargest) {
  std::vector<std::size_t> sizes;
  for (const char* row : kFourInputForms) {
    auto sop = parse_sop(4, row);
    // The listed forms are already minimal covers.
    auto reminimized = minimize(to_table(sop));
    EXPECT_EQ(reminimized.terms.size(), sop.terms.size()) << row;
    EXPECT_EQ(function_id(to_table(reminimized)), function_id(to_table(sop)));
    sizes.push_back(circuit_size(sop));
  }
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  EXPECT_EQ(*lo, 1u);
  EXPECT_EQ(*hi, 5u);
  EXPECT_EQ(sizes[5], *lo);
  EXPECT_EQ(sizes[6], *lo);
  EXPECT_EQ(sizes[8], *hi);
  EXPECT_EQ(std::count(sizes.begin(), sizes.end(), *lo), 2);
  EXPECT_EQ(std::count(sizes.begin(), sizes.end(), *hi), 1);
}

TEST(NetlistDot, AndGateHasFourNodes) {
  auto dot = to_dot(netlist_from_sop(sop2("0001")));
  auto parsed = oracle::parse_dot(dot);
  ASSERT_TRUE(parsed.ok) << parsed.error << "\n" << dot;
  EXPECT_EQ(parsed.nodes, 4);
  EXPECT_EQ(parsed.edges, 3);
  EXPECT_NE(dot.find("plaintext"), std::string::npos);
  EXPECT_NE(dot.find("doublecircle"), std::string::npos);
}

TEST(NetlistDot, NandParsesAndIsDeterministic) {
  auto net = netlist_from_sop(sop2("1110"));
  auto dot = to_dot(net);
  auto parsed = oracle::parse_dot(dot);
  ASSERT_TRUE(parsed.ok) << parsed.error << "\n" << dot;
  EXPECT_EQ(parsed.nodes, 6);
  EXPECT_NE(dot.find("invtriangle"), std::string::npos);
  EXPECT_EQ(dot, to_dot(netlist_from_sop(sop2("1110"))));
}

TEST(NetlistJson, Shape) {
  auto net = netlist_from_sop(sop2("0110"));
  auto j = nlohmann::json::parse(netlist_to_json(net));
  ASSERT_TRUE(j.contains("gates"));
  EXPECT_EQ(j["gates"].size(), net.gates.size());
  EXPECT_EQ(j["output"], net.output);
  for (std::size_t i = 0; i < net.gates.size(); ++i) {
    EXPECT_EQ(j["gates"][i]["id"], i);
    EXPECT_EQ(j["gates"][i]["kind"], to_string(net.gates[i].kind));
    EXPECT_EQ(j["gates"][i]["inputs"].size(), net.gates[i].inputs.size());
  }
}

TEST(StateGraph, TwoInputExample) {
  auto g = build_state_graph(outputs(2, {"10", "11", "11", "01"}));
  EXPECT_EQ(g.nodes, (std::vector<std::string>{"10", "11", "01"}));
  ASSERT_EQ(g.edges.size(), 3u);
  EXPECT_EQ(g.edges[0].from, 0u);
  EXPECT_EQ(g.edges[0].to, 1u);
  EXPECT_EQ(g.edges[1].from, 1u);
  EXPECT_EQ(g.edges[1].to, 1u);
  EXPECT_EQ(g.edges[2].to, 2u);
  EXPECT_EQ(g.edges[2].from_state.bits(), "10");
  EXPECT_EQ(g.edges[2].to_state.bits(), "11");
}

TEST(StateGraph, IdenticalOutputsSelfLoop) {
  auto g = build_state_graph(outputs(2, {"00", "00", "00", "00"}));
  ASSERT_EQ(g.nodes.size(), 1u);
  ASSERT_EQ(g.edges.size(), 3u);
  for (const auto& e : g.edges) {
    EXPECT_EQ(e.from, 0u);
    EXPECT_EQ(e.to, 0u);
  }
  auto parsed = oracle::parse_dot(to_dot(g));
  ASSERT_TRUE(parsed.ok) << parsed.error;
  EXPECT_EQ(parsed.nodes, 1);
  EXPECT_EQ(parsed.edges, 3);
}

TEST(StateGraph, FourInputHasFifteenEdges) {
  std::vector<std::string> outs;
  for (int i = 0; i < 16; ++i) outs.push_back(i % 3 ? "01" : "10");
  auto g = build_state_graph(outputs(4, outs));
  EXPECT_EQ(g.edges.size(), 15u);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    EXPECT_EQ(g.edges[i].from_state.ordinal, i);
    EXPECT_EQ(g.edges[i].to_state.ordinal, i + 1);
  }
}

TEST(StateGraph, NodeCountBoundAndPerStateMode) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 4;
    const int channels = 1 + trial % 3;
    std::vector<std::string> outs;
    for (int i = 0; i < (1 << n); ++i) {
      std::string o;
      for (int c = 0; c < channels; ++c) o.push_back(rng() % 2 ? '1' : '0');
      outs.push_back(o);
    }
    auto g = build_state_graph(outputs(n, outs));
    EXPECT_LE(g.nodes.size(), std::min<std::size_t>(1U << n, 1U << channels));
    std::set<std::string> distinct(outs.begin(), outs.end());
    EXPECT_EQ(g.nodes.size(), distinct.size());
    auto per = build_state_graph(outputs(n, outs), StateNodeMode::PerState);
    EXPECT_EQ(per.nodes.size(), outs.size());
    EXPECT_EQ(per.edges.size(), outs.size() - 1);
  }
}

TEST(StateGraph, WidthMismatchRejected) {
  EXPECT_THROW(build_state_graph(outputs(2, {"00", "0", "00", "00"})), CircuitError);
}
