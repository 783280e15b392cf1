#include <gtest/gtest.h>

#include <random>

#include "fptc/errors.hpp"
#include "fptc/fault_tree.hpp"
#include "support/fixtures.hpp"

using namespace fptc;
using namespace fptc::ft;

namespace {

// Two-input transformation, both inputs injected externally.
struct TwoInputTransformation {
  SystemModel m = load_model(R"({"components": [
    {"name": "U", "ports": [
      {"name": "p_in1", "direction": "input"}, {"name": "p_in2", "direction": "input"},
      {"name": "p_out", "direction": "output"}],
     "rules": ["p_in1.early, p_in2.valueSubtle -> p_out.late;"]}]})");
  FlaResult fla = propagate(m, bind_model_rules(m),
                            {{{"U", "p_in1"}, {FailureType::kEarly}},
                             {{"U", "p_in2"}, {FailureType::kValueSubtle}}});
};

SystemModel chain_model() {
  return load_model(R"({"components": [
    {"name": "A", "ports": [{"name": "a_in", "direction": "input"}, {"name": "a_out", "direction": "output"}],
     "rules": ["a_in.noFailure -> a_out.late;"]},
    {"name": "B", "ports": [{"name": "b_in", "direction": "input"}, {"name": "b_out", "direction": "output"}],
     "rules": ["b_in.late -> b_out.late;"]}],
   "connections": [{"from": "A.a_out", "to": "B.b_in"}]})");
}

Label lbl(const std::string& c, const std::string& p, FailureType f = FailureType::kLate) {
  return Label{c, p, f};
}

Event leaf(int id, const std::string& name, std::optional<double> p = std::nullopt) {
  return Event{id, EventKind::kBasic, lbl(name, "out"), p};
}

Event top() { return Event{0, EventKind::kTop, lbl("Top", "out"), std::nullopt}; }

// OR(a, AND(a, b))
FaultTree shared_tree() {
  FaultTree t;
  t.target_port = {"Top", "out"};
  t.target_failure = FailureType::kLate;
  t.events = {top(), leaf(1, "a"),
              Event{2, EventKind::kIntermediate, lbl("M", "out"), std::nullopt}, leaf(3, "a"),
              leaf(4, "b")};
  t.gates = {Gate{GateKind::kOr, 0, {1, 2}}, Gate{GateKind::kAnd, 2, {3, 4}}};
  return t;
}

FaultTree flat_gate(GateKind k, const std::vector<std::string>& names) {
  FaultTree t;
  t.target_port = {"Top", "out"};
  t.target_failure = FailureType::kLate;
  t.events.push_back(top());
  Gate g{k, 0, {}};
  for (const auto& n : names) {
    const int id = static_cast<int>(t.events.size());
    t.events.push_back(leaf(id, n));
    g.inputs.push_back(id);
  }
  t.gates.push_back(g);
  return t;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

CutSet cs(std::initializer_list<std::string> names) {
  CutSet s;
  for (const auto& n : names) s.insert(lbl(n, "out"));
  return s;
}

}  // namespace

TEST(GenerateFaultTrees, TransformationGivesSingleAndGate) {
  TwoInputTransformation fx;
  const auto trees = generate_fault_trees(fx.m, fx.fla, {"U", "p_out"});
  ASSERT_EQ(trees.size(), 1u);
  const auto& t = trees[0];
  check_tree(t);
  ASSERT_EQ(t.gates.size(), 1u);
  EXPECT_EQ(t.gates[0].kind, GateKind::kAnd);
  EXPECT_EQ(t.gates[0].output, t.root);
  std::set<std::string> inputs;
  for (int id : t.gates[0].inputs) {
    EXPECT_EQ(t.event(id).kind, EventKind::kExternal);
    inputs.insert(t.event(id).label.str());
  }
  EXPECT_EQ(inputs, (std::set<std::string>{"U.p_in1.early", "U.p_in2.valueSubtle"}));
}

TEST(GenerateFaultTrees, PropagationOfExternalInjectionIsOrGate) {
  const auto m = load_model(R"({"components": [
    {"name": "U", "ports": [{"name": "p_in", "direction": "input"}, {"name": "p_out", "direction": "output"}],
     "rules": ["p_in.early -> p_out.early;"]}]})");
  const auto fla = propagate(m, bind_model_rules(m), {{{"U", "p_in"}, {FailureType::kEarly}}});
  const auto t = generate_fault_trees(m, fla, {"U", "p_out"}).at(0);
  ASSERT_EQ(t.gates.size(), 1u);
  EXPECT_EQ(t.gates[0].kind, GateKind::kOr);
  ASSERT_EQ(t.gates[0].inputs.size(), 1u);
  EXPECT_EQ(t.event(t.gates[0].inputs[0]).kind, EventKind::kExternal);
}

TEST(GenerateFaultTrees, ChainExpandsThroughConnection) {
  const auto m = chain_model();
  const auto fla = propagate(m, bind_model_rules(m), {});
  const auto t = generate_fault_trees(m, fla, {"B", "b_out"}).at(0);
  check_tree(t);
  // top --OR--> B.b_in.late --OR--> basic A.a_out.late
  ASSERT_EQ(t.gates.size(), 2u);
  const Gate* g0 = t.gate_for(t.root);
  ASSERT_NE(g0, nullptr);
  EXPECT_EQ(g0->kind, GateKind::kOr);
  const Event& mid = t.event(g0->inputs.at(0));
  EXPECT_EQ(mid.kind, EventKind::kIntermediate);
  EXPECT_EQ(mid.label.str(), "B.b_in.late");
  const Gate* g1 = t.gate_for(mid.id);
  ASSERT_NE(g1, nullptr);
  EXPECT_EQ(g1->kind, GateKind::kOr);
  const Event& base = t.event(g1->inputs.at(0));
  EXPECT_EQ(base.kind, EventKind::kBasic);
  EXPECT_EQ(base.label.str(), "A.a_out.late");
}

TEST(GenerateFaultTrees, UnreachableFailureIsAnError) {
  const auto m = chain_model();
  const auto fla = propagate(m, bind_model_rules(m), {});
  EXPECT_THROW(generate_fault_trees(m, fla, {"B", "b_out"}, FailureType::kEarly), AnalysisError);
  EXPECT_TRUE(generate_fault_trees(m, fla, {"A", "a_in"}).empty());
}

TEST(GenerateFaultTrees, CycleBecomesUndevelopedLeaf) {
  const auto m = load_model(R"({"components": [
    {"name": "A", "ports": [{"name": "i", "direction": "input"}, {"name": "o", "direction": "output"}],
     "rules": ["i.late -> o.late;"]},
    {"name": "B", "ports": [{"name": "i", "direction": "input"}, {"name": "o", "direction": "output"}],
     "rules": ["i.late -> o.late;"]}],
   "connections": [{"from": "A.o", "to": "B.i"}, {"from": "B.o", "to": "A.i"}]})");
  const auto fla = propagate(m, bind_model_rules(m), {{{"A", "i"}, {FailureType::kLate}}});
  const auto t = generate_fault_trees(m, fla, {"B", "o"}).at(0);
  check_tree(t);
  bool undeveloped = false;
  for (const auto* l : t.leaves()) undeveloped |= l->kind == EventKind::kUndeveloped;
  EXPECT_TRUE(undeveloped);
  EXPECT_FALSE(t.diagnostics.empty());
}

TEST(GenerateFaultTrees, AlternativeCausesJoinUnderOr) {
  const auto m = load_model(R"({"components": [
    {"name": "U", "ports": [
      {"name": "a", "direction": "input"}, {"name": "b", "direction": "input"},
      {"name": "o", "direction": "output"}],
     "rules": ["a.early, b.early -> o.late;", "a.late -> o.late;"]}]})");
  const auto fla = propagate(m, bind_model_rules(m),
                             {{{"U", "a"}, {FailureType::kEarly, FailureType::kLate}},
                              {{"U", "b"}, {FailureType::kEarly}}});
  const auto t = generate_fault_trees(m, fla, {"U", "o"}).at(0);
  check_tree(t);
  EXPECT_EQ(t.gate_for(t.root)->kind, GateKind::kOr);
  EXPECT_EQ(minimal_cut_sets(t),
            (CutSetFamily{{Label{"U", "a", FailureType::kLate}},
                          {Label{"U", "a", FailureType::kEarly}, Label{"U", "b", FailureType::kEarly}}}));
}

TEST(QualitativeReduce, ChainCollapsesToBasic) {
  const auto m = chain_model();
  const auto fla = propagate(m, bind_model_rules(m), {});
  const auto t = qualitative_reduce(generate_fault_trees(m, fla, {"B", "b_out"}).at(0));
  check_tree(t);
  ASSERT_EQ(t.gates.size(), 1u);
  ASSERT_EQ(t.gates[0].inputs.size(), 1u);
  const Event& only = t.event(t.gates[0].inputs[0]);
  EXPECT_EQ(only.kind, EventKind::kBasic);
  EXPECT_EQ(only.label.str(), "A.a_out.late");
}

TEST(QualitativeReduce, AndOfTwoBasicsIsAFixpoint) {
  const auto t = flat_gate(GateKind::kAnd, {"a", "b"});
  EXPECT_EQ(qualitative_reduce(t), t);
}

TEST(QualitativeReduce, DuplicateLeavesMerge) {
  const auto t = qualitative_reduce(flat_gate(GateKind::kOr, {"x", "x"}));
  ASSERT_EQ(t.gates.size(), 1u);
  EXPECT_EQ(t.gates[0].inputs.size(), 1u);
}

TEST(QualitativeReduce, PreservesBooleanFunctionOnRandomTrees) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto t = fixtures::random_tree(rng, 6, 4);
    check_tree(t);
    const auto r = qualitative_reduce(t);
    check_tree(r);
    const auto labels = fixtures::leaf_labels(t);
    ASSERT_LE(labels.size(), 8u);
    for (std::uint32_t mask = 0; mask < (1u << labels.size()); ++mask) {
      std::set<std::string> occurs;
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (mask & (1u << i)) occurs.insert(labels[i]);
      ASSERT_EQ(fixtures::eval_tree(t, occurs), fixtures::eval_tree(r, occurs));
    }
    EXPECT_EQ(minimal_cut_sets(t), minimal_cut_sets(r));
  }
}

TEST(MinimalCutSets, Basics) {
  EXPECT_EQ(minimal_cut_sets(flat_gate(GateKind::kAnd, {"a", "b"})), (CutSetFamily{cs({"a", "b"})}));
  EXPECT_EQ(minimal_cut_sets(shared_tree()), (CutSetFamily{cs({"a"})}));
}

TEST(MinimalCutSets, AndUnderOrWithThirdBasic) {
  FaultTree t;
  t.target_port = {"Top", "out"};
  t.target_failure = FailureType::kLate;
  t.events = {top(), Event{1, EventKind::kIntermediate, lbl("M", "out"), std::nullopt},
              leaf(2, "f1"), leaf(3, "f2"), leaf(4, "c")};
  t.gates = {Gate{GateKind::kOr, 0, {1, 4}}, Gate{GateKind::kAnd, 1, {2, 3}}};
  const auto family = minimal_cut_sets(t);
  EXPECT_EQ(family, (CutSetFamily{cs({"f1", "f2"}), cs({"c"})}));
  // Every minimal cut set triggers the top event and no proper subset does.
  const std::vector<std::string> names = {"f1.out.late", "f2.out.late", "c.out.late"};
  for (std::uint32_t mask = 0; mask < 8; ++mask) {
    std::set<std::string> occurs;
    std::set<Label> as_labels;
    for (int i = 0; i < 3; ++i)
      if (mask & (1u << i)) {
        occurs.insert(names[i]);
        as_labels.insert(Label::parse(names[i]));
      }
    bool covered = false;
    for (const auto& c : family)
      covered |= std::includes(as_labels.begin(), as_labels.end(), c.begin(), c.end());
    EXPECT_EQ(fixtures::eval_tree(t, occurs), covered);
  }
}

TEST(Quantify, IndependentGates) {
  auto and_tree = flat_gate(GateKind::kAnd, {"a", "b"});
  auto or_tree = flat_gate(GateKind::kOr, {"a", "b"});
  const ProbabilityMap p{{"a.out.late", 0.1}, {"b.out.late", 0.1}};
  const auto qa = quantify(and_tree, p);
  EXPECT_NEAR(qa.probability, 0.01, 1e-15);
  EXPECT_EQ(qa.method, QuantMethod::kBottomUp);
  EXPECT_NEAR(quantify(or_tree, p).probability, 0.19, 1e-15);
}

TEST(Quantify, SharedEventUsesInclusionExclusion) {
  const ProbabilityMap p{{"a.out.late", 0.2}, {"b.out.late", 0.5}};
  const auto q = quantify(shared_tree(), p);
  EXPECT_EQ(q.method, QuantMethod::kCutSetInclusionExclusion);
  EXPECT_NEAR(q.probability, 0.2, 1e-12);
  EXPECT_NEAR(fixtures::enumerate_probability(shared_tree(), {{"a.out.late", 0.2}, {"b.out.late", 0.5}}),
              0.2, 1e-12);
}

TEST(Quantify, MissingProbabilityIsAnError) {
  EXPECT_THROW(quantify(flat_gate(GateKind::kOr, {"a", "b"}), {{"a.out.late", 0.1}}), AnalysisError);
}

TEST(Quantify, MatchesOutcomeEnumerationOnRandomTrees) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto t = fixtures::random_tree(rng, 6, 3);
    std::map<std::string, double> p;
    ProbabilityMap pm;
    for (const auto& l : fixtures::leaf_labels(t)) pm[l] = p[l] = u(rng);
    Quantification q;
    try {
      q = quantify(t, pm);
    } catch (const AnalysisError&) {
      continue;  // cut-set family too large for exact inclusion-exclusion
    }
    ++checked;
    EXPECT_NEAR(q.probability, fixtures::enumerate_probability(t, p), 1e-12);
  }
  EXPECT_GT(checked, 250);
}

TEST(Quantify, BoundsAndMonotonicity) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = fixtures::random_tree(rng, 5, 3);
    const auto labels = fixtures::leaf_labels(t);
    ProbabilityMap zero, one, p;
    for (const auto& l : labels) {
      zero[l] = 0.0;
      one[l] = 1.0;
      p[l] = u(rng);
    }
    try {
      EXPECT_NEAR(quantify(t, zero).probability, 0.0, 1e-12);
      EXPECT_NEAR(quantify(t, one).probability, 1.0, 1e-12);
      const double base = quantify(t, p).probability;
      for (const auto& l : labels) {
        auto bumped = p;
        bumped[l] = std::min(1.0, p[l] + 0.01);
        EXPECT_GE(quantify(t, bumped).probability, base - 1e-12);
      }
    } catch (const AnalysisError&) {
    }
  }
}

TEST(ExportTree, DotShapesForTransformation) {
  TwoInputTransformation fx;
  const auto dot = export_tree(generate_fault_trees(fx.m, fx.fla, {"U", "p_out"}).at(0), ExportFormat::kDot);
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
  EXPECT_EQ(count(dot, "label=\"AND\""), 1u);
  EXPECT_EQ(count(dot, "label=\"OR\""), 0u);
  EXPECT_EQ(count(dot, "  e"), 3u + 1u);  // 3 event nodes, 1 gate->output edge
  EXPECT_EQ(count(dot, "shape=house"), 2u);
}

TEST(ExportTree, SingleBasicUnderTop) {
  const auto dot = export_tree(flat_gate(GateKind::kOr, {"a"}), ExportFormat::kDot);
  EXPECT_EQ(count(dot, "shape=circle"), 1u);
}

TEST(ExportTree, JsonRoundTrip) {
  TwoInputTransformation fx;
  const auto t = generate_fault_trees(fx.m, fx.fla, {"U", "p_out"}).at(0);
  EXPECT_EQ(import_tree(export_tree(t, ExportFormat::kJson)), t);
  auto shared = shared_tree();
  shared.events[1].probability = 0.25;
  EXPECT_EQ(import_tree(export_tree(shared, ExportFormat::kJson)), shared);
  EXPECT_THROW(import_tree("{\"root\": 0}"), AnalysisError);
}

TEST(CheckTree, RejectsBrokenStructure) {
  auto t = shared_tree();
  t.gates[1].inputs.push_back(1);  // event 1 now feeds two gates
  EXPECT_THROW(check_tree(t), AnalysisError);
  auto u = shared_tree();
  u.events[2].kind = EventKind::kTop;
  EXPECT_THROW(check_tree(u), AnalysisError);
}
