#include <gtest/gtest.h>

#include <random>

#include "fptc/errors.hpp"
#include "fptc/rules.hpp"
#include "support/fixtures.hpp"

using namespace fptc;

namespace {

const std::vector<FailureType> kLhsSymbols = {
    FailureType::kEarly,    FailureType::kLate,       FailureType::kValueCoarse,
    FailureType::kValueSubtle, FailureType::kOmission, FailureType::kCommission,
    FailureType::kNoFailure, FailureType::kWildcard};

const std::vector<FailureType> kRhsSymbols = {
    FailureType::kEarly,    FailureType::kLate,       FailureType::kValueCoarse,
    FailureType::kValueSubtle, FailureType::kOmission, FailureType::kCommission,
    FailureType::kNoFailure};

// Classification written out directly from the class definitions.
RuleClass expected_class(const std::vector<RuleTerm>& lhs, const std::vector<RuleTerm>& rhs) {
  bool lhs_clean = true;
  for (const auto& t : lhs)
    if (t.failure != FailureType::kNoFailure && t.failure != FailureType::kWildcard) lhs_clean = false;
  bool rhs_clean = true;
  for (const auto& t : rhs)
    if (t.failure != FailureType::kNoFailure) rhs_clean = false;
  if (lhs_clean && !rhs_clean) return RuleClass::kSource;
  if (rhs_clean) return RuleClass::kSink;
  bool same = lhs.size() == 1;
  for (const auto& t : rhs)
    if (lhs.size() == 1 && t.failure != lhs[0].failure) same = false;
  return same ? RuleClass::kPropagation : RuleClass::kTransformation;
}

SystemModel two_port_model() {
  return load_model(R"({"components": [
    {"name": "Unit", "ports": [
      {"name": "i1", "direction": "input"}, {"name": "i2", "direction": "input"},
      {"name": "o1", "direction": "output"}, {"name": "o2", "direction": "output"}]},
    {"name": "Other", "ports": [{"name": "x", "direction": "input"}]},
    {"name": "Node", "kind": "composite",
     "children": [{"name": "Leaf", "ports": [{"name": "q", "direction": "output"}]}]}]})");
}

}  // namespace

TEST(ParseRules, IrrigationOmissionRule) {
  const auto rules =
      parse_rules("Irr_in1.omission, Irr_in2.omission -> Irr_out1.omission, Irr_out2.omission");
  ASSERT_EQ(rules.size(), 1u);
  ASSERT_EQ(rules[0].lhs.size(), 2u);
  ASSERT_EQ(rules[0].rhs.size(), 2u);
  for (const auto& t : rules[0].lhs) EXPECT_EQ(t.failure, FailureType::kOmission);
  for (const auto& t : rules[0].rhs) EXPECT_EQ(t.failure, FailureType::kOmission);
  EXPECT_EQ(rules[0].lhs[1].port, "Irr_in2");
}

TEST(ParseRules, BoardRuleIsOneInOneOut) {
  const auto rules = parse_rules("Bd_in.valueCoarse -> Bd_out.valueCoarse");
  ASSERT_EQ(rules.size(), 1u);
  EXPECT_EQ(rules[0].lhs, (std::vector<RuleTerm>{{"Bd_in", FailureType::kValueCoarse}}));
  EXPECT_EQ(rules[0].rhs, (std::vector<RuleTerm>{{"Bd_out", FailureType::kValueCoarse}}));
}

TEST(ParseRules, EmptyRightHandSideIsASyntaxError) {
  try {
    parse_rules("# header\n\np.early ->");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ParseRules, CommentsCaseAndWildcard) {
  const auto rules = parse_rules("# comment\nA.*, B.LATE -> C.Early; # trailing\n\n");
  ASSERT_EQ(rules.size(), 1u);
  EXPECT_EQ(rules[0].lhs[0].failure, FailureType::kWildcard);
  EXPECT_EQ(rules[0].lhs[1].failure, FailureType::kLate);
  EXPECT_EQ(rules[0].rhs[0].failure, FailureType::kEarly);
}

TEST(ParseRules, Errors) {
  EXPECT_THROW(parse_rules("a.early, a.late -> b.late;"), ParseError);
  EXPECT_THROW(parse_rules("a.early -> b.late, b.early;"), ParseError);
  EXPECT_THROW(parse_rules("a.early -> b.*;"), ParseError);
  EXPECT_THROW(parse_rules("a.sticky -> b.late;"), ParseError);
  EXPECT_THROW(parse_rules("a.early b.late;"), ParseError);
  EXPECT_THROW(parse_rules("-> b.late;"), ParseError);
}

TEST(ParseRules, SampleFileHasFiveRules) {
  EXPECT_EQ(parse_rules_file(fixtures::data_path("irrigation/sample_rules.fla")).size(), 5u);
}

TEST(RenderRules, RoundTripOnRandomRuleSets) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> n(1, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<FptcRule> rules;
    const int nr = n(rng);
    for (int r = 0; r < nr; ++r) {
      FptcRule rule;
      const int nl = n(rng), nrhs = n(rng);
      for (int i = 0; i < nl; ++i)
        rule.lhs.push_back({"in" + std::to_string(i), kLhsSymbols[rng() % kLhsSymbols.size()]});
      for (int i = 0; i < nrhs; ++i)
        rule.rhs.push_back({"Comp.out" + std::to_string(i), kRhsSymbols[rng() % kRhsSymbols.size()]});
      rules.push_back(rule);
    }
    EXPECT_EQ(parse_rules(render_rules(rules)), rules);
  }
}

TEST(RenderRules, CanonicalSurfaceSyntax) {
  const auto r = parse_rules("a.early,b.late->c.late")[0];
  EXPECT_EQ(render_rule(r), "a.early, b.late -> c.late;");
}

TEST(BindRules, SampleRulesBindToIrrigationUnit) {
  const auto m = fixtures::irrigation_model();
  const auto bound = bind_rules(parse_rules_file(fixtures::data_path("irrigation/sample_rules.fla")), m);
  ASSERT_EQ(bound.rules.size(), 5u);
  for (const auto& r : bound.rules) EXPECT_EQ(r.component, "IrrigationUnit");
  EXPECT_EQ(bound.for_component("IrrigationUnit").size(), 5u);
}

TEST(BindRules, QualifiedTermsBind) {
  const auto bound = bind_rules(parse_rules("Unit.i1.late -> Unit.o1.early;"), two_port_model());
  ASSERT_EQ(bound.rules.size(), 1u);
  EXPECT_EQ(bound.rules[0].lhs[0].port, "i1");
  EXPECT_EQ(bound.rules[0].rhs[0].port, "o1");
}

TEST(BindRules, OutputOnLeftIsDirectionMismatch) {
  EXPECT_THROW(bind_rules(parse_rules("o1.late -> o2.late;"), two_port_model()), BindError);
}

TEST(BindRules, CompositeOwnerIsRejected) {
  EXPECT_THROW(bind_rules(parse_rules("Node.q.late -> Node.q.late;"), two_port_model()), BindError);
}

TEST(BindRules, UnknownPortAndSpanningComponents) {
  const auto m = two_port_model();
  EXPECT_THROW(bind_rules(parse_rules("nope.late -> o1.late;"), m), BindError);
  EXPECT_THROW(bind_rules(parse_rules("Other.x.late -> Unit.o1.late;"), m), BindError);
}

TEST(BindRules, EmbeddedModelRules) {
  const auto bound = bind_model_rules(fixtures::irrigation_model());
  ASSERT_EQ(bound.rules.size(), 1u);
  EXPECT_EQ(bound.rules[0].component, "ComputingBoard");
  EXPECT_EQ(bound.rules[0].rule_class, RuleClass::kPropagation);
}

TEST(ClassifyRule, CanonicalShapes) {
  EXPECT_EQ(classify_rule(parse_rules("p_in.late -> p_out.late;")[0]), RuleClass::kPropagation);
  EXPECT_EQ(classify_rule(parse_rules("a.early, b.late -> o.valueCoarse;")[0]),
            RuleClass::kTransformation);
  EXPECT_EQ(classify_rule(parse_rules("a.late, b.late -> o.late;")[0]), RuleClass::kTransformation);
  EXPECT_EQ(classify_rule(parse_rules("a.noFailure -> o.late;")[0]), RuleClass::kSource);
  EXPECT_EQ(classify_rule(parse_rules("a.late -> o.noFailure;")[0]), RuleClass::kSink);
}

TEST(ClassifyRule, NoOpRuleIsSinkWithLint) {
  const auto r = parse_rules("a.noFailure -> o.noFailure;")[0];
  EXPECT_EQ(classify_rule(r), RuleClass::kSink);
  EXPECT_FALSE(lint_rule(r).empty());
  EXPECT_TRUE(lint_rule(parse_rules("a.late -> o.late;")[0]).empty());
}

TEST(ClassifyRule, ExhaustiveOneAndTwoInputRules) {
  std::size_t counted = 0;
  for (auto a : kLhsSymbols) {
    for (auto o : kRhsSymbols) {
      const std::vector<RuleTerm> lhs{{"a", a}}, rhs{{"o", o}};
      EXPECT_EQ(classify_rule(lhs, rhs), expected_class(lhs, rhs));
      ++counted;
    }
    for (auto b : kLhsSymbols) {
      for (auto o : kRhsSymbols) {
        const std::vector<RuleTerm> lhs{{"a", a}, {"b", b}}, rhs{{"o", o}};
        EXPECT_EQ(classify_rule(lhs, rhs), expected_class(lhs, rhs));
        ++counted;
      }
    }
  }
  EXPECT_EQ(counted, 8u * 7u + 8u * 8u * 7u);
}
