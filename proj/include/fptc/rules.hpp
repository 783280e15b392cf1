#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fptc/failure.hpp"
#include "fptc/model.hpp"

namespace fptc {

/// One `port.failure` term. `port` is either a bare port name or a
/// qualified `Component.port`, exactly as written.
struct RuleTerm {
  std::string port;
  FailureType failure = FailureType::kNoFailure;

  friend bool operator==(const RuleTerm&, const RuleTerm&) = default;
  friend auto operator<=>(const RuleTerm&, const RuleTerm&) = default;
};

struct FptcRule {
  std::string owner;  // empty until bound
  std::vector<RuleTerm> lhs;
  std::vector<RuleTerm> rhs;

  friend bool operator==(const FptcRule&, const FptcRule&) = default;
};

enum class RuleClass { kPropagation, kTransformation, kSource, kSink };

std::string_view to_string(RuleClass c) noexcept;

/// Parses `t1, ..., tn -> u1, ..., um;` lines. `#` starts a comment.
/// Throws ParseError with the 1-based line number.
std::vector<FptcRule> parse_rules(std::string_view text);
std::vector<FptcRule> parse_rules_file(const std::string& path);

/// Canonical surface syntax, one rule per line, each ending in ';'.
std::string render_rule(const FptcRule& rule);
std::string render_rules(const std::vector<FptcRule>& rules);

/// Term resolved against a concrete simple component.
struct BoundRule {
  std::string component;  // dotted path of the owning simple component
  std::vector<RuleTerm> lhs;  // port = bare port name on `component`
  std::vector<RuleTerm> rhs;
  RuleClass rule_class = RuleClass::kTransformation;
  // Synthesised by the FLA engine's unmatched-token default.
  bool implicit = false;

  FptcRule as_rule() const;
  friend bool operator==(const BoundRule&, const BoundRule&) = default;
};

struct BoundRuleSet {
  std::vector<BoundRule> rules;

  std::vector<const BoundRule*> for_component(std::string_view component) const;
};

/// Resolves every term of `rules` against `m`. All terms of one rule must
/// land on the same simple component; LHS terms on input ports, RHS terms
/// on output ports. Throws BindError.
BoundRuleSet bind_rules(const std::vector<FptcRule>& rules, const SystemModel& m);

/// Parses and binds the `rules` arrays embedded in the model's components.
BoundRuleSet bind_model_rules(const SystemModel& m);

/// Appends `extra` to `base`.
BoundRuleSet merge(BoundRuleSet base, const BoundRuleSet& extra);

/// Precedence: source, sink, propagation, transformation.
RuleClass classify_rule(const std::vector<RuleTerm>& lhs,
                        const std::vector<RuleTerm>& rhs);
inline RuleClass classify_rule(const FptcRule& r) { return classify_rule(r.lhs, r.rhs); }
inline RuleClass classify_rule(const BoundRule& r) { return classify_rule(r.lhs, r.rhs); }

/// Warnings for legal but suspicious rules (e.g. noFailure -> noFailure).
std::vector<std::string> lint_rule(const FptcRule& rule);

}  // namespace fptc
