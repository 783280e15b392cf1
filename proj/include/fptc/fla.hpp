#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fptc/failure.hpp"
#include "fptc/model.hpp"
#include "fptc/rules.hpp"

namespace fptc {

using TokenSet = std::map<PortRef, FailureSet>;
using InjectionMap = std::map<PortRef, FailureSet>;

/// What happens to an input token that no rule of the component mentions.
enum class UnmatchedPolicy { kSink, kPropagate };

struct FlaOptions {
  UnmatchedPolicy unmatched = UnmatchedPolicy::kSink;
  // When set, rule, connection and worklist order are shuffled with this
  // seed. The result must not depend on it.
  std::optional<std::uint64_t> shuffle_seed;
};

/// One rule firing: the token chosen for each LHS term.
struct FiredRule {
  std::size_t rule = 0;  // index into FlaResult::rules
  std::vector<FailureType> assignment;

  friend auto operator<=>(const FiredRule&, const FiredRule&) = default;
  friend bool operator==(const FiredRule&, const FiredRule&) = default;
};

struct FlaResult {
  TokenSet tokens;
  std::set<FiredRule> fired;
  InjectionMap injected;
  // Declared rules followed by the implicit default-propagation rules.
  std::vector<BoundRule> rules;
  std::size_t rounds = 0;

  friend bool operator==(const FlaResult& a, const FlaResult& b) {
    return a.tokens == b.tokens && a.fired == b.fired && a.injected == b.injected &&
           a.rules == b.rules;
  }
};

/// Rules the engine adds under UnmatchedPolicy::kPropagate: for every input
/// port and concrete failure that no declared LHS term on that port matches
/// (exactly or by wildcard), `port.f -> out_1.f, ..., out_k.f`.
std::vector<BoundRule> implicit_rules(const SystemModel& flat,
                                      const BoundRuleSet& rules,
                                      UnmatchedPolicy policy);

/// Least fixed point of injection, connection transfer and rule firing over
/// the flattened model.
FlaResult propagate(const SystemModel& flat, const BoundRuleSet& rules,
                    const InjectionMap& injected, const FlaOptions& options = {});

/// Tokens at `port` minus noFailure. Throws ModelError for unknown ports.
FailureSet reachable_failures(const FlaResult& r, const PortRef& port);

/// Every non-noFailure token justified by an injection, a fired rule or a
/// connection. Returns the unjustified (port, failure) pairs.
std::vector<std::pair<PortRef, FailureType>> unjustified_tokens(
    const SystemModel& flat, const FlaResult& r);

/// Parses "Comp.port=failure" or "port=failure" against the model.
std::pair<PortRef, FailureType> parse_injection(const std::string& spec,
                                                const SystemModel& flat);

}  // namespace fptc
