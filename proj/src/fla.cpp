#include "fptc/fla.hpp"

#include <algorithm>
#include <deque>
#include <random>

#include "fptc/errors.hpp"

namespace fptc {

std::vector<BoundRule> implicit_rules(const SystemModel& flat,
                                      const BoundRuleSet& rules,
                                      UnmatchedPolicy policy) {
  std::vector<BoundRule> out;
  if (policy == UnmatchedPolicy::kSink) return out;
  for (const auto& comp : flat.components) {
    const auto declared = rules.for_component(comp.name);
    std::vector<RuleTerm> outputs;
    for (const auto* p : comp.ports_of(Direction::kOutput))
      outputs.push_back(RuleTerm{p->name, FailureType::kNoFailure});
    if (outputs.empty()) continue;
    for (const auto* in : comp.ports_of(Direction::kInput)) {
      for (const FailureType f : kConcreteFailures) {
        const bool matched = std::any_of(declared.begin(), declared.end(), [&](const BoundRule* r) {
          return std::any_of(r->lhs.begin(), r->lhs.end(), [&](const RuleTerm& t) {
            return t.port == in->name &&
                   (t.failure == f || t.failure == FailureType::kWildcard);
          });
        });
        if (matched) continue;
        BoundRule rule;
        rule.component = comp.name;
        rule.lhs = {RuleTerm{in->name, f}};
        rule.rhs = outputs;
        for (auto& t : rule.rhs) t.failure = f;
        rule.rule_class = RuleClass::kPropagation;
        rule.implicit = true;
        out.push_back(std::move(rule));
      }
    }
  }
  return out;
}

namespace {

struct PortIndex {
  std::vector<PortRef> refs;
  std::map<PortRef, std::size_t> index;
  std::vector<bool> is_input;

  explicit PortIndex(const SystemModel& flat) {
    for (const auto& c : flat.components) {
      for (const auto& p : c.ports) {
        index.emplace(PortRef{c.name, p.name}, refs.size());
        refs.push_back(PortRef{c.name, p.name});
        is_input.push_back(p.direction == Direction::kInput);
      }
    }
  }

  std::size_t at(const PortRef& r) const {
    const auto it = index.find(r);
    if (it == index.end()) throw ModelError("unknown port '" + r.str() + "'");
    return it->second;
  }
};

bool term_matches(const RuleTerm& t, FailureSet tokens) {
  if (t.failure == FailureType::kWildcard) return !tokens.empty();
  return tokens.contains(t.failure);
}

}  // namespace

FlaResult propagate(const SystemModel& flat, const BoundRuleSet& rules,
                    const InjectionMap& injected, const FlaOptions& options) {
  if (!is_flat(flat)) throw ModelError("propagate requires a flattened model");

  FlaResult result;
  result.injected = injected;
  result.rules = rules.rules;
  for (auto& r : implicit_rules(flat, rules, options.unmatched)) result.rules.push_back(std::move(r));

  const PortIndex ports(flat);
  std::vector<FailureSet> tokens(ports.refs.size(), FailureSet::no_failure());
  for (const auto& [ref, set] : injected) {
    if (set.contains(FailureType::kWildcard))
      throw ModelError("cannot inject the wildcard at '" + ref.str() + "'");
    tokens[ports.at(ref)].merge(set);
  }

  std::mt19937_64 rng(options.shuffle_seed.value_or(0));
  auto maybe_shuffle = [&](auto& v) {
    if (options.shuffle_seed) std::shuffle(v.begin(), v.end(), rng);
  };

  // Output port -> connected input ports.
  std::vector<std::vector<std::size_t>> fanout(ports.refs.size());
  for (const auto& conn : flat.connections)
    fanout[ports.at(conn.from)].push_back(ports.at(conn.to));
  for (auto& targets : fanout) maybe_shuffle(targets);

  struct CompiledRule {
    std::vector<std::pair<std::size_t, RuleTerm>> lhs;
    std::vector<std::pair<std::size_t, FailureType>> rhs;
  };
  std::vector<CompiledRule> compiled;
  std::vector<std::vector<std::size_t>> rules_by_input(ports.refs.size());
  std::vector<std::size_t> order(result.rules.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  maybe_shuffle(order);
  for (const std::size_t i : order) {
    const auto& r = result.rules[i];
    CompiledRule c;
    for (const auto& t : r.lhs) c.lhs.emplace_back(ports.at({r.component, t.port}), t);
    for (const auto& t : r.rhs) c.rhs.emplace_back(ports.at({r.component, t.port}), t.failure);
    for (const auto& [idx, t] : c.lhs) rules_by_input[idx].push_back(compiled.size());
    compiled.push_back(std::move(c));
  }

  std::deque<std::size_t> work;
  std::vector<bool> queued(ports.refs.size(), true);
  std::vector<std::size_t> initial(ports.refs.size());
  for (std::size_t i = 0; i < initial.size(); ++i) initial[i] = i;
  maybe_shuffle(initial);
  work.assign(initial.begin(), initial.end());

  auto push = [&](std::size_t p) {
    if (!queued[p]) {
      queued[p] = true;
      work.push_back(p);
    }
  };

  std::size_t remaining_in_round = work.size();
  result.rounds = work.empty() ? 0 : 1;
  while (!work.empty()) {
    const std::size_t p = work.front();
    work.pop_front();
    queued[p] = false;
    if (ports.is_input[p]) {
      for (const std::size_t ri : rules_by_input[p]) {
        const auto& rule = compiled[ri];
        const bool fires = std::all_of(rule.lhs.begin(), rule.lhs.end(), [&](const auto& lt) {
          return term_matches(lt.second, tokens[lt.first]);
        });
        if (!fires) continue;
        for (const auto& [out, f] : rule.rhs) {
          if (tokens[out].insert(f)) push(out);
        }
      }
    } else {
      for (const std::size_t in : fanout[p]) {
        if (tokens[in].merge(tokens[p])) push(in);
      }
    }
    if (--remaining_in_round == 0 && !work.empty()) {
      remaining_in_round = work.size();
      ++result.rounds;
    }
  }

  for (std::size_t i = 0; i < tokens.size(); ++i) result.tokens.emplace(ports.refs[i], tokens[i]);

  // Fired rules at the fixpoint, every matching assignment.
  for (std::size_t ri = 0; ri < result.rules.size(); ++ri) {
    const auto& r = result.rules[ri];
    std::vector<std::vector<FailureType>> choices;
    bool fires = true;
    for (const auto& t : r.lhs) {
      const FailureSet here = result.tokens.at({r.component, t.port});
      std::vector<FailureType> options_for_term;
      if (t.failure == FailureType::kWildcard) {
        options_for_term = here.members();
      } else if (here.contains(t.failure)) {
        options_for_term = {t.failure};
      }
      if (options_for_term.empty()) {
        fires = false;
        break;
      }
      choices.push_back(std::move(options_for_term));
    }
    if (!fires) continue;
    std::vector<std::size_t> pick(choices.size(), 0);
    while (true) {
      FiredRule fr{ri, {}};
      for (std::size_t k = 0; k < choices.size(); ++k) fr.assignment.push_back(choices[k][pick[k]]);
      result.fired.insert(std::move(fr));
      std::size_t k = 0;
      while (k < pick.size() && ++pick[k] == choices[k].size()) pick[k++] = 0;
      if (k == pick.size()) break;
    }
  }
  return result;
}

FailureSet reachable_failures(const FlaResult& r, const PortRef& port) {
  const auto it = r.tokens.find(port);
  if (it == r.tokens.end()) throw ModelError("unknown port '" + port.str() + "'");
  FailureSet out = it->second;
  out.erase(FailureType::kNoFailure);
  return out;
}

std::vector<std::pair<PortRef, FailureType>> unjustified_tokens(const SystemModel& flat,
                                                                const FlaResult& r) {
  std::vector<std::pair<PortRef, FailureType>> out;
  for (const auto& [port, set] : r.tokens) {
    const Port* p = flat.find_port(port);
    for (const FailureType f : set.members()) {
      if (f == FailureType::kNoFailure) continue;
      if (auto it = r.injected.find(port); it != r.injected.end() && it->second.contains(f))
        continue;
      bool ok = false;
      if (p != nullptr && p->direction == Direction::kInput) {
        for (const auto& c : flat.connections) {
          if (c.to == port && r.tokens.at(c.from).contains(f)) ok = true;
        }
      } else {
        for (const auto& fr : r.fired) {
          const auto& rule = r.rules[fr.rule];
          if (rule.component != port.component) continue;
          for (const auto& t : rule.rhs) {
            if (t.port == port.port && t.failure == f) ok = true;
          }
        }
      }
      if (!ok) out.emplace_back(port, f);
    }
  }
  return out;
}

std::pair<PortRef, FailureType> parse_injection(const std::string& spec,
                                                const SystemModel& flat) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos)
    throw Error("injection '" + spec + "' must look like Comp.port=failure");
  const std::string where = spec.substr(0, eq);
  const FailureType f = failure_from_string(spec.substr(eq + 1));
  if (!is_concrete(f))
    throw Error("injection '" + spec + "' must name a concrete failure type");
  if (where.find('.') != std::string::npos) {
    PortRef ref = PortRef::parse(where);
    if (flat.find_port(ref) == nullptr) throw ModelError("unknown port '" + where + "'");
    return {ref, f};
  }
  std::vector<PortRef> hits;
  for (const auto& c : flat.components) {
    if (c.find_port(where) != nullptr) hits.push_back({c.name, where});
  }
  if (hits.empty()) throw ModelError("unknown port '" + where + "'");
  if (hits.size() > 1)
    throw ModelError("ambiguous port '" + where + "'; qualify it as Component.port");
  return {hits.front(), f};
}

}  // namespace fptc
