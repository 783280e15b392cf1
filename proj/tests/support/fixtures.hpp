#pragma once

// Fixtures and independent reference implementations shared by the unit
// tests and the acceptance binary. The oracles here deliberately avoid the
// library's own algorithms.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fptc/fault_tree.hpp"
#include "fptc/fla.hpp"
#include "fptc/model.hpp"
#include "fptc/orchestrator.hpp"
#include "fptc/rules.hpp"
#include "fptc/signal.hpp"

namespace fixtures {

inline std::string data_path(const std::string& rel) { return std::string(FPTC_DATA_DIR) + "/" + rel; }

inline fptc::SystemModel irrigation_model() {
  return fptc::load_model_file(data_path("irrigation/model.json"));
}

inline fptc::sim::TestBench irrigation_bench() {
  return fptc::sim::isolate(irrigation_model(), "IrrigationUnit",
                            fptc::sim::BehaviorRegistry::with_builtins());
}

inline fptc::sim::TimeSeries base_pulse() {
  return fptc::sim::TimeSeries::step({{0.0, 0.0}, {15.00001, 5.0}, {30.00001, 0.0}});
}

inline fptc::orch::BaseExecution irrigation_base() {
  const auto bench = irrigation_bench();
  return fptc::orch::make_base(bench, {{"Irr_in1", base_pulse()}, {"Irr_in2", base_pulse()}},
                               fptc::sim::kDefaultHorizon);
}

/// Step signal starting at (0, 0) with distinct consecutive values in
/// [0, 5] and at least one rising transition.
inline fptc::sim::TimeSeries random_step_series(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(3, 8);
  std::uniform_real_distribution<double> gap(0.05, 4.0);
  std::uniform_int_distribution<int> level(0, 20);
  const int n = count(rng);
  std::vector<fptc::sim::Sample> s{{0.0, 0.0}};
  double t = 0.0;
  while (static_cast<int>(s.size()) < n) {
    t += gap(rng);
    double v = level(rng) * 0.25;
    if (v == s.back().v) continue;
    s.push_back({t, v});
  }
  if (std::none_of(s.begin() + 1, s.end(), [&](const auto& x) { return x.v > 0.0; }))
    s[1].v = 2.5;
  return fptc::sim::TimeSeries(std::move(s));
}

// ---------------------------------------------------------------------------
// FLA oracle: naive token closure. Rounds apply every connection and every
// rule assignment until nothing changes.

using OracleTokens = std::map<fptc::PortRef, std::set<fptc::FailureType>>;

inline OracleTokens brute_force_closure(const fptc::SystemModel& flat,
                                        const std::vector<fptc::BoundRule>& rules,
                                        const fptc::InjectionMap& injected,
                                        fptc::UnmatchedPolicy policy) {
  using fptc::FailureType;
  std::vector<fptc::BoundRule> all = rules;
  if (policy == fptc::UnmatchedPolicy::kPropagate) {
    for (const auto& c : flat.components) {
      std::vector<std::string> outs;
      for (const auto& p : c.ports)
        if (p.direction == fptc::Direction::kOutput) outs.push_back(p.name);
      if (outs.empty()) continue;
      for (const auto& p : c.ports) {
        if (p.direction != fptc::Direction::kInput) continue;
        for (auto f : fptc::kConcreteFailures) {
          bool mentioned = false;
          for (const auto& r : rules) {
            if (r.component != c.name) continue;
            for (const auto& t : r.lhs)
              if (t.port == p.name && (t.failure == f || t.failure == FailureType::kWildcard))
                mentioned = true;
          }
          if (mentioned) continue;
          fptc::BoundRule r;
          r.component = c.name;
          r.lhs = {{p.name, f}};
          for (const auto& o : outs) r.rhs.push_back({o, f});
          all.push_back(r);
        }
      }
    }
  }

  OracleTokens tok;
  for (const auto& c : flat.components)
    for (const auto& p : c.ports) tok[{c.name, p.name}] = {FailureType::kNoFailure};
  for (const auto& [ref, set] : injected)
    for (auto f : set.members()) tok[ref].insert(f);

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& conn : flat.connections) {
      for (auto f : std::set<FailureType>(tok[conn.from]))
        changed |= tok[conn.to].insert(f).second;
    }
    for (const auto& r : all) {
      std::vector<std::vector<FailureType>> choices;
      for (const auto& t : r.lhs) {
        const auto& here = tok[{r.component, t.port}];
        std::vector<FailureType> ok;
        for (auto f : here)
          if (t.failure == FailureType::kWildcard || t.failure == f) ok.push_back(f);
        choices.push_back(ok);
      }
      const bool fires = std::all_of(choices.begin(), choices.end(),
                                     [](const auto& v) { return !v.empty(); });
      if (!fires) continue;
      for (const auto& t : r.rhs) changed |= tok[{r.component, t.port}].insert(t.failure).second;
    }
  }
  return tok;
}

struct RandomSystem {
  fptc::SystemModel model;
  fptc::BoundRuleSet rules;
  fptc::InjectionMap injected;
};

inline RandomSystem random_system(std::mt19937_64& rng) {
  using fptc::FailureType;
  RandomSystem s;
  std::uniform_int_distribution<int> n_comp(1, 4), n_ports(1, 2), n_rules(0, 3), coin(0, 1);
  const std::vector<FailureType> lhs_alphabet = {
      FailureType::kEarly,     FailureType::kLate,     FailureType::kValueCoarse,
      FailureType::kValueSubtle, FailureType::kOmission, FailureType::kCommission,
      FailureType::kNoFailure, FailureType::kWildcard};
  const std::vector<FailureType> rhs_alphabet = {
      FailureType::kEarly,     FailureType::kLate,     FailureType::kValueCoarse,
      FailureType::kValueSubtle, FailureType::kOmission, FailureType::kCommission,
      FailureType::kNoFailure};
  auto pick = [&](const std::vector<FailureType>& a) {
    return a[std::uniform_int_distribution<std::size_t>(0, a.size() - 1)(rng)];
  };

  const int nc = n_comp(rng);
  std::vector<fptc::PortRef> outputs, inputs;
  for (int c = 0; c < nc; ++c) {
    fptc::Component comp;
    comp.name = "C" + std::to_string(c);
    const int ni = n_ports(rng), no = n_ports(rng);
    for (int i = 0; i < ni; ++i) {
      comp.ports.push_back({"in" + std::to_string(i), fptc::Direction::kInput, {}});
      inputs.push_back({comp.name, "in" + std::to_string(i)});
    }
    for (int o = 0; o < no; ++o) {
      comp.ports.push_back({"out" + std::to_string(o), fptc::Direction::kOutput, {}});
      outputs.push_back({comp.name, "out" + std::to_string(o)});
    }
    const int nr = n_rules(rng);
    for (int r = 0; r < nr; ++r) {
      fptc::BoundRule br;
      br.component = comp.name;
      for (int i = 0; i < ni; ++i)
        if (coin(rng) || (i == ni - 1 && br.lhs.empty()))
          br.lhs.push_back({"in" + std::to_string(i), pick(lhs_alphabet)});
      for (int o = 0; o < no; ++o)
        if (coin(rng) || (o == no - 1 && br.rhs.empty()))
          br.rhs.push_back({"out" + std::to_string(o), pick(rhs_alphabet)});
      br.rule_class = fptc::classify_rule(br);
      s.rules.rules.push_back(br);
    }
    s.model.components.push_back(std::move(comp));
  }
  for (const auto& in : inputs) {
    if (coin(rng) == 0) continue;
    const auto& from = outputs[std::uniform_int_distribution<std::size_t>(0, outputs.size() - 1)(rng)];
    s.model.connections.push_back({from, in});
  }
  std::vector<fptc::PortRef> all_ports = inputs;
  all_ports.insert(all_ports.end(), outputs.begin(), outputs.end());
  const int n_inj = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int k = 0; k < n_inj; ++k) {
    const auto& p = all_ports[std::uniform_int_distribution<std::size_t>(0, all_ports.size() - 1)(rng)];
    s.injected[p].insert(pick({FailureType::kEarly, FailureType::kLate, FailureType::kValueCoarse,
                               FailureType::kValueSubtle, FailureType::kOmission,
                               FailureType::kCommission}));
  }
  return s;
}

inline OracleTokens to_oracle(const fptc::TokenSet& t) {
  OracleTokens out;
  for (const auto& [ref, set] : t) {
    auto m = set.members();
    out[ref] = std::set<fptc::FailureType>(m.begin(), m.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fault-tree oracles: direct recursive evaluation and outcome enumeration.

inline bool eval_tree(const fptc::ft::FaultTree& t, const std::set<std::string>& occurs) {
  std::map<int, const fptc::ft::Gate*> gate_of;
  for (const auto& g : t.gates) gate_of[g.output] = &g;
  std::map<int, const fptc::ft::Event*> ev;
  for (const auto& e : t.events) ev[e.id] = &e;
  std::function<bool(int)> rec = [&](int id) {
    const auto it = gate_of.find(id);
    if (it == gate_of.end()) return occurs.count(ev.at(id)->label.str()) != 0;
    const auto& g = *it->second;
    if (g.kind == fptc::ft::GateKind::kAnd)
      return std::all_of(g.inputs.begin(), g.inputs.end(), rec);
    return std::any_of(g.inputs.begin(), g.inputs.end(), rec);
  };
  return rec(t.root);
}

inline std::vector<std::string> leaf_labels(const fptc::ft::FaultTree& t) {
  std::set<int> outputs;
  for (const auto& g : t.gates) outputs.insert(g.output);
  std::set<std::string> labels;
  for (const auto& e : t.events)
    if (!outputs.count(e.id)) labels.insert(e.label.str());
  return {labels.begin(), labels.end()};
}

inline double enumerate_probability(const fptc::ft::FaultTree& t,
                                    const std::map<std::string, double>& p) {
  const auto labels = leaf_labels(t);
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << labels.size()); ++mask) {
    std::set<std::string> occurs;
    double weight = 1.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const double pi = p.at(labels[i]);
      if (mask & (1u << i)) {
        occurs.insert(labels[i]);
        weight *= pi;
      } else {
        weight *= 1.0 - pi;
      }
    }
    if (eval_tree(t, occurs)) total += weight;
  }
  return total;
}

/// Random gate tree over basic labels drawn from a pool of `pool` names, so
/// labels may repeat.
inline fptc::ft::FaultTree random_tree(std::mt19937_64& rng, int pool, int max_depth) {
  using namespace fptc::ft;
  FaultTree t;
  t.target_port = {"Top", "out"};
  t.target_failure = fptc::FailureType::kLate;
  std::uniform_int_distribution<int> label(0, pool - 1), fan(1, 3), coin(0, 2);
  int next = 0;
  std::function<int(int, bool)> build = [&](int depth, bool root) -> int {
    const int id = next++;
    const bool leaf = !root && (depth >= max_depth || coin(rng) == 0);
    Event e;
    e.id = id;
    if (leaf) {
      e.kind = EventKind::kBasic;
      e.label = {"B" + std::to_string(label(rng)), "out", fptc::FailureType::kLate};
      t.events.push_back(e);
      return id;
    }
    e.kind = root ? EventKind::kTop : EventKind::kIntermediate;
    e.label = root ? Label{"Top", "out", fptc::FailureType::kLate}
                   : Label{"M" + std::to_string(id), "out", fptc::FailureType::kLate};
    t.events.push_back(e);
    Gate g;
    g.kind = coin(rng) == 0 ? GateKind::kAnd : GateKind::kOr;
    g.output = id;
    const int n = fan(rng);
    for (int k = 0; k < n; ++k) g.inputs.push_back(build(depth + 1, false));
    t.gates.push_back(g);
    return id;
  };
  t.root = build(0, true);
  return t;
}

// ---------------------------------------------------------------------------
// Expected output tuples of the irrigation unit for every two-port input
// pattern over the four injectable types (nine repetitions).

struct ExpectedOutcome {
  std::vector<fptc::FailureType> pattern;
  std::set<std::vector<fptc::FailureType>> outputs;
};

inline std::vector<ExpectedOutcome> irrigation_expected_outcomes() {
  using F = fptc::FailureType;
  const F E = F::kEarly, L = F::kLate, C = F::kValueCoarse, S = F::kValueSubtle, N = F::kNoFailure;
  const std::set<std::vector<F>> value_pair = {{N, L}, {L, N}, {L, L}, {N, N}};
  return {
      {{E, E}, {{E, E}}},
      {{E, L}, {{E, L}}},
      {{E, C}, {{E, L}, {E, N}}},
      {{E, S}, {{E, L}, {E, N}}},
      {{L, E}, {{L, E}}},
      {{L, L}, {{L, L}}},
      {{L, C}, {{L, L}, {L, N}}},
      {{L, S}, {{L, L}, {L, N}}},
      {{C, E}, {{L, E}, {N, E}}},
      {{C, L}, {{L, L}, {N, L}}},
      {{C, C}, value_pair},
      {{C, S}, value_pair},
      {{S, E}, {{L, E}, {N, E}}},
      {{S, L}, {{L, L}, {N, L}}},
      {{S, C}, value_pair},
      {{S, S}, value_pair},
  };
}

/// Output tuples per pattern collected from an observation log.
inline std::map<std::vector<fptc::FailureType>, std::set<std::vector<fptc::FailureType>>>
observed_outcomes(const std::vector<fptc::orch::Observation>& obs) {
  std::map<std::vector<fptc::FailureType>, std::set<std::vector<fptc::FailureType>>> out;
  for (const auto& o : obs) {
    if (o.skipped || o.has_unclassified()) continue;
    std::vector<fptc::FailureType> tuple;
    for (auto k : o.outputs) tuple.push_back(fptc::fi::to_failure(k));
    out[o.pattern].insert(tuple);
  }
  return out;
}

}  // namespace fixtures
