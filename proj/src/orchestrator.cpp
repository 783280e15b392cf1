#include "fptc/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "fptc/errors.hpp"
#include "json.hpp"

namespace fptc::orch {

using fi::ObservationKind;
using nlohmann::ordered_json;

namespace {

std::string bare_port(const std::string& port) {
  const auto dot = port.rfind('.');
  return dot == std::string::npos ? port : port.substr(dot + 1);
}

bool mentions_untestable(const FptcRule& r) {
  auto bad = [](const RuleTerm& t) {
    return t.failure == FailureType::kOmission || t.failure == FailureType::kCommission;
  };
  return std::any_of(r.lhs.begin(), r.lhs.end(), bad) ||
         std::any_of(r.rhs.begin(), r.rhs.end(), bad);
}

FailureType lhs_failure(const FptcRule& r, const std::string& port) {
  for (const auto& t : r.lhs) {
    if (bare_port(t.port) == port) return t.failure;
  }
  return FailureType::kNoFailure;
}

std::size_t index_of(const std::vector<std::string>& names, const std::string& name) {
  const auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? names.size() : static_cast<std::size_t>(it - names.begin());
}

}  // namespace

// ---------------------------------------------------------------------------
// Pattern enumeration

std::vector<InputPattern> discovery_patterns(std::vector<FailureType> types, std::size_t n_ports,
                                             bool include_nofailure) {
  std::erase(types, FailureType::kNoFailure);
  if (include_nofailure) types.push_back(FailureType::kNoFailure);
  std::sort(types.begin(), types.end());
  types.erase(std::unique(types.begin(), types.end()), types.end());
  std::vector<InputPattern> out;
  if (types.empty() || n_ports == 0) return out;

  std::vector<std::size_t> digits(n_ports, 0);
  while (true) {
    InputPattern p(n_ports);
    for (std::size_t i = 0; i < n_ports; ++i) p[i] = types[digits[i]];
    if (std::any_of(p.begin(), p.end(), [](FailureType f) { return f != FailureType::kNoFailure; }))
      out.push_back(std::move(p));
    std::size_t pos = n_ports;
    while (pos > 0) {
      --pos;
      if (++digits[pos] < types.size()) break;
      digits[pos] = 0;
      if (pos == 0) return out;
    }
  }
}

std::vector<InputPattern> validation_patterns(const std::vector<FptcRule>& rules,
                                              const std::vector<std::string>& input_ports) {
  std::vector<InputPattern> out;
  for (const auto& r : rules) {
    InputPattern p;
    bool ok = true;
    for (const auto& port : input_ports) {
      const FailureType f = lhs_failure(r, port);
      if (f != FailureType::kNoFailure && !is_injectable(f)) ok = false;
      p.push_back(f);
    }
    for (const auto& t : r.lhs) {
      if (index_of(input_ports, bare_port(t.port)) == input_ports.size()) ok = false;
    }
    if (ok && std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
  }
  return out;
}

fi::MagnitudeStrategy stratum(std::size_t rep, std::size_t port) {
  switch ((rep + port * (rep / 3)) % 3) {
    case 0: return fi::MagnitudeStrategy::kLow;
    case 1: return fi::MagnitudeStrategy::kHigh;
    default: return fi::MagnitudeStrategy::kRandom;
  }
}

std::uint64_t scenario_seed(std::uint64_t campaign_seed, std::uint64_t scenario) {
  std::uint64_t z = campaign_seed + 0x9e3779b97f4a7c15ULL * (scenario + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Base executions

BaseExecution make_base(const sim::TestBench& bench, sim::SignalMap inputs, double horizon) {
  BaseExecution base;
  base.outputs = sim::simulate(bench, inputs, horizon);
  base.inputs = std::move(inputs);
  return base;
}

BaseExecution load_base(const sim::TestBench& bench, const std::string& dir, double horizon) {
  sim::SignalMap inputs;
  for (const auto& port : bench.layout.inputs) {
    const auto path = (std::filesystem::path(dir) / (port + ".csv")).string();
    if (!std::filesystem::exists(path))
      throw Error("base execution is missing '" + path + "' for input port " + port);
    inputs[port] = sim::read_csv(path);
  }
  return make_base(bench, std::move(inputs), horizon);
}

// ---------------------------------------------------------------------------
// Experiments

bool Observation::has_unclassified() const {
  return std::find(outputs.begin(), outputs.end(), ObservationKind::kUnclassified) !=
         outputs.end();
}

Observation run_scenario(const sim::TestBench& bench, const BaseExecution& base,
                         const InputPattern& pattern, std::size_t pattern_index,
                         std::size_t rep, std::size_t reps, const fi::InjectionConfig& cfg) {
  const auto& in_ports = bench.layout.inputs;
  if (pattern.size() != in_ports.size())
    throw Error("pattern arity " + std::to_string(pattern.size()) + " does not match " +
                std::to_string(in_ports.size()) + " input ports of " + bench.component);

  Observation o;
  o.component = bench.component;
  o.pattern_index = pattern_index;
  o.rep = rep;
  o.scenario = static_cast<std::uint64_t>(pattern_index) * reps + rep;
  o.seed = scenario_seed(cfg.seed, o.scenario);
  o.input_ports = in_ports;
  o.output_ports = bench.layout.outputs;
  o.pattern = pattern;

  fi::Rng rng(o.seed);
  sim::SignalMap mutated = base.inputs;
  try {
    for (std::size_t i = 0; i < in_ports.size(); ++i) {
      o.strata.push_back(stratum(rep, i));
      if (pattern[i] == FailureType::kNoFailure) continue;
      auto inj = fi::inject(base.inputs.at(in_ports[i]), pattern[i], cfg, o.strata.back(), rng);
      mutated[in_ports[i]] = std::move(inj.series);
      o.sites.push_back({in_ports[i], inj.site});
    }
    const auto out = sim::simulate(bench, mutated, cfg.horizon);
    for (const auto& port : o.output_ports)
      o.outputs.push_back(fi::detect(base.outputs.at(port), out.at(port), cfg));
  } catch (const InjectionError& e) {
    o.skipped = true;
    o.reason = e.what();
  } catch (const SimulationError& e) {
    o.skipped = true;
    o.reason = e.what();
  }
  if (o.skipped) o.outputs.clear();
  return o;
}

std::vector<Observation> run_experiment(const sim::TestBench& bench, const BaseExecution& base,
                                        const std::vector<InputPattern>& patterns,
                                        std::size_t reps, const fi::InjectionConfig& cfg,
                                        std::size_t jobs) {
  if (reps == 0) throw Error("reps must be at least 1");
  cfg.validate();
  const std::size_t total = patterns.size() * reps;
  std::vector<Observation> out(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      out[k] = run_scenario(bench, base, patterns[k / reps], k / reps, k % reps, reps, cfg);
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(total, 1));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rule generation and validation

GeneratedRules generate_rules(const std::vector<Observation>& obs) {
  GeneratedRules g;
  using Key = std::pair<InputPattern, std::vector<FailureType>>;
  std::set<Key> seen;
  const Observation* shape = nullptr;
  for (const auto& o : obs) {
    if (o.skipped) {
      ++g.skipped;
      continue;
    }
    if (o.has_unclassified()) {
      g.excluded.push_back(o.scenario);
      continue;
    }
    std::vector<FailureType> outs;
    for (auto k : o.outputs) outs.push_back(fi::to_failure(k));
    seen.insert({o.pattern, outs});
    if (shape == nullptr) shape = &o;
  }
  for (const auto& [pattern, outs] : seen) {
    FptcRule r;
    r.owner = shape->component;
    for (std::size_t i = 0; i < pattern.size(); ++i)
      r.lhs.push_back({shape->input_ports[i], pattern[i]});
    for (std::size_t i = 0; i < outs.size(); ++i)
      r.rhs.push_back({shape->output_ports[i], outs[i]});
    g.rules.push_back(std::move(r));
  }
  return g;
}

std::string_view to_string(VerdictStatus s) noexcept {
  switch (s) {
    case VerdictStatus::kConfirmed: return "confirmed";
    case VerdictStatus::kDisproved: return "disproved";
    case VerdictStatus::kUnsupported: return "unsupported";
    case VerdictStatus::kDeferred: return "deferred";
  }
  return "deferred";
}

std::vector<RuleVerdict> validate_rules(const std::vector<FptcRule>& declared,
                                        const std::vector<Observation>& obs) {
  std::vector<RuleVerdict> out;
  for (const auto& rule : declared) {
    RuleVerdict v;
    v.rule = rule;
    if (mentions_untestable(rule)) {
      v.status = VerdictStatus::kUnsupported;
      v.diagnostic = "no injector or detector for omission/commission";
      out.push_back(std::move(v));
      continue;
    }
    std::map<std::vector<ObservationKind>, std::size_t> tuples;
    bool matched = false;
    for (const auto& o : obs) {
      if (o.skipped || o.has_unclassified()) continue;
      bool covers = true;
      for (const auto& t : rule.lhs) {
        if (index_of(o.input_ports, bare_port(t.port)) == o.input_ports.size()) covers = false;
      }
      for (std::size_t i = 0; covers && i < o.input_ports.size(); ++i) {
        const FailureType f = lhs_failure(rule, o.input_ports[i]);
        if (f != FailureType::kWildcard && f != o.pattern[i]) covers = false;
      }
      if (!covers) continue;
      if (v.output_ports.empty()) v.output_ports = o.output_ports;
      ++tuples[o.outputs];
      bool rhs_ok = true;
      for (const auto& t : rule.rhs) {
        const auto idx = index_of(o.output_ports, bare_port(t.port));
        if (idx == o.output_ports.size() || o.outputs[idx] != fi::to_observation(t.failure))
          rhs_ok = false;
      }
      matched = matched || rhs_ok;
    }
    v.witnesses.assign(tuples.begin(), tuples.end());
    if (tuples.empty()) {
      v.status = VerdictStatus::kDeferred;
      v.diagnostic = "no observation covers the rule's input pattern";
    } else {
      v.status = matched ? VerdictStatus::kConfirmed : VerdictStatus::kDisproved;
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::string_view to_string(PortTag t) noexcept {
  switch (t) {
    case PortTag::kPropagated: return "propagated";
    case PortTag::kTransformed: return "transformed";
    case PortTag::kMasked: return "masked";
  }
  return "transformed";
}

std::vector<PortTag> classify_observation(const InputPattern& pattern,
                                          const std::vector<ObservationKind>& outputs) {
  if (pattern.size() != outputs.size())
    throw Error("classify_observation: pattern and output tuple differ in arity");
  std::vector<PortTag> tags;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const bool in_clean = pattern[i] == FailureType::kNoFailure;
    const bool out_clean = outputs[i] == ObservationKind::kNoFailure;
    if (in_clean) {
      tags.push_back(out_clean ? PortTag::kPropagated : PortTag::kTransformed);
    } else if (out_clean) {
      tags.push_back(PortTag::kMasked);
    } else if (is_injectable(pattern[i]) && fi::to_observation(pattern[i]) == outputs[i]) {
      tags.push_back(PortTag::kPropagated);
    } else {
      tags.push_back(PortTag::kTransformed);
    }
  }
  return tags;
}

// ---------------------------------------------------------------------------
// Serialisation

std::string observation_to_json_line(const Observation& o) {
  ordered_json j;
  j["schema"] = kObservationSchema;
  j["component"] = o.component;
  j["scenario"] = o.scenario;
  j["pattern_index"] = o.pattern_index;
  j["rep"] = o.rep;
  j["seed"] = o.seed;
  ordered_json pattern = ordered_json::object();
  for (std::size_t i = 0; i < o.input_ports.size(); ++i)
    pattern[o.input_ports[i]] = to_string(o.pattern[i]);
  j["pattern"] = pattern;
  ordered_json strata = ordered_json::array();
  for (auto s : o.strata) strata.push_back(fi::to_string(s));
  j["strata"] = strata;
  j["status"] = o.skipped ? "skipped" : "ok";
  if (o.skipped) j["reason"] = o.reason;
  ordered_json outputs = ordered_json::object();
  for (std::size_t i = 0; i < o.outputs.size(); ++i)
    outputs[o.output_ports[i]] = fi::to_string(o.outputs[i]);
  j["output_ports"] = o.output_ports;
  j["outputs"] = outputs;
  ordered_json sites = ordered_json::array();
  for (const auto& s : o.sites) {
    sites.push_back({{"port", s.port},
                     {"index", s.site.index},
                     {"time_shift", s.site.time_shift},
                     {"value_delta", s.site.value_delta},
                     {"original_value", s.site.original_value},
                     {"mutated_value", s.site.mutated_value}});
  }
  j["sites"] = sites;
  return j.dump();
}

std::string observations_to_jsonl(const std::vector<Observation>& obs) {
  std::string out;
  for (const auto& o : obs) {
    out += observation_to_json_line(o);
    out += '\n';
  }
  return out;
}

std::vector<Observation> observations_from_jsonl(std::string_view text) {
  std::vector<Observation> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = ordered_json::parse(line);
      if (j.at("schema").get<std::string>() != kObservationSchema)
        throw ParseError("unsupported observation schema '" + j.at("schema").get<std::string>() +
                             "'",
                         line_no, 1);
      Observation o;
      o.component = j.at("component").get<std::string>();
      o.scenario = j.at("scenario").get<std::uint64_t>();
      o.pattern_index = j.at("pattern_index").get<std::size_t>();
      o.rep = j.at("rep").get<std::size_t>();
      o.seed = j.at("seed").get<std::uint64_t>();
      for (const auto& [port, f] : j.at("pattern").items()) {
        o.input_ports.push_back(port);
        o.pattern.push_back(failure_from_string(f.get<std::string>()));
      }
      for (const auto& s : j.at("strata"))
        o.strata.push_back(fi::strategy_from_string(s.get<std::string>()));
      o.skipped = j.at("status").get<std::string>() == "skipped";
      if (o.skipped) o.reason = j.value("reason", "");
      o.output_ports = j.at("output_ports").get<std::vector<std::string>>();
      if (!o.skipped) {
        const auto& outs = j.at("outputs");
        for (const auto& port : o.output_ports)
          o.outputs.push_back(fi::observation_from_string(outs.at(port).get<std::string>()));
      }
      for (const auto& s : j.at("sites")) {
        fi::InjectionSite site{s.at("index").get<std::size_t>(), s.at("time_shift").get<double>(),
                               s.at("value_delta").get<double>(),
                               s.at("original_value").get<double>(),
                               s.at("mutated_value").get<double>()};
        o.sites.push_back({s.at("port").get<std::string>(), site});
      }
      out.push_back(std::move(o));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(std::string("invalid observation record: ") + e.what(), line_no, 1);
    }
  }
  return out;
}

std::vector<Observation> read_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open observation log '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return observations_from_jsonl(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line(), e.column());
  }
}

namespace {

std::string tuple_str(const std::vector<ObservationKind>& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += " - ";
    s += fi::to_string(t[i]);
  }
  return s;
}

}  // namespace

std::string verdicts_to_json(const std::vector<RuleVerdict>& verdicts) {
  ordered_json j;
  j["schema"] = kVerdictSchema;
  std::map<std::string, std::size_t> summary;
  for (auto s : {VerdictStatus::kConfirmed, VerdictStatus::kDisproved,
                 VerdictStatus::kUnsupported, VerdictStatus::kDeferred})
    summary[std::string(to_string(s))] = 0;
  ordered_json list = ordered_json::array();
  for (const auto& v : verdicts) {
    ++summary[std::string(to_string(v.status))];
    ordered_json e;
    e["rule"] = render_rule(v.rule);
    e["status"] = to_string(v.status);
    ordered_json w = ordered_json::array();
    for (const auto& [tuple, count] : v.witnesses) {
      ordered_json outs = ordered_json::object();
      for (std::size_t i = 0; i < tuple.size() && i < v.output_ports.size(); ++i)
        outs[v.output_ports[i]] = fi::to_string(tuple[i]);
      w.push_back({{"outputs", outs}, {"count", count}});
    }
    e["witnesses"] = w;
    if (!v.diagnostic.empty()) e["diagnostic"] = v.diagnostic;
    list.push_back(e);
  }
  j["summary"] = summary;
  j["verdicts"] = list;
  return j.dump(2) + "\n";
}

std::string verdicts_to_text(const std::vector<RuleVerdict>& verdicts) {
  std::ostringstream os;
  std::map<VerdictStatus, std::size_t> counts;
  for (const auto& v : verdicts) {
    ++counts[v.status];
    os << std::string(to_string(v.status)) << "  " << render_rule(v.rule) << "\n";
    for (const auto& [tuple, count] : v.witnesses)
      os << "    observed " << tuple_str(tuple) << " x" << count << "\n";
    if (!v.diagnostic.empty()) os << "    note: " << v.diagnostic << "\n";
  }
  os << counts[VerdictStatus::kConfirmed] << " confirmed, " << counts[VerdictStatus::kDisproved]
     << " disproved, " << counts[VerdictStatus::kUnsupported] << " unsupported, "
     << counts[VerdictStatus::kDeferred] << " deferred\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Diff

namespace {

std::set<std::string> lhs_ports(const FptcRule& a, const FptcRule& b) {
  std::set<std::string> ports;
  for (const auto& t : a.lhs) ports.insert(bare_port(t.port));
  for (const auto& t : b.lhs) ports.insert(bare_port(t.port));
  return ports;
}

bool lhs_covers(const FptcRule& declared, const FptcRule& learned) {
  for (const auto& p : lhs_ports(declared, learned)) {
    const FailureType d = lhs_failure(declared, p);
    if (d != FailureType::kWildcard && d != lhs_failure(learned, p)) return false;
  }
  return true;
}

bool rhs_agrees(const FptcRule& declared, const FptcRule& learned) {
  for (const auto& t : declared.rhs) {
    const auto it = std::find_if(learned.rhs.begin(), learned.rhs.end(), [&](const RuleTerm& u) {
      return bare_port(u.port) == bare_port(t.port);
    });
    if (it == learned.rhs.end() || it->failure != t.failure) return false;
  }
  return true;
}

}  // namespace

RuleDiff diff_rules(const std::vector<FptcRule>& declared, const std::vector<FptcRule>& learned) {
  RuleDiff d;
  std::vector<bool> explained(learned.size(), false);
  for (const auto& r : declared) {
    if (mentions_untestable(r)) {
      d.unsupported.push_back(r);
      continue;
    }
    bool covered = false;
    bool agreed = false;
    for (std::size_t i = 0; i < learned.size(); ++i) {
      if (!lhs_covers(r, learned[i])) continue;
      covered = true;
      if (rhs_agrees(r, learned[i])) {
        agreed = true;
        explained[i] = true;
      }
    }
    if (agreed) {
      d.confirmed.push_back(r);
    } else if (covered) {
      d.disproved.push_back(r);
    } else {
      d.untested.push_back(r);
    }
  }
  for (std::size_t i = 0; i < learned.size(); ++i) {
    if (!explained[i]) d.added.push_back(learned[i]);
  }
  return d;
}

}  // namespace fptc::orch
