#include "fptc/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "fptc/errors.hpp"
#include "fptc/fault_tree.hpp"
#include "fptc/fla.hpp"
#include "fptc/injection.hpp"
#include "fptc/model.hpp"
#include "fptc/orchestrator.hpp"
#include "fptc/rules.hpp"
#include "fptc/signal.hpp"
#include "json.hpp"

namespace fptc::cli {

namespace {

using nlohmann::ordered_json;

struct Globals {
  std::string config;
  std::string format = "text";
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  bool strict = false;

  bool json() const { return format == "json"; }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fi::InjectionConfig injection_config(const Globals& g) {
  fi::InjectionConfig cfg = g.config.empty() ? fi::InjectionConfig{} : fi::load_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  cfg.validate();
  return cfg;
}

ordered_json failures_json(const std::vector<FailureType>& fs) {
  ordered_json a = ordered_json::array();
  for (auto f : fs) a.push_back(to_string(f));
  return a;
}

std::string tuple_str(const std::vector<fi::ObservationKind>& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += " - ";
    s += fi::to_string(t[i]);
  }
  return s;
}

std::string pattern_str(const orch::InputPattern& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += " - ";
    s += to_string(p[i]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// model check

struct ModelCheckArgs {
  std::string model;
};

int run_model_check(const Globals& g, const ModelCheckArgs& a, std::ostream& out) {
  const SystemModel m = load_model_file(a.model);
  const auto diags = validate_model(m);
  if (g.json()) {
    ordered_json j;
    j["model"] = m.name;
    j["components"] = m.components.size();
    ordered_json list = ordered_json::array();
    for (const auto& d : diags)
      list.push_back({{"code", d.code}, {"element", d.element}, {"message", d.message}});
    j["diagnostics"] = list;
    out << j.dump(2) << "\n";
  } else {
    for (const auto& d : diags) out << d.code << ": " << d.element << ": " << d.message << "\n";
    out << a.model << ": " << diags.size() << " diagnostic(s)\n";
  }
  return diags.empty() || !g.strict ? kExitOk : kExitFindings;
}

// ---------------------------------------------------------------------------
// Shared FLA setup

struct FlaArgs {
  std::string model;
  std::vector<std::string> rules;
  std::vector<std::string> inject;
  std::string unmatched = "sink";
};

struct FlaSetup {
  SystemModel flat;
  BoundRuleSet rules;
  InjectionMap injected;
  FlaOptions options;
};

FlaSetup prepare_fla(const FlaArgs& a) {
  FlaSetup s;
  s.flat = flatten(load_model_file(a.model));
  s.rules = bind_model_rules(s.flat);
  for (const auto& path : a.rules) s.rules = merge(std::move(s.rules), bind_rules(parse_rules_file(path), s.flat));
  for (const auto& spec : a.inject) {
    const auto [ref, f] = parse_injection(spec, s.flat);
    s.injected[ref].insert(f);
  }
  s.options.unmatched = a.unmatched == "propagate" ? UnmatchedPolicy::kPropagate : UnmatchedPolicy::kSink;
  return s;
}

int run_fla(const Globals& g, const FlaArgs& a, std::ostream& out) {
  FlaSetup s = prepare_fla(a);
  const FlaResult r = propagate(s.flat, s.rules, s.injected, s.options);
  const auto unjustified = unjustified_tokens(s.flat, r);
  if (g.json()) {
    ordered_json j;
    ordered_json tokens = ordered_json::object();
    for (const auto& [port, set] : r.tokens) {
      FailureSet f = set;
      f.erase(FailureType::kNoFailure);
      tokens[port.str()] = failures_json(f.members());
    }
    j["tokens"] = tokens;
    ordered_json fired = ordered_json::array();
    for (const auto& f : r.fired) {
      const auto& rule = r.rules[f.rule];
      fired.push_back({{"component", rule.component},
                       {"rule", render_rule(rule.as_rule())},
                       {"implicit", rule.implicit},
                       {"assignment", failures_json(f.assignment)}});
    }
    j["fired"] = fired;
    j["rounds"] = r.rounds;
    out << j.dump(2) << "\n";
  } else {
    bool any = false;
    for (const auto& [port, set] : r.tokens) {
      FailureSet f = set;
      f.erase(FailureType::kNoFailure);
      if (f.size() == 0) continue;
      any = true;
      out << port.str() << ": " << f.to_string() << "\n";
    }
    if (!any) out << "no failure reaches any port\n";
    out << r.fired.size() << " rule firing(s), " << r.rounds << " round(s)\n";
  }
  return unjustified.empty() || !g.strict ? kExitOk : kExitFindings;
}

// ---------------------------------------------------------------------------
// ft gen / ft analyze

struct FtGenArgs {
  FlaArgs fla;
  std::string target;
  std::string failure;
  bool reduce = false;
  std::string export_format;
  std::string output;
};

int run_ft_gen(const Globals& g, const FtGenArgs& a, std::ostream& out) {
  FlaSetup s = prepare_fla(a.fla);
  const FlaResult r = propagate(s.flat, s.rules, s.injected, s.options);
  const PortRef target = PortRef::parse(a.target);
  if (s.flat.find_port(target) == nullptr) throw ModelError("unknown target port '" + a.target + "'");
  std::optional<FailureType> only;
  if (!a.failure.empty()) only = failure_from_string(a.failure);
  auto trees = ft::generate_fault_trees(s.flat, r, target, only);
  if (a.reduce) {
    for (auto& t : trees) t = ft::qualitative_reduce(t);
  }
  const bool as_json = a.export_format.empty() ? g.json() : a.export_format == "json";
  std::string text;
  if (as_json) {
    if (trees.size() == 1) {
      text = ft::tree_to_json(trees.front()).dump(2) + "\n";
    } else {
      ordered_json arr = ordered_json::array();
      for (const auto& t : trees) arr.push_back(ft::tree_to_json(t));
      text = arr.dump(2) + "\n";
    }
  } else {
    for (const auto& t : trees) text += ft::export_tree(t, ft::ExportFormat::kDot);
  }
  if (a.output.empty()) {
    out << text;
  } else {
    write_file(a.output, text);
    if (!g.json()) out << trees.size() << " fault tree(s) written to " << a.output << "\n";
  }
  if (trees.empty() && !g.json()) out << "no failure reaches " << a.target << "\n";
  return trees.empty() && g.strict ? kExitFindings : kExitOk;
}

struct FtAnalyzeArgs {
  std::string tree;
  std::string probabilities;
  bool reduce = false;
};

int run_ft_analyze(const Globals& g, const FtAnalyzeArgs& a, std::ostream& out) {
  const auto doc = nlohmann::json::parse(read_file(a.tree), nullptr, false);
  if (doc.is_discarded()) throw ParseError(a.tree + ": invalid JSON", 1, 1);
  std::vector<ft::FaultTree> trees;
  if (doc.is_array()) {
    for (const auto& t : doc) trees.push_back(ft::tree_from_json(t));
  } else {
    trees.push_back(ft::tree_from_json(doc));
  }
  ft::ProbabilityMap probs;
  if (!a.probabilities.empty()) probs = ft::load_probabilities(a.probabilities);

  ordered_json reports = ordered_json::array();
  for (auto tree : trees) {
    ft::check_tree(tree);
    if (a.reduce) tree = ft::qualitative_reduce(tree);
    const auto cuts = ft::minimal_cut_sets(tree);
    std::optional<ft::Quantification> q;
    if (!a.probabilities.empty() ||
        std::all_of(tree.events.begin(), tree.events.end(),
                    [](const ft::Event& e) { return !e.is_leaf() || e.probability.has_value(); }))
      q = ft::quantify(tree, probs);
    const std::string top = tree.target_port.str() + "." + std::string(to_string(tree.target_failure));
    if (g.json()) {
      ordered_json r;
      r["top"] = top;
      ordered_json cs = ordered_json::array();
      for (const auto& c : cuts) {
        ordered_json set = ordered_json::array();
        for (const auto& l : c) set.push_back(l.str());
        cs.push_back(set);
      }
      r["minimal_cut_sets"] = cs;
      if (q) {
        r["probability"] = q->probability;
        r["method"] = to_string(q->method);
        r["notes"] = q->notes;
      }
      reports.push_back(r);
    } else {
      out << "top event " << top << "\n";
      out << "minimal cut sets (" << cuts.size() << "):\n";
      for (const auto& c : cuts) {
        out << "  {";
        bool first = true;
        for (const auto& l : c) {
          out << (first ? "" : ", ") << l.str();
          first = false;
        }
        out << "}\n";
      }
      if (q) {
        out << "P(top) = " << q->probability << " (" << to_string(q->method) << ")\n";
        for (const auto& n : q->notes) out << "  note: " << n << "\n";
      }
    }
  }
  if (g.json()) out << (reports.size() == 1 ? reports.front() : reports).dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// test discover / test validate

struct BenchArgs {
  std::string model;
  std::string component;
  std::string base;
  std::size_t reps = 3;
};

struct Campaign {
  sim::TestBench bench;
  orch::BaseExecution base;
  fi::InjectionConfig cfg;
};

Campaign prepare_campaign(const Globals& g, const BenchArgs& a) {
  Campaign c;
  c.cfg = injection_config(g);
  const SystemModel flat = flatten(load_model_file(a.model));
  c.bench = sim::isolate(flat, a.component, sim::BehaviorRegistry::with_builtins());
  c.base = orch::load_base(c.bench, a.base, c.cfg.horizon);
  if (a.reps == 0) throw Error("--reps must be at least 1");
  return c;
}

struct DiscoverArgs {
  BenchArgs bench;
  std::string types = "early,late,valueCoarse,valueSubtle";
  bool no_nofailure = false;
  std::string output;
};

int run_discover(const Globals& g, const DiscoverArgs& a, std::ostream& out) {
  Campaign c = prepare_campaign(g, a.bench);
  const auto types = parse_failure_list(a.types);
  for (auto f : types) {
    if (f != FailureType::kNoFailure && !is_injectable(f))
      throw Error("no injector for failure type '" + std::string(to_string(f)) + "'");
  }
  const auto patterns =
      orch::discovery_patterns(types, c.bench.layout.inputs.size(), !a.no_nofailure);
  const auto obs = orch::run_experiment(c.bench, c.base, patterns, a.bench.reps, c.cfg, g.jobs);
  if (!a.output.empty()) write_file(a.output, orch::observations_to_jsonl(obs));

  std::size_t skipped = 0;
  std::size_t unclassified = 0;
  std::vector<std::set<std::vector<fi::ObservationKind>>> seen(patterns.size());
  for (const auto& o : obs) {
    if (o.skipped) {
      ++skipped;
      continue;
    }
    if (o.has_unclassified()) ++unclassified;
    seen[o.pattern_index].insert(o.outputs);
  }
  if (g.json()) {
    ordered_json j;
    j["component"] = c.bench.component;
    j["patterns"] = patterns.size();
    j["scenarios"] = obs.size();
    j["skipped"] = skipped;
    j["unclassified"] = unclassified;
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      ordered_json tuples = ordered_json::array();
      for (const auto& t : seen[i]) {
        ordered_json row = ordered_json::array();
        for (auto k : t) row.push_back(fi::to_string(k));
        tuples.push_back(row);
      }
      rows.push_back({{"inputs", failures_json(patterns[i])}, {"outputs", tuples}});
    }
    j["results"] = rows;
    if (!a.output.empty()) j["log"] = a.output;
    out << j.dump(2) << "\n";
  } else {
    out << c.bench.component << ": " << patterns.size() << " pattern(s) x " << a.bench.reps
        << " rep(s) = " << obs.size() << " scenario(s)\n";
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      out << "  " << pattern_str(patterns[i]) << "  =>  ";
      bool first = true;
      for (const auto& t : seen[i]) {
        out << (first ? "" : ", ") << tuple_str(t);
        first = false;
      }
      out << "\n";
    }
    if (skipped) out << skipped << " scenario(s) skipped\n";
    if (unclassified) out << unclassified << " scenario(s) with unclassified outputs\n";
    if (!a.output.empty()) out << "observations written to " << a.output << "\n";
  }
  return (skipped + unclassified) == 0 || !g.strict ? kExitOk : kExitFindings;
}

struct ValidateArgs {
  BenchArgs bench;
  std::string rules;
  std::string output;
  std::string observations;
};

int run_validate(const Globals& g, const ValidateArgs& a, std::ostream& out) {
  Campaign c = prepare_campaign(g, a.bench);
  const auto rules = parse_rules_file(a.rules);
  const SystemModel flat = flatten(load_model_file(a.bench.model));
  for (const auto& b : bind_rules(rules, flat).rules) {
    if (b.component != c.bench.component)
      throw BindError("rule '" + render_rule(b.as_rule()) + "' belongs to " + b.component +
                      ", not " + c.bench.component);
  }
  const auto patterns = orch::validation_patterns(rules, c.bench.layout.inputs);
  const auto obs = orch::run_experiment(c.bench, c.base, patterns, a.bench.reps, c.cfg, g.jobs);
  if (!a.observations.empty()) write_file(a.observations, orch::observations_to_jsonl(obs));
  const auto verdicts = orch::validate_rules(rules, obs);
  const std::string json = orch::verdicts_to_json(verdicts);
  if (!a.output.empty()) write_file(a.output, json);
  out << (g.json() ? json : orch::verdicts_to_text(verdicts));
  const bool findings = std::any_of(verdicts.begin(), verdicts.end(), [](const auto& v) {
    return v.status == orch::VerdictStatus::kDisproved ||
           v.status == orch::VerdictStatus::kDeferred;
  });
  return findings && g.strict ? kExitFindings : kExitOk;
}

// ---------------------------------------------------------------------------
// rules gen / rules diff

struct RulesGenArgs {
  std::string observations;
  std::string output;
};

int run_rules_gen(const Globals& g, const RulesGenArgs& a, std::ostream& out, std::ostream& err) {
  const auto obs = orch::read_observations(a.observations);
  const auto gen = orch::generate_rules(obs);
  const std::string text = render_rules(gen.rules);
  if (!a.output.empty()) write_file(a.output, text);
  if (!gen.excluded.empty()) {
    err << "excluded " << gen.excluded.size() << " observation(s) with unclassified outputs:";
    for (auto s : gen.excluded) err << " " << s;
    err << "\n";
  }
  if (g.json()) {
    ordered_json j;
    ordered_json list = ordered_json::array();
    for (const auto& r : gen.rules)
      list.push_back({{"rule", render_rule(r)}, {"class", to_string(classify_rule(r))}});
    j["rules"] = list;
    j["excluded"] = gen.excluded;
    j["skipped"] = gen.skipped;
    out << j.dump(2) << "\n";
  } else if (a.output.empty()) {
    out << text;
  } else {
    out << gen.rules.size() << " rule(s) written to " << a.output << "\n";
  }
  return (gen.excluded.empty() && gen.skipped == 0) || !g.strict ? kExitOk : kExitFindings;
}

struct RulesDiffArgs {
  std::string declared;
  std::string learned;
};

int run_rules_diff(const Globals& g, const RulesDiffArgs& a, std::ostream& out) {
  const auto d = orch::diff_rules(parse_rules_file(a.declared), parse_rules_file(a.learned));
  const std::vector<std::pair<const char*, const std::vector<FptcRule>*>> sections = {
      {"confirmed", &d.confirmed},   {"disproved", &d.disproved}, {"untested", &d.untested},
      {"unsupported", &d.unsupported}, {"new", &d.added}};
  if (g.json()) {
    ordered_json j;
    for (const auto& [name, rules] : sections) {
      ordered_json list = ordered_json::array();
      for (const auto& r : *rules) list.push_back(render_rule(r));
      j[name] = list;
    }
    out << j.dump(2) << "\n";
  } else {
    for (const auto& [name, rules] : sections) {
      out << name << " (" << rules->size() << ")\n";
      for (const auto& r : *rules) out << "  " << render_rule(r) << "\n";
    }
  }
  return d.disproved.empty() || !g.strict ? kExitOk : kExitFindings;
}

void add_fla_options(CLI::App* cmd, FlaArgs& a) {
  cmd->add_option("model", a.model, "System model (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--rules", a.rules, "Extra FPTC rules file (repeatable)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--inject", a.inject, "Injected failure, Comp.port=failure (repeatable)");
  cmd->add_option("--unmatched", a.unmatched, "Policy for tokens no rule mentions")
      ->check(CLI::IsMember({"sink", "propagate"}));
}

void add_bench_options(CLI::App* cmd, BenchArgs& a) {
  cmd->add_option("--model", a.model, "System model (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--component", a.component, "Simple component to isolate")->required();
  cmd->add_option("--base", a.base, "Directory with <input port>.csv base signals")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--reps", a.reps, "Repetitions per pattern")->capture_default_str();
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Failure-logic analysis and fault-injection testing for component models", "fptc"};
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Injection config file (JSON or key = value)")
      ->check(CLI::ExistingFile);
  app.add_option("--format", g.format, "Report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Campaign seed (overrides the config)");
  app.add_option("--jobs", g.jobs, "Parallel scenarios")->check(CLI::PositiveNumber);
  app.add_flag("--strict", g.strict, "Exit 1 when the analysis reports findings");
  app.require_subcommand(1);

  int code = kExitOk;
  std::function<int()> action;

  auto* model = app.add_subcommand("model", "Model commands")->require_subcommand(1);
  ModelCheckArgs mc;
  auto* check = model->add_subcommand("check", "Load and validate a system model");
  check->add_option("model", mc.model, "System model (JSON)")->required()->check(CLI::ExistingFile);
  check->callback([&] { action = [&] { return run_model_check(g, mc, out); }; });

  auto* fla = app.add_subcommand("fla", "Failure-logic analysis")->require_subcommand(1);
  FlaArgs fa;
  auto* fla_run = fla->add_subcommand("run", "Propagate injected failures to a fixpoint");
  add_fla_options(fla_run, fa);
  fla_run->callback([&] { action = [&] { return run_fla(g, fa, out); }; });

  auto* ftc = app.add_subcommand("ft", "Fault trees")->require_subcommand(1);
  FtGenArgs fg;
  auto* ft_gen = ftc->add_subcommand("gen", "Generate fault trees for a target port");
  add_fla_options(ft_gen, fg.fla);
  ft_gen->add_option("--target", fg.target, "Target port Comp.port")->required();
  ft_gen->add_option("--failure", fg.failure, "Only this failure at the target");
  ft_gen->add_flag("--reduce", fg.reduce, "Apply qualitative reduction");
  ft_gen->add_option("--export", fg.export_format, "Tree format (default dot, json with --format json)")
      ->check(CLI::IsMember({"dot", "json"}));
  ft_gen->add_option("-o,--output", fg.output, "Output file");
  ft_gen->callback([&] { action = [&] { return run_ft_gen(g, fg, out); }; });

  FtAnalyzeArgs fz;
  auto* ft_an = ftc->add_subcommand("analyze", "Minimal cut sets and top-event probability");
  ft_an->add_option("tree", fz.tree, "Fault tree (JSON)")->required()->check(CLI::ExistingFile);
  ft_an->add_option("--probabilities", fz.probabilities, "Leaf probabilities (JSON object)")
      ->check(CLI::ExistingFile);
  ft_an->add_flag("--reduce", fz.reduce, "Apply qualitative reduction first");
  ft_an->callback([&] { action = [&] { return run_ft_analyze(g, fz, out); }; });

  auto* test = app.add_subcommand("test", "Fault-injection campaigns")->require_subcommand(1);
  DiscoverArgs da;
  auto* disc = test->add_subcommand("discover", "Run every input failure combination");
  add_bench_options(disc, da.bench);
  disc->add_option("--types", da.types, "Injected failure types")->capture_default_str();
  disc->add_flag("--no-nofailure", da.no_nofailure, "Do not use noFailure in patterns");
  disc->add_option("-o,--output", da.output, "Observation log (JSON lines)");
  disc->callback([&] { action = [&] { return run_discover(g, da, out); }; });

  ValidateArgs va;
  auto* val = test->add_subcommand("validate", "Confirm or disprove declared rules");
  add_bench_options(val, va.bench);
  val->add_option("--rules", va.rules, "Declared FPTC rules")->required()->check(CLI::ExistingFile);
  val->add_option("-o,--output", va.output, "Verdict report (JSON)");
  val->add_option("--observations", va.observations, "Also write the observation log");
  val->callback([&] { action = [&] { return run_validate(g, va, out); }; });

  auto* rules = app.add_subcommand("rules", "FPTC rule files")->require_subcommand(1);
  RulesGenArgs rg;
  auto* gen = rules->add_subcommand("gen", "Learn rules from an observation log");
  gen->add_option("observations", rg.observations, "Observation log")->required()->check(CLI::ExistingFile);
  gen->add_option("-o,--output", rg.output, "Output rules file");
  gen->callback([&] { action = [&] { return run_rules_gen(g, rg, out, err); }; });

  RulesDiffArgs rd;
  auto* diff = rules->add_subcommand("diff", "Compare declared and learned rules");
  diff->add_option("declared", rd.declared, "Declared rules")->required()->check(CLI::ExistingFile);
  diff->add_option("learned", rd.learned, "Learned rules")->required()->check(CLI::ExistingFile);
  diff->callback([&] { action = [&] { return run_rules_diff(g, rd, out); }; });

  for (auto* sub : {model, fla, ftc, test, rules}) sub->fallthrough();

  if (args.empty()) {
    err << app.help();
    return kExitUsage;
  }
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if (a == "--config" || a == "--format" || a == "--seed" || a == "--jobs") {
      ++i;
      continue;
    }
    if (a.starts_with("-")) continue;
    if (app.get_subcommand_no_throw(a) == nullptr) {
      err << "error: unknown subcommand '" << a << "'\n";
      err << "run with --help for usage\n";
      return kExitUsage;
    }
    break;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << "run with --help for usage\n";
    return kExitUsage;
  }
  if (!action) {
    err << app.help();
    return kExitUsage;
  }
  try {
    code = action();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << " (line " << e.line() << ", column " << e.column() << ")\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return code;
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace fptc::cli
