#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fptc/failure.hpp"
#include "fptc/injection.hpp"
#include "fptc/rules.hpp"
#include "fptc/signal.hpp"

namespace fptc::orch {

/// One failure per input port of the bench, in port order.
using InputPattern = std::vector<FailureType>;

enum class Mode { kDiscovery, kValidation };

/// All tuples over `types` (plus noFailure when `include_nofailure`) minus
/// the all-noFailure tuple, lexicographic in failure-type order.
std::vector<InputPattern> discovery_patterns(std::vector<FailureType> types, std::size_t n_ports,
                                             bool include_nofailure = true);

/// Distinct LHS patterns of `rules` over `input_ports`, in first-seen order.
/// Unmentioned ports carry noFailure. Rules whose LHS cannot be injected
/// (omission, commission, wildcard) contribute nothing.
std::vector<InputPattern> validation_patterns(const std::vector<FptcRule>& rules,
                                              const std::vector<std::string>& input_ports);

/// Magnitude stratum for repetition `rep` at input port `port`. Port 0
/// cycles low, high, random; later ports are offset per block of three so
/// that nine repetitions cover every stratum pair.
fi::MagnitudeStrategy stratum(std::size_t rep, std::size_t port);

/// Seed of one scenario, derived from the campaign seed.
std::uint64_t scenario_seed(std::uint64_t campaign_seed, std::uint64_t scenario);

struct BaseExecution {
  sim::SignalMap inputs;
  sim::SignalMap outputs;
};

/// Simulates the bench on `inputs` to obtain the reference outputs.
BaseExecution make_base(const sim::TestBench& bench, sim::SignalMap inputs, double horizon);

/// Reads `<dir>/<port>.csv` for every input port of the bench.
BaseExecution load_base(const sim::TestBench& bench, const std::string& dir, double horizon);

struct PortSite {
  std::string port;
  fi::InjectionSite site;
};

struct Observation {
  std::string component;
  std::uint64_t scenario = 0;
  std::size_t pattern_index = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> input_ports;
  InputPattern pattern;
  std::vector<fi::MagnitudeStrategy> strata;
  std::vector<std::string> output_ports;
  std::vector<fi::ObservationKind> outputs;  // empty when skipped
  std::vector<PortSite> sites;
  bool skipped = false;
  std::string reason;

  bool has_unclassified() const;
};

/// Runs every pattern `reps` times. Scenarios run on up to `jobs` threads;
/// the result is ordered by (pattern index, repetition) regardless.
std::vector<Observation> run_experiment(const sim::TestBench& bench, const BaseExecution& base,
                                        const std::vector<InputPattern>& patterns,
                                        std::size_t reps, const fi::InjectionConfig& cfg,
                                        std::size_t jobs = 1);

/// Runs a single scenario. Infeasible injections yield a skipped record.
Observation run_scenario(const sim::TestBench& bench, const BaseExecution& base,
                         const InputPattern& pattern, std::size_t pattern_index,
                         std::size_t rep, std::size_t reps, const fi::InjectionConfig& cfg);

struct GeneratedRules {
  std::vector<FptcRule> rules;
  std::vector<std::uint64_t> excluded;  // scenarios with an unclassified port
  std::size_t skipped = 0;
};

/// One rule per distinct (pattern, output tuple), noFailure explicit on the
/// RHS, sorted by pattern then outputs in failure-type order.
GeneratedRules generate_rules(const std::vector<Observation>& obs);

enum class VerdictStatus { kConfirmed, kDisproved, kUnsupported, kDeferred };
std::string_view to_string(VerdictStatus s) noexcept;

struct RuleVerdict {
  FptcRule rule;
  VerdictStatus status = VerdictStatus::kDeferred;
  // Distinct output tuples observed under the rule's LHS, with counts.
  std::vector<std::pair<std::vector<fi::ObservationKind>, std::size_t>> witnesses;
  std::vector<std::string> output_ports;
  std::string diagnostic;
};

/// A rule is unsupported when it mentions omission or commission, deferred
/// when no usable observation covers its LHS, confirmed when some observed
/// tuple equals its RHS on every port the RHS names, disproved otherwise.
std::vector<RuleVerdict> validate_rules(const std::vector<FptcRule>& declared,
                                        const std::vector<Observation>& obs);

enum class PortTag { kPropagated, kTransformed, kMasked };
std::string_view to_string(PortTag t) noexcept;

std::vector<PortTag> classify_observation(const InputPattern& pattern,
                                          const std::vector<fi::ObservationKind>& outputs);

inline constexpr std::string_view kObservationSchema = "fptc-observations/1";
inline constexpr std::string_view kVerdictSchema = "fptc-verdicts/1";

std::string observation_to_json_line(const Observation& o);
std::string observations_to_jsonl(const std::vector<Observation>& obs);
/// Throws ParseError with the offending line number.
std::vector<Observation> observations_from_jsonl(std::string_view text);
std::vector<Observation> read_observations(const std::string& path);

std::string verdicts_to_json(const std::vector<RuleVerdict>& verdicts);
std::string verdicts_to_text(const std::vector<RuleVerdict>& verdicts);

struct RuleDiff {
  std::vector<FptcRule> confirmed;    // declared and learned
  std::vector<FptcRule> disproved;    // declared; LHS learned with other outputs
  std::vector<FptcRule> untested;     // declared; LHS never learned
  std::vector<FptcRule> unsupported;  // declared; mentions omission/commission
  std::vector<FptcRule> added;        // learned; matches no declared rule
};

RuleDiff diff_rules(const std::vector<FptcRule>& declared, const std::vector<FptcRule>& learned);

}  // namespace fptc::orch
