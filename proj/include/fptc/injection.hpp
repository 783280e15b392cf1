#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fptc/failure.hpp"
#include "fptc/signal.hpp"

namespace fptc::fi {

enum class MagnitudeStrategy { kLow, kHigh, kRandom };

std::string_view to_string(MagnitudeStrategy s) noexcept;
MagnitudeStrategy strategy_from_string(std::string_view s);

/// Tolerances and legal signal range shared by injectors and detectors.
struct InjectionConfig {
  double epsilon_t = 1e-4;  // seconds
  double epsilon_v = 0.5;   // volts
  double v_min = 0.0;
  double v_max = 5.0;
  double horizon = sim::kDefaultHorizon;
  MagnitudeStrategy strategy = MagnitudeStrategy::kRandom;
  std::uint64_t seed = 0;

  /// Throws Error unless epsilon_t > 0, epsilon_v > 0, v_min < v_max.
  void validate() const;
};

/// JSON object or `key = value` lines with keys epsilon_t, epsilon_v,
/// v_min, v_max, horizon, seed, strategy.
InjectionConfig parse_config(std::string_view text);
InjectionConfig load_config(const std::string& path);

using Rng = std::mt19937_64;

struct InjectionSite {
  std::size_t index = 0;   // mutated sample
  double time_shift = 0.0; // signed seconds (early < 0 < late)
  double value_delta = 0.0;
  double original_value = 0.0;
  double mutated_value = 0.0;
};

struct Injection {
  sim::TimeSeries series;
  InjectionSite site;
};

/// Index of the first sample whose value exceeds its predecessor.
/// Throws InjectionError when the series has none.
std::size_t first_rising_transition(const sim::TimeSeries& ts);

/// Minimally mutates `ts` so that it carries failure `f` at the first rising
/// transition. noFailure returns the series unchanged. Throws InjectionError
/// for unsupported types or unsatisfiable constraints.
Injection inject(const sim::TimeSeries& ts, FailureType f, const InjectionConfig& cfg, Rng& rng);

/// Same, with an explicit magnitude stratum overriding cfg.strategy.
Injection inject(const sim::TimeSeries& ts, FailureType f, const InjectionConfig& cfg,
                 MagnitudeStrategy strategy, Rng& rng);

/// Applies a caller-chosen magnitude at the first rising transition: a time
/// shift of `magnitude` seconds (early/late) or a signed value delta
/// (valueCoarse/valueSubtle). Throws InjectionError if the result violates
/// the failure type's constraint or breaks timestamp order.
Injection inject_exact(const sim::TimeSeries& ts, FailureType f, double magnitude,
                       const InjectionConfig& cfg);

struct Activation {
  double t_on = 0.0;
  double t_off = 0.0;  // +inf when still active at the end of the series
  double level = 0.0;
  friend bool operator==(const Activation&, const Activation&) = default;
};

/// Maximal intervals where the value is at least `threshold`.
std::vector<Activation> extract_activations(const sim::TimeSeries& ts, double threshold = 2.5);

/// Value-change points: the first sample plus every sample whose value
/// differs from its predecessor.
std::vector<sim::Sample> extract_transitions(const sim::TimeSeries& ts);

enum class ObservationKind { kEarly, kLate, kValueCoarse, kValueSubtle, kNoFailure, kUnclassified };

std::string_view to_string(ObservationKind k) noexcept;
ObservationKind observation_from_string(std::string_view s);
/// unclassified has no FailureType counterpart; throws for it.
FailureType to_failure(ObservationKind k);
ObservationKind to_observation(FailureType f);

/// Classifies how `mutated` diverges from `base`. Transitions are matched by
/// index; differing counts give unclassified. Value failures take precedence
/// over timing failures; the timing verdict comes from the first matched
/// transition that moved by more than epsilon_t.
ObservationKind detect(const sim::TimeSeries& base, const sim::TimeSeries& mutated,
                       const InjectionConfig& cfg);

}  // namespace fptc::fi
