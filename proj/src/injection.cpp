#include "fptc/injection.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fptc/errors.hpp"
#include "json.hpp"

namespace fptc::fi {

std::string_view to_string(MagnitudeStrategy s) noexcept {
  switch (s) {
    case MagnitudeStrategy::kLow: return "low";
    case MagnitudeStrategy::kHigh: return "high";
    case MagnitudeStrategy::kRandom: return "random";
  }
  return "random";
}

MagnitudeStrategy strategy_from_string(std::string_view s) {
  if (s == "low") return MagnitudeStrategy::kLow;
  if (s == "high") return MagnitudeStrategy::kHigh;
  if (s == "random") return MagnitudeStrategy::kRandom;
  throw Error("unknown magnitude strategy '" + std::string(s) + "' (low, high, random)");
}

void InjectionConfig::validate() const {
  if (!(epsilon_t > 0.0)) throw Error("epsilon_t must be > 0");
  if (!(epsilon_v > 0.0)) throw Error("epsilon_v must be > 0");
  if (!(v_min < v_max)) throw Error("v_min must be < v_max");
  if (!(horizon > 0.0)) throw Error("horizon must be > 0");
}

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

void apply_key(InjectionConfig& cfg, const std::string& key, const std::string& value,
               std::size_t line) {
  try {
    if (key == "epsilon_t") {
      cfg.epsilon_t = std::stod(value);
    } else if (key == "epsilon_v") {
      cfg.epsilon_v = std::stod(value);
    } else if (key == "v_min") {
      cfg.v_min = std::stod(value);
    } else if (key == "v_max") {
      cfg.v_max = std::stod(value);
    } else if (key == "horizon") {
      cfg.horizon = std::stod(value);
    } else if (key == "seed") {
      cfg.seed = std::stoull(value);
    } else if (key == "strategy") {
      std::string v = value;
      if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
      cfg.strategy = strategy_from_string(v);
    } else {
      throw ParseError("unknown config key '" + key + "'", line, 1);
    }
  } catch (const std::logic_error&) {
    throw ParseError("invalid value '" + value + "' for '" + key + "'", line, 1);
  }
}

}  // namespace

InjectionConfig parse_config(std::string_view text) {
  InjectionConfig cfg;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid config JSON: ") + e.what(), 1, e.byte);
    }
    for (const auto& [k, v] : j.items()) {
      apply_key(cfg, k, v.is_string() ? v.get<std::string>() : v.dump(), 1);
    }
  } else {
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      if (trim(line).empty()) continue;
      auto sep = line.find('=');
      if (sep == std::string::npos) sep = line.find(':');
      if (sep == std::string::npos) throw ParseError("expected key = value", line_no, 1);
      apply_key(cfg, trim(line.substr(0, sep)), trim(line.substr(sep + 1)), line_no);
    }
  }
  cfg.validate();
  return cfg;
}

InjectionConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line(), e.column());
  }
}

// ---------------------------------------------------------------------------
// Injectors

std::size_t first_rising_transition(const sim::TimeSeries& ts) {
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (ts[i].v > ts[i - 1].v) return i;
  }
  throw InjectionError("series has no rising transition to mutate");
}

namespace {

struct Interval {
  double lo;
  double hi;
  double length() const { return hi - lo; }
};

double pick_toward(const std::vector<Interval>& legal, double target, double margin) {
  const Interval* best = nullptr;
  double best_point = 0.0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& iv : legal) {
    const double p = std::clamp(target, iv.lo, iv.hi);
    const double d = std::abs(p - target);
    if (d < best_dist) {
      best_dist = d;
      best_point = p;
      best = &iv;
    }
  }
  const double m = std::min(margin, best->length() / 2.0);
  return std::clamp(best_point, best->lo + m, best->hi - m);
}

double pick_uniform(const std::vector<Interval>& legal, Rng& rng) {
  double total = 0.0;
  for (const auto& iv : legal) total += iv.length();
  std::uniform_real_distribution<double> dist(0.0, total);
  double u = dist(rng);
  for (const auto& iv : legal) {
    if (u < iv.length()) return iv.lo + u;
    u -= iv.length();
  }
  return legal.back().hi;
}

std::vector<Interval> nonempty(std::initializer_list<Interval> ivs) {
  std::vector<Interval> out;
  for (const auto& iv : ivs) {
    if (iv.hi > iv.lo) out.push_back(iv);
  }
  return out;
}

Injection inject_time(const sim::TimeSeries& ts, std::size_t i, bool early,
                      const InjectionConfig& cfg, MagnitudeStrategy strategy, Rng& rng) {
  double gap = 0.0;
  if (early) {
    gap = ts[i].t - ts[i - 1].t;
  } else {
    gap = i + 1 < ts.size() ? ts[i + 1].t - ts[i].t : cfg.horizon - ts[i].t;
  }
  const double cap = gap / 2.0;
  if (!(cap > cfg.epsilon_t))
    throw InjectionError(std::string(early ? "early" : "late") +
                         " shift impossible: neighbouring gap too small for epsilon_t");
  double x = 0.0;
  switch (strategy) {
    case MagnitudeStrategy::kLow:
      x = std::min(2.0 * cfg.epsilon_t, (cfg.epsilon_t + cap) / 2.0);
      break;
    case MagnitudeStrategy::kHigh:
      x = cap;
      break;
    case MagnitudeStrategy::kRandom: {
      std::uniform_real_distribution<double> dist(cfg.epsilon_t, cap);
      do {
        x = dist(rng);
      } while (!(x > cfg.epsilon_t));
      break;
    }
  }
  std::vector<sim::Sample> samples(ts.samples().begin(), ts.samples().end());
  const double shift = early ? -x : x;
  samples[i].t += shift;
  Injection out{sim::TimeSeries(std::move(samples)), {}};
  out.site = InjectionSite{i, shift, 0.0, ts[i].v, ts[i].v};
  return out;
}

Injection inject_value(const sim::TimeSeries& ts, std::size_t i, bool coarse,
                       const InjectionConfig& cfg, MagnitudeStrategy strategy, Rng& rng) {
  const double v = ts[i].v;
  const double eps = cfg.epsilon_v;
  const double span = cfg.v_max - cfg.v_min;
  std::vector<Interval> legal;
  if (coarse) {
    legal = nonempty({{cfg.v_min - span, std::min(cfg.v_min, v - eps)},
                      {std::max(cfg.v_max, v + eps), cfg.v_max + span}});
  } else {
    legal = nonempty({{cfg.v_min, std::min(cfg.v_max, v - eps)},
                      {std::max(cfg.v_min, v + eps), cfg.v_max}});
  }
  const char* name = coarse ? "valueCoarse" : "valueSubtle";
  if (legal.empty())
    throw InjectionError(std::string(name) + " unsatisfiable: no value differs by more than "
                         "epsilon_v within the required range");

  const double prev = ts[i - 1].v;
  const bool has_next = i + 1 < ts.size();
  const double next = has_next ? ts[i + 1].v : prev;
  auto acceptable = [&](double candidate) {
    const double x = std::abs(candidate - v);
    if (!(x > eps)) return false;
    if (candidate == prev || (has_next && candidate == next)) return false;
    if (coarse) return candidate < cfg.v_min || candidate > cfg.v_max;
    const double mag = std::abs(candidate);
    return cfg.v_min <= mag && mag <= cfg.v_max && cfg.v_min <= candidate &&
           candidate <= cfg.v_max;
  };

  double mutated = v;
  switch (strategy) {
    case MagnitudeStrategy::kLow:
      mutated = pick_toward(legal, cfg.v_min, eps);
      break;
    case MagnitudeStrategy::kHigh:
      mutated = pick_toward(legal, cfg.v_max, eps);
      break;
    case MagnitudeStrategy::kRandom: {
      int tries = 0;
      do {
        mutated = pick_uniform(legal, rng);
      } while (!acceptable(mutated) && ++tries < 64);
      break;
    }
  }
  if (!acceptable(mutated))
    throw InjectionError(std::string(name) + " unsatisfiable at sample " + std::to_string(i));

  std::vector<sim::Sample> samples(ts.samples().begin(), ts.samples().end());
  samples[i].v = mutated;
  Injection out{sim::TimeSeries(std::move(samples)), {}};
  out.site = InjectionSite{i, 0.0, mutated - v, v, mutated};
  return out;
}

}  // namespace

Injection inject(const sim::TimeSeries& ts, FailureType f, const InjectionConfig& cfg, Rng& rng) {
  return inject(ts, f, cfg, cfg.strategy, rng);
}

Injection inject(const sim::TimeSeries& ts, FailureType f, const InjectionConfig& cfg,
                 MagnitudeStrategy strategy, Rng& rng) {
  cfg.validate();
  if (f == FailureType::kNoFailure) return Injection{ts, {}};
  if (!is_injectable(f))
    throw InjectionError("no injector for failure type '" + std::string(fptc::to_string(f)) + "'");
  const std::size_t i = first_rising_transition(ts);
  switch (f) {
    case FailureType::kEarly: return inject_time(ts, i, true, cfg, strategy, rng);
    case FailureType::kLate: return inject_time(ts, i, false, cfg, strategy, rng);
    case FailureType::kValueCoarse: return inject_value(ts, i, true, cfg, strategy, rng);
    case FailureType::kValueSubtle: return inject_value(ts, i, false, cfg, strategy, rng);
    default: break;
  }
  throw InjectionError("no injector for failure type");
}

Injection inject_exact(const sim::TimeSeries& ts, FailureType f, double magnitude,
                       const InjectionConfig& cfg) {
  cfg.validate();
  if (f == FailureType::kNoFailure) return Injection{ts, {}};
  const std::size_t i = first_rising_transition(ts);
  std::vector<sim::Sample> samples(ts.samples().begin(), ts.samples().end());
  InjectionSite site{i, 0.0, 0.0, ts[i].v, ts[i].v};
  const std::string name(fptc::to_string(f));
  if (f == FailureType::kEarly || f == FailureType::kLate) {
    if (!(magnitude > cfg.epsilon_t))
      throw InjectionError(name + " shift must exceed epsilon_t");
    site.time_shift = f == FailureType::kEarly ? -magnitude : magnitude;
    samples[i].t += site.time_shift;
    const bool ordered = samples[i].t > samples[i - 1].t &&
                         (i + 1 >= samples.size() ? samples[i].t <= cfg.horizon
                                                  : samples[i].t < samples[i + 1].t);
    if (!ordered) throw InjectionError(name + " shift crosses a neighbouring sample");
  } else if (f == FailureType::kValueCoarse || f == FailureType::kValueSubtle) {
    const double v = ts[i].v + magnitude;
    if (!(std::abs(magnitude) > cfg.epsilon_v))
      throw InjectionError(name + " delta must exceed epsilon_v");
    const bool in_range = cfg.v_min <= v && v <= cfg.v_max;
    if (f == FailureType::kValueCoarse && in_range)
      throw InjectionError("valueCoarse result must leave the legal range");
    if (f == FailureType::kValueSubtle && !in_range)
      throw InjectionError("valueSubtle result must stay within the legal range");
    samples[i].v = v;
    site.value_delta = magnitude;
    site.mutated_value = v;
  } else {
    throw InjectionError("no injector for failure type '" + name + "'");
  }
  return Injection{sim::TimeSeries(std::move(samples)), site};
}

// ---------------------------------------------------------------------------
// Detectors

std::vector<Activation> extract_activations(const sim::TimeSeries& ts, double threshold) {
  std::vector<Activation> out;
  bool active = false;
  for (const auto& s : ts.samples()) {
    if (s.v >= threshold) {
      if (!active) {
        out.push_back({s.t, std::numeric_limits<double>::infinity(), s.v});
        active = true;
      } else {
        out.back().level = std::max(out.back().level, s.v);
      }
    } else if (active) {
      out.back().t_off = s.t;
      active = false;
    }
  }
  return out;
}

std::vector<sim::Sample> extract_transitions(const sim::TimeSeries& ts) {
  std::vector<sim::Sample> out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i == 0 || ts[i].v != ts[i - 1].v) out.push_back(ts[i]);
  }
  return out;
}

std::string_view to_string(ObservationKind k) noexcept {
  switch (k) {
    case ObservationKind::kEarly: return "early";
    case ObservationKind::kLate: return "late";
    case ObservationKind::kValueCoarse: return "valueCoarse";
    case ObservationKind::kValueSubtle: return "valueSubtle";
    case ObservationKind::kNoFailure: return "noFailure";
    case ObservationKind::kUnclassified: return "unclassified";
  }
  return "unclassified";
}

ObservationKind observation_from_string(std::string_view s) {
  for (auto k : {ObservationKind::kEarly, ObservationKind::kLate, ObservationKind::kValueCoarse,
                 ObservationKind::kValueSubtle, ObservationKind::kNoFailure,
                 ObservationKind::kUnclassified}) {
    if (to_string(k) == s) return k;
  }
  throw Error("unknown observation kind '" + std::string(s) + "'");
}

FailureType to_failure(ObservationKind k) {
  switch (k) {
    case ObservationKind::kEarly: return FailureType::kEarly;
    case ObservationKind::kLate: return FailureType::kLate;
    case ObservationKind::kValueCoarse: return FailureType::kValueCoarse;
    case ObservationKind::kValueSubtle: return FailureType::kValueSubtle;
    case ObservationKind::kNoFailure: return FailureType::kNoFailure;
    case ObservationKind::kUnclassified: break;
  }
  throw Error("unclassified observations have no failure type");
}

ObservationKind to_observation(FailureType f) {
  switch (f) {
    case FailureType::kEarly: return ObservationKind::kEarly;
    case FailureType::kLate: return ObservationKind::kLate;
    case FailureType::kValueCoarse: return ObservationKind::kValueCoarse;
    case FailureType::kValueSubtle: return ObservationKind::kValueSubtle;
    case FailureType::kNoFailure: return ObservationKind::kNoFailure;
    default: break;
  }
  throw Error("failure type '" + std::string(fptc::to_string(f)) + "' is not observable");
}

ObservationKind detect(const sim::TimeSeries& base, const sim::TimeSeries& mutated,
                       const InjectionConfig& cfg) {
  const auto b = extract_transitions(base);
  const auto m = extract_transitions(mutated);
  if (b.size() != m.size()) return ObservationKind::kUnclassified;

  for (std::size_t k = 0; k < b.size(); ++k) {
    if (m[k].v != b[k].v && (m[k].v < cfg.v_min || m[k].v > cfg.v_max))
      return ObservationKind::kValueCoarse;
  }
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (std::abs(m[k].v - b[k].v) > cfg.epsilon_v && cfg.v_min <= m[k].v && m[k].v <= cfg.v_max)
      return ObservationKind::kValueSubtle;
  }
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (m[k].t < b[k].t - cfg.epsilon_t) return ObservationKind::kEarly;
    if (m[k].t > b[k].t + cfg.epsilon_t) return ObservationKind::kLate;
  }
  return ObservationKind::kNoFailure;
}

}  // namespace fptc::fi
