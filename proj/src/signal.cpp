#include "fptc/signal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "fptc/errors.hpp"

namespace fptc::sim {

TimeSeries::TimeSeries(std::vector<Sample> samples) : samples_(std::move(samples)) {
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i].t) || !std::isfinite(samples_[i].v))
      throw SimulationError("time series sample " + std::to_string(i) + " is not finite");
    if (i > 0 && !(samples_[i].t > samples_[i - 1].t))
      throw SimulationError("time series timestamps must strictly increase (sample " +
                            std::to_string(i) + ")");
  }
}

double TimeSeries::value_at(double t) const {
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                             [](double x, const Sample& s) { return x < s.t; });
  if (it == samples_.begin()) return 0.0;
  return std::prev(it)->v;
}

void TimeSeries::push_change(double t, double v) {
  if (!samples_.empty()) {
    if (samples_.back().v == v) return;
    if (!(t > samples_.back().t))
      throw SimulationError("push_change: timestamps must strictly increase");
  }
  samples_.push_back({t, v});
}

TimeSeries TimeSeries::shifted(double delta) const {
  std::vector<Sample> out(samples_.begin(), samples_.end());
  for (auto& s : out) s.t += delta;
  return TimeSeries(std::move(out));
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view s, std::size_t line) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ParseError("invalid number '" + std::string(s) + "' in CSV", line, 1);
  return x;
}

}  // namespace

std::string to_csv(const TimeSeries& ts) {
  std::string out = "t,v\n";
  for (const auto& s : ts.samples()) {
    out += format_number(s.t);
    out += ',';
    out += format_number(s.v);
    out += '\n';
  }
  return out;
}

TimeSeries from_csv(std::string_view text) {
  std::vector<Sample> samples;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (!header_seen) {
      header_seen = true;
      std::string h;
      for (char c : line) {
        if (c != ' ' && c != '\t') h += c;
      }
      if (h != "t,v") throw ParseError("CSV header must be 't,v'", line_no, 1);
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) throw ParseError("expected 't,v' row", line_no, 1);
    samples.push_back({parse_number(line.substr(0, comma), line_no),
                       parse_number(line.substr(comma + 1), line_no)});
  }
  if (!header_seen) throw ParseError("CSV header 't,v' missing", 1, 1);
  return TimeSeries(std::move(samples));
}

TimeSeries read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open time series '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return from_csv(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line(), e.column());
  }
}

void write_csv(const std::string& path, const TimeSeries& ts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write time series '" + path + "'");
  out << to_csv(ts);
}

// ---------------------------------------------------------------------------
// Channel model

ChannelParams ChannelParams::from_json(const nlohmann::json& params) {
  ChannelParams p;
  if (params.is_object()) {
    p.charge_threshold = params.value("charge_threshold", p.charge_threshold);
    p.release_delay = params.value("release_delay", p.release_delay);
    p.clamp = params.value("clamp", p.clamp);
    p.on_level = params.value("on_level", p.on_level);
  }
  if (!(p.charge_threshold > 0.0) || !(p.release_delay >= 0.0) || !(p.clamp > 0.0))
    throw SimulationError("irrigation_relay params need charge_threshold > 0, "
                          "release_delay >= 0, clamp > 0");
  return p;
}

TimeSeries irrigation_channel_response(const TimeSeries& input, const ChannelParams& params,
                                       double horizon) {
  TimeSeries out;
  out.push_change(0.0, 0.0);
  bool on = false;
  double level = 0.0;
  std::optional<double> pending_off;

  const auto samples = input.samples();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double start = samples[k].t;
    const double end = k + 1 < samples.size() ? samples[k + 1].t : horizon;
    if (start > horizon) break;
    const double drive = std::min(std::abs(samples[k].v), params.clamp);
    if (drive > 0.0) {
      pending_off.reset();
      if (!on) {
        const double t_on = start + (params.charge_threshold - level) / drive;
        if (t_on <= end && t_on <= horizon) {
          on = true;
          level = params.charge_threshold;
          out.push_change(t_on, params.on_level);
        } else {
          level += drive * (end - start);
        }
      }
    } else {
      level = 0.0;
      if (on && !pending_off) pending_off = start + params.release_delay;
      if (pending_off && *pending_off <= end && *pending_off <= horizon) {
        out.push_change(*pending_off, 0.0);
        on = false;
        pending_off.reset();
      }
    }
  }
  return out;
}

SignalMap IrrigationRelayModel::transfer(const PortLayout& layout, const SignalMap& inputs,
                                         double horizon) const {
  if (layout.inputs.size() != layout.outputs.size())
    throw SimulationError("irrigation_relay needs as many outputs as inputs");
  SignalMap out;
  for (std::size_t i = 0; i < layout.inputs.size(); ++i) {
    out[layout.outputs[i]] =
        irrigation_channel_response(inputs.at(layout.inputs[i]), params_, horizon);
  }
  return out;
}

SignalMap DelayLineModel::transfer(const PortLayout& layout, const SignalMap& inputs,
                                   double horizon) const {
  if (layout.inputs.size() != layout.outputs.size())
    throw SimulationError("delay_line needs as many outputs as inputs");
  SignalMap out;
  for (std::size_t i = 0; i < layout.inputs.size(); ++i) {
    TimeSeries ts;
    ts.push_change(0.0, 0.0);
    for (const auto& s : inputs.at(layout.inputs[i]).samples()) {
      const double t = s.t + delay_;
      if (t > horizon) break;
      if (t <= 0.0) continue;
      ts.push_change(t, s.v);
    }
    out[layout.outputs[i]] = std::move(ts);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Registry and benches

BehaviorRegistry BehaviorRegistry::with_builtins() {
  BehaviorRegistry r;
  r.add("irrigation_relay", [](const nlohmann::json& params) {
    return std::make_shared<const IrrigationRelayModel>(ChannelParams::from_json(params));
  });
  r.add("delay_line", [](const nlohmann::json& params) {
    const double delay = params.is_object() ? params.value("delay", 0.0) : 0.0;
    if (delay < 0.0) throw SimulationError("delay_line needs delay >= 0");
    return std::make_shared<const DelayLineModel>(delay);
  });
  return r;
}

void BehaviorRegistry::add(std::string name, Factory factory) {
  factories_[std::move(name)] = std::move(factory);
}

bool BehaviorRegistry::contains(std::string_view name) const {
  return factories_.find(name) != factories_.end();
}

std::shared_ptr<const BehaviorModel> BehaviorRegistry::create(
    std::string_view name, const nlohmann::json& params) const {
  const auto it = factories_.find(name);
  if (it == factories_.end())
    throw SimulationError("no behavior model registered as '" + std::string(name) + "'");
  return it->second(params);
}

TestBench isolate(const SystemModel& m, std::string_view component,
                  const BehaviorRegistry& registry) {
  const Component* c = m.find_component(component);
  if (c == nullptr) throw SimulationError("unknown component '" + std::string(component) + "'");
  if (c->kind == ComponentKind::kComposite)
    throw SimulationError("cannot isolate composite component '" + std::string(component) + "'");
  if (!c->behavior)
    throw SimulationError("component '" + std::string(component) + "' has no behavior model");
  TestBench bench;
  bench.component = std::string(component);
  for (const auto& p : c->ports) {
    if (p.direction == Direction::kInput) {
      bench.layout.inputs.push_back(p.name);
      bench.stubs.push_back({"GEN_" + p.name, p.name});
    } else {
      bench.layout.outputs.push_back(p.name);
      bench.probes.push_back({"PROBE_" + p.name, p.name});
    }
  }
  if (bench.probes.empty())
    throw SimulationError("component '" + std::string(component) +
                          "' has no output ports: nothing to observe");
  bench.model = registry.create(c->behavior->name, c->behavior->params);
  return bench;
}

SignalMap simulate(const TestBench& bench, const SignalMap& inputs, double horizon) {
  if (!bench.model) throw SimulationError("bench has no behavior model");
  for (const auto& stub : bench.stubs) {
    const auto it = inputs.find(stub.port);
    if (it == inputs.end())
      throw SimulationError("missing input series for stub " + stub.id);
    if (!it->second.empty() && it->second.samples().back().t > horizon)
      throw SimulationError("input series for " + stub.port + " extends past the horizon");
  }
  SignalMap recorded = bench.model->transfer(bench.layout, inputs, horizon);
  SignalMap out;
  for (const auto& probe : bench.probes) out[probe.port] = std::move(recorded.at(probe.port));
  return out;
}

}  // namespace fptc::sim
