#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fptc/model.hpp"
#include "json.hpp"

namespace fptc::sim {

struct Sample {
  double t = 0.0;  // seconds
  double v = 0.0;  // volts
  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Piecewise-constant signal: each value holds until the next sample.
class TimeSeries {
 public:
  TimeSeries() = default;
  /// Throws SimulationError unless timestamps strictly increase.
  explicit TimeSeries(std::vector<Sample> samples);

  static TimeSeries step(std::initializer_list<Sample> samples) {
    return TimeSeries(std::vector<Sample>(samples));
  }

  std::span<const Sample> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }

  /// Value in force at time t (0 before the first sample).
  double value_at(double t) const;

  /// Appends a sample; ignored if the value does not change.
  void push_change(double t, double v);

  TimeSeries shifted(double delta) const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<Sample> samples_;
};

/// CSV with header `t,v`; numbers printed in shortest round-trip form.
std::string to_csv(const TimeSeries& ts);
TimeSeries from_csv(std::string_view text);
TimeSeries read_csv(const std::string& path);
void write_csv(const std::string& path, const TimeSeries& ts);

using SignalMap = std::map<std::string, TimeSeries>;  // port name -> series

struct PortLayout {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

/// Pure, deterministic transfer function of a simple component.
class BehaviorModel {
 public:
  virtual ~BehaviorModel() = default;
  virtual std::string_view name() const = 0;
  virtual SignalMap transfer(const PortLayout& layout, const SignalMap& inputs,
                             double horizon) const = 0;
};

/// Charge-integrator relay channel.
struct ChannelParams {
  double charge_threshold = 150e-6;  // volt-seconds to switch on
  double release_delay = 60e-6;      // seconds from drive loss to off
  double clamp = 5.0;                // drive saturates at this voltage
  double on_level = 5.0;             // output level while on

  static ChannelParams from_json(const nlohmann::json& params);
};

TimeSeries irrigation_channel_response(const TimeSeries& input, const ChannelParams& params,
                                       double horizon);

/// Two-or-more channel relay driver: input i drives output i.
class IrrigationRelayModel : public BehaviorModel {
 public:
  explicit IrrigationRelayModel(ChannelParams params = {}) : params_(params) {}
  std::string_view name() const override { return "irrigation_relay"; }
  SignalMap transfer(const PortLayout& layout, const SignalMap& inputs,
                     double horizon) const override;
  const ChannelParams& params() const { return params_; }

 private:
  ChannelParams params_;
};

/// Output i repeats input i after a fixed delay.
class DelayLineModel : public BehaviorModel {
 public:
  explicit DelayLineModel(double delay) : delay_(delay) {}
  std::string_view name() const override { return "delay_line"; }
  SignalMap transfer(const PortLayout& layout, const SignalMap& inputs,
                     double horizon) const override;

 private:
  double delay_;
};

class BehaviorRegistry {
 public:
  using Factory = std::function<std::shared_ptr<const BehaviorModel>(const nlohmann::json&)>;

  /// Registry holding `irrigation_relay` and `delay_line`.
  static BehaviorRegistry with_builtins();

  void add(std::string name, Factory factory);
  bool contains(std::string_view name) const;
  std::shared_ptr<const BehaviorModel> create(std::string_view name,
                                              const nlohmann::json& params) const;

 private:
  std::map<std::string, Factory, std::less<>> factories_;
};

struct Stub {
  std::string id;  // GEN_<port>
  std::string port;
};

struct Probe {
  std::string id;  // PROBE_<port>
  std::string port;
};

/// A simple component cut out of its system: stubs drive every input,
/// probes record every output.
struct TestBench {
  std::string component;
  PortLayout layout;
  std::vector<Stub> stubs;
  std::vector<Probe> probes;
  std::shared_ptr<const BehaviorModel> model;
};

TestBench isolate(const SystemModel& m, std::string_view component,
                  const BehaviorRegistry& registry);

/// Runs the bench. Every stub port needs a series ending at or before
/// `horizon`.
SignalMap simulate(const TestBench& bench, const SignalMap& inputs, double horizon);

inline constexpr double kDefaultHorizon = 45.0;

}  // namespace fptc::sim
