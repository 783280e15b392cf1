#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fptc/fla.hpp"
#include "json.hpp"

namespace fptc::ft {

enum class EventKind { kTop, kIntermediate, kBasic, kExternal, kUndeveloped };
enum class GateKind { kAnd, kOr };

std::string_view to_string(EventKind k) noexcept;
std::string_view to_string(GateKind k) noexcept;

/// (component, port, failure). Leaves with equal labels denote the same
/// underlying event.
struct Label {
  std::string component;
  std::string port;
  FailureType failure = FailureType::kNoFailure;

  /// "Comp.port.failure", the key used by probability files.
  std::string str() const;
  static Label parse(std::string_view text);

  friend auto operator<=>(const Label&, const Label&) = default;
  friend bool operator==(const Label&, const Label&) = default;
};

struct Event {
  int id = 0;
  EventKind kind = EventKind::kIntermediate;
  Label label;
  std::optional<double> probability;

  bool is_leaf() const {
    return kind == EventKind::kBasic || kind == EventKind::kExternal ||
           kind == EventKind::kUndeveloped;
  }
  friend bool operator==(const Event&, const Event&) = default;
};

struct Gate {
  GateKind kind = GateKind::kOr;
  int output = 0;
  std::vector<int> inputs;
  friend bool operator==(const Gate&, const Gate&) = default;
};

struct FaultTree {
  std::vector<Event> events;
  std::vector<Gate> gates;
  int root = 0;
  PortRef target_port;
  FailureType target_failure = FailureType::kNoFailure;
  // Generation notes, e.g. cycles cut into undeveloped leaves.
  std::vector<std::string> diagnostics;

  const Event& event(int id) const;
  /// Gate whose output is `id`, or nullptr for leaves.
  const Gate* gate_for(int id) const;
  std::vector<const Event*> leaves() const;

  friend bool operator==(const FaultTree& a, const FaultTree& b) {
    return a.events == b.events && a.gates == b.gates && a.root == b.root &&
           a.target_port == b.target_port && a.target_failure == b.target_failure;
  }
};

/// Throws AnalysisError if any structural invariant is broken.
void check_tree(const FaultTree& t);

/// One tree per failure reaching `target`, or only `only` when given
/// (AnalysisError if that failure does not reach the port).
std::vector<FaultTree> generate_fault_trees(const SystemModel& flat,
                                            const FlaResult& fla,
                                            const PortRef& target,
                                            std::optional<FailureType> only = std::nullopt);

/// Collapses single-child chains, splices nested ORs and merges duplicate
/// leaves under one gate. Preserves the tree's boolean function.
FaultTree qualitative_reduce(const FaultTree& t);

using CutSet = std::set<Label>;
using CutSetFamily = std::set<CutSet>;

CutSetFamily minimal_cut_sets(const FaultTree& t);

/// Evaluates the tree's boolean function; `occurs` holds the leaf labels
/// that happen.
bool evaluate(const FaultTree& t, const std::set<Label>& occurs);

enum class QuantMethod { kBottomUp, kCutSetInclusionExclusion };
std::string_view to_string(QuantMethod m) noexcept;

struct Quantification {
  double probability = 0.0;
  QuantMethod method = QuantMethod::kBottomUp;
  std::vector<std::string> notes;
};

using ProbabilityMap = std::map<std::string, double>;  // "Comp.port.failure" -> p

/// Top-event probability under leaf independence. Leaf values come from
/// `probabilities` (keyed by Label::str) or the event's own probability.
Quantification quantify(const FaultTree& t, const ProbabilityMap& probabilities);

ProbabilityMap load_probabilities(const std::string& path);

enum class ExportFormat { kDot, kJson };

std::string export_tree(const FaultTree& t, ExportFormat format);
nlohmann::ordered_json tree_to_json(const FaultTree& t);
FaultTree tree_from_json(const nlohmann::json& j);
FaultTree import_tree(std::string_view json_text);

}  // namespace fptc::ft
