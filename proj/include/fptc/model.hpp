#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace fptc {

enum class Direction { kInput, kOutput };
enum class ComponentKind { kSimple, kComposite };
enum class Layer { kEdge, kFog, kCloud };

std::string_view to_string(Direction d) noexcept;
std::string_view to_string(ComponentKind k) noexcept;
std::string_view to_string(Layer l) noexcept;

struct VoltageRange {
  double lo = 0.0;
  double hi = 5.0;
  friend bool operator==(const VoltageRange&, const VoltageRange&) = default;
};

/// Dotted "Component.port" reference. Component names may themselves be
/// dotted paths after flattening, so the split is at the last dot.
struct PortRef {
  std::string component;
  std::string port;

  static PortRef parse(std::string_view dotted);
  std::string str() const { return component + "." + port; }

  friend auto operator<=>(const PortRef&, const PortRef&) = default;
  friend bool operator==(const PortRef&, const PortRef&) = default;
};

struct Port {
  std::string name;
  Direction direction = Direction::kInput;
  VoltageRange range;
  friend bool operator==(const Port&, const Port&) = default;
};

struct Connection {
  PortRef from;
  PortRef to;
  friend bool operator==(const Connection&, const Connection&) = default;
  friend auto operator<=>(const Connection&, const Connection&) = default;
};

/// Registered behavioral model reference (simple components only).
struct BehaviorRef {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
  friend bool operator==(const BehaviorRef&, const BehaviorRef&) = default;
};

struct Component {
  std::string name;
  ComponentKind kind = ComponentKind::kSimple;
  Layer layer = Layer::kEdge;
  std::vector<Port> ports;
  std::vector<Component> children;
  // Composite internals. The composite's own name addresses its boundary.
  std::vector<Connection> connections;
  std::optional<BehaviorRef> behavior;
  // FPTC rule text attached in the model document.
  std::vector<std::string> rules;

  const Port* find_port(std::string_view port_name) const;
  const Component* find_child(std::string_view child_name) const;
  std::vector<const Port*> ports_of(Direction d) const;

  friend bool operator==(const Component&, const Component&) = default;
};

struct SystemModel {
  std::string name;
  std::vector<Component> components;
  std::vector<Connection> connections;
  std::vector<PortRef> system_inputs;
  std::vector<PortRef> system_outputs;

  /// Looks a component up by dotted path ("Node.Sensor" or "Board").
  const Component* find_component(std::string_view path) const;
  const Port* find_port(const PortRef& ref) const;

  /// Every simple component with its dotted path, depth-first.
  std::vector<std::pair<std::string, const Component*>> simple_components()
      const;

  friend bool operator==(const SystemModel&, const SystemModel&) = default;
};

struct Diagnostic {
  std::string code;     // e.g. "direction-mismatch"
  std::string element;  // offending component / port / connection
  std::string message;
};

/// Parses a model document. Throws ParseError (with line/column) on bad
/// JSON, ModelError on schema violations and unresolved references.
SystemModel load_model(std::string_view document);
SystemModel load_model_file(const std::string& path);

nlohmann::ordered_json model_to_json(const SystemModel& m);

/// Empty iff every model invariant holds.
std::vector<Diagnostic> validate_model(const SystemModel& m);

/// Replaces composites by their simple descendants (named by dotted path)
/// and rewires boundary bindings into direct connections.
SystemModel flatten(const SystemModel& m);

bool is_flat(const SystemModel& m);

}  // namespace fptc
