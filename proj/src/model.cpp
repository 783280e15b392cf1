#include "fptc/model.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "fptc/errors.hpp"

namespace fptc {

using nlohmann::json;

std::string_view to_string(Direction d) noexcept {
  return d == Direction::kInput ? "input" : "output";
}

std::string_view to_string(ComponentKind k) noexcept {
  return k == ComponentKind::kSimple ? "simple" : "composite";
}

std::string_view to_string(Layer l) noexcept {
  switch (l) {
    case Layer::kEdge: return "edge";
    case Layer::kFog: return "fog";
    case Layer::kCloud: return "cloud";
  }
  return "edge";
}

PortRef PortRef::parse(std::string_view dotted) {
  const auto dot = dotted.rfind('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == dotted.size()) {
    throw ModelError("malformed port reference '" + std::string(dotted) +
                     "' (expected Component.port)");
  }
  return PortRef{std::string(dotted.substr(0, dot)),
                 std::string(dotted.substr(dot + 1))};
}

const Port* Component::find_port(std::string_view port_name) const {
  for (const auto& p : ports) {
    if (p.name == port_name) return &p;
  }
  return nullptr;
}

const Component* Component::find_child(std::string_view child_name) const {
  for (const auto& c : children) {
    if (c.name == child_name) return &c;
  }
  return nullptr;
}

std::vector<const Port*> Component::ports_of(Direction d) const {
  std::vector<const Port*> out;
  for (const auto& p : ports) {
    if (p.direction == d) out.push_back(&p);
  }
  return out;
}

const Component* SystemModel::find_component(std::string_view path) const {
  // Flattened models use dotted names directly.
  for (const auto& c : components) {
    if (c.name == path) return &c;
  }
  const Component* current = nullptr;
  const std::vector<Component>* level = &components;
  std::string_view rest = path;
  while (!rest.empty()) {
    const auto dot = rest.find('.');
    const auto head = rest.substr(0, dot);
    current = nullptr;
    for (const auto& c : *level) {
      if (c.name == head) current = &c;
    }
    if (current == nullptr) return nullptr;
    if (dot == std::string_view::npos) break;
    rest.remove_prefix(dot + 1);
    level = &current->children;
  }
  return current;
}

const Port* SystemModel::find_port(const PortRef& ref) const {
  const auto* c = find_component(ref.component);
  return c == nullptr ? nullptr : c->find_port(ref.port);
}

std::vector<std::pair<std::string, const Component*>>
SystemModel::simple_components() const {
  std::vector<std::pair<std::string, const Component*>> out;
  std::function<void(const Component&, const std::string&)> walk =
      [&](const Component& c, const std::string& path) {
        if (c.kind == ComponentKind::kSimple) {
          out.emplace_back(path, &c);
          return;
        }
        for (const auto& child : c.children) walk(child, path + "." + child.name);
      };
  for (const auto& c : components) walk(c, c.name);
  return out;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

std::pair<std::size_t, std::size_t> line_col(std::string_view text,
                                             std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw ModelError("model schema: " + where + ": " + what);
}

std::string get_string(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_string())
    schema_error(where, std::string("missing string field '") + key + "'");
  return j.at(key).get<std::string>();
}

Direction parse_direction(const std::string& s, const std::string& where) {
  if (s == "input" || s == "in") return Direction::kInput;
  if (s == "output" || s == "out") return Direction::kOutput;
  schema_error(where, "direction must be 'input' or 'output', got '" + s + "'");
}

Layer parse_layer(const std::string& s, const std::string& where) {
  if (s == "edge") return Layer::kEdge;
  if (s == "fog") return Layer::kFog;
  if (s == "cloud") return Layer::kCloud;
  schema_error(where, "layer must be edge, fog or cloud, got '" + s + "'");
}

Connection parse_connection(const json& j, const std::string& where) {
  if (!j.is_object()) schema_error(where, "connection must be an object");
  return Connection{PortRef::parse(get_string(j, "from", where)),
                    PortRef::parse(get_string(j, "to", where))};
}

Component parse_component(const json& j, const std::string& where) {
  if (!j.is_object()) schema_error(where, "component must be an object");
  Component c;
  c.name = get_string(j, "name", where);
  const std::string here = where + "/" + c.name;
  if (c.name.empty() || c.name.find('.') != std::string::npos)
    schema_error(here, "component names must be non-empty and dot-free");

  if (j.contains("ports")) {
    if (!j.at("ports").is_array()) schema_error(here, "'ports' must be an array");
    for (const auto& pj : j.at("ports")) {
      Port p;
      p.name = get_string(pj, "name", here);
      if (p.name.empty() || p.name.find('.') != std::string::npos)
        schema_error(here, "port names must be non-empty and dot-free");
      p.direction = parse_direction(get_string(pj, "direction", here), here);
      if (pj.contains("range")) {
        const auto& r = pj.at("range");
        if (!r.is_array() || r.size() != 2 || !r[0].is_number() ||
            !r[1].is_number())
          schema_error(here + "." + p.name, "'range' must be [lo, hi]");
        p.range = VoltageRange{r[0].get<double>(), r[1].get<double>()};
      }
      c.ports.push_back(std::move(p));
    }
  }
  if (j.contains("children")) {
    if (!j.at("children").is_array())
      schema_error(here, "'children' must be an array");
    for (const auto& cj : j.at("children"))
      c.children.push_back(parse_component(cj, here));
  }
  if (j.contains("kind")) {
    const auto kind = get_string(j, "kind", here);
    if (kind == "simple") {
      c.kind = ComponentKind::kSimple;
    } else if (kind == "composite") {
      c.kind = ComponentKind::kComposite;
    } else {
      schema_error(here, "kind must be simple or composite, got '" + kind + "'");
    }
  } else {
    c.kind = c.children.empty() ? ComponentKind::kSimple
                                : ComponentKind::kComposite;
  }
  if (j.contains("layer")) c.layer = parse_layer(get_string(j, "layer", here), here);
  if (j.contains("connections")) {
    if (!j.at("connections").is_array())
      schema_error(here, "'connections' must be an array");
    for (const auto& cj : j.at("connections"))
      c.connections.push_back(parse_connection(cj, here));
  }
  if (j.contains("behavior") && !j.at("behavior").is_null()) {
    BehaviorRef b;
    b.name = get_string(j, "behavior", here);
    if (j.contains("params")) {
      if (!j.at("params").is_object())
        schema_error(here, "'params' must be an object");
      b.params = j.at("params");
    }
    c.behavior = std::move(b);
  }
  if (j.contains("rules")) {
    if (!j.at("rules").is_array()) schema_error(here, "'rules' must be an array");
    for (const auto& r : j.at("rules")) {
      if (!r.is_string()) schema_error(here, "rules must be strings");
      c.rules.push_back(r.get<std::string>());
    }
  }
  return c;
}

// Endpoint lookup relative to one nesting level. `owner` is the composite
// whose internals are being resolved, or nullptr for the top level.
const Port* resolve_at_level(const std::vector<Component>& level,
                             const Component* owner, const PortRef& ref,
                             bool* is_boundary = nullptr) {
  if (is_boundary != nullptr) *is_boundary = false;
  if (owner != nullptr && ref.component == owner->name) {
    if (is_boundary != nullptr) *is_boundary = true;
    return owner->find_port(ref.port);
  }
  for (const auto& c : level) {
    if (c.name == ref.component) return c.find_port(ref.port);
  }
  return nullptr;
}

bool component_at_level(const std::vector<Component>& level,
                        const Component* owner, const std::string& name) {
  if (owner != nullptr && owner->name == name) return true;
  return std::any_of(level.begin(), level.end(),
                     [&](const Component& c) { return c.name == name; });
}

void require_resolved(const std::vector<Component>& level,
                      const Component* owner, const PortRef& ref,
                      const std::string& context) {
  if (resolve_at_level(level, owner, ref) != nullptr) return;
  if (!component_at_level(level, owner, ref.component)) {
    throw ModelError("unresolved reference '" + ref.str() + "' in " + context +
                     ": no component '" + ref.component + "'");
  }
  throw ModelError("unresolved reference '" + ref.str() + "' in " + context +
                   ": component '" + ref.component + "' has no port '" +
                   ref.port + "'");
}

void resolve_component(const Component& c) {
  for (const auto& conn : c.connections) {
    const auto ctx = "connections of '" + c.name + "'";
    require_resolved(c.children, &c, conn.from, ctx);
    require_resolved(c.children, &c, conn.to, ctx);
  }
  for (const auto& child : c.children) resolve_component(child);
}

}  // namespace

SystemModel load_model(std::string_view document) {
  json j;
  try {
    j = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(document, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(std::string("invalid model JSON: ") + e.what(), line, col);
  }
  if (!j.is_object()) schema_error("/", "document must be a JSON object");

  SystemModel m;
  m.name = j.value("name", std::string{});
  if (j.contains("components")) {
    if (!j.at("components").is_array())
      schema_error("/", "'components' must be an array");
    for (const auto& cj : j.at("components"))
      m.components.push_back(parse_component(cj, ""));
  }
  if (j.contains("connections")) {
    if (!j.at("connections").is_array())
      schema_error("/", "'connections' must be an array");
    for (const auto& cj : j.at("connections"))
      m.connections.push_back(parse_connection(cj, "/connections"));
  }
  for (const char* key : {"system_inputs", "system_outputs"}) {
    if (!j.contains(key)) continue;
    if (!j.at(key).is_array()) schema_error("/", std::string(key) + " must be an array");
    auto& target = std::string_view(key) == "system_inputs" ? m.system_inputs
                                                            : m.system_outputs;
    for (const auto& s : j.at(key)) {
      if (!s.is_string()) schema_error(key, "entries must be strings");
      target.push_back(PortRef::parse(s.get<std::string>()));
    }
  }

  for (const auto& conn : m.connections) {
    require_resolved(m.components, nullptr, conn.from, "connections");
    require_resolved(m.components, nullptr, conn.to, "connections");
  }
  for (const auto& r : m.system_inputs)
    require_resolved(m.components, nullptr, r, "system_inputs");
  for (const auto& r : m.system_outputs)
    require_resolved(m.components, nullptr, r, "system_outputs");
  for (const auto& c : m.components) resolve_component(c);
  return m;
}

SystemModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return load_model(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line(), e.column());
  }
}

namespace {

nlohmann::ordered_json component_to_json(const Component& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["kind"] = std::string(to_string(c.kind));
  j["layer"] = std::string(to_string(c.layer));
  auto ports = nlohmann::ordered_json::array();
  for (const auto& p : c.ports) {
    nlohmann::ordered_json pj;
    pj["name"] = p.name;
    pj["direction"] = std::string(to_string(p.direction));
    pj["range"] = {p.range.lo, p.range.hi};
    ports.push_back(std::move(pj));
  }
  j["ports"] = std::move(ports);
  if (!c.children.empty()) {
    auto children = nlohmann::ordered_json::array();
    for (const auto& ch : c.children) children.push_back(component_to_json(ch));
    j["children"] = std::move(children);
  }
  if (!c.connections.empty()) {
    auto conns = nlohmann::ordered_json::array();
    for (const auto& cn : c.connections)
      conns.push_back({{"from", cn.from.str()}, {"to", cn.to.str()}});
    j["connections"] = std::move(conns);
  }
  if (c.behavior) {
    j["behavior"] = c.behavior->name;
    j["params"] = nlohmann::ordered_json::parse(c.behavior->params.dump());
  }
  if (!c.rules.empty()) j["rules"] = c.rules;
  return j;
}

}  // namespace

nlohmann::ordered_json model_to_json(const SystemModel& m) {
  nlohmann::ordered_json j;
  j["name"] = m.name;
  auto comps = nlohmann::ordered_json::array();
  for (const auto& c : m.components) comps.push_back(component_to_json(c));
  j["components"] = std::move(comps);
  auto conns = nlohmann::ordered_json::array();
  for (const auto& cn : m.connections)
    conns.push_back({{"from", cn.from.str()}, {"to", cn.to.str()}});
  j["connections"] = std::move(conns);
  auto ins = nlohmann::ordered_json::array();
  for (const auto& r : m.system_inputs) ins.push_back(r.str());
  j["system_inputs"] = std::move(ins);
  auto outs = nlohmann::ordered_json::array();
  for (const auto& r : m.system_outputs) outs.push_back(r.str());
  j["system_outputs"] = std::move(outs);
  return j;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void check_connections(const std::vector<Component>& level,
                       const Component* owner,
                       const std::vector<Connection>& connections,
                       const std::string& scope,
                       std::vector<Diagnostic>& out) {
  std::set<Connection> seen;
  for (const auto& conn : connections) {
    const std::string element =
        scope + conn.from.str() + " -> " + conn.to.str();
    bool from_boundary = false;
    bool to_boundary = false;
    const Port* from = resolve_at_level(level, owner, conn.from, &from_boundary);
    const Port* to = resolve_at_level(level, owner, conn.to, &to_boundary);
    if (from == nullptr || to == nullptr) {
      out.push_back({"unresolved-reference", element,
                     "connection endpoint does not exist"});
      continue;
    }
    // A composite's boundary input acts as a source inside it, and its
    // boundary output as a sink.
    const Direction source_dir = from_boundary ? Direction::kInput : Direction::kOutput;
    const Direction sink_dir = to_boundary ? Direction::kOutput : Direction::kInput;
    if (from->direction != source_dir || to->direction != sink_dir) {
      out.push_back({"direction-mismatch", element,
                     "connection must run from an output port to an input port"});
    }
    if (!seen.insert(conn).second) {
      out.push_back({"duplicate-connection", element, "connection is duplicated"});
    }
  }
}

void check_component(const Component& c, const std::string& path,
                     std::vector<Diagnostic>& out) {
  std::set<std::string> port_names;
  for (const auto& p : c.ports) {
    if (!port_names.insert(p.name).second)
      out.push_back({"duplicate-port", path + "." + p.name,
                     "port name repeated within component"});
    if (!(p.range.lo < p.range.hi))
      out.push_back({"invalid-range", path + "." + p.name,
                     "signal range requires v_min < v_max"});
  }
  if (c.kind == ComponentKind::kSimple) {
    if (!c.children.empty())
      out.push_back({"simple-with-children", path,
                     "simple components cannot have children"});
    if (!c.connections.empty())
      out.push_back({"simple-with-connections", path,
                     "simple components cannot have internal connections"});
  } else {
    if (c.children.empty())
      out.push_back({"empty-composite", path,
                     "composite components need at least one child"});
    if (!c.rules.empty())
      out.push_back({"composite-rules", path,
                     "composite components carry no failure rules"});
    if (c.behavior)
      out.push_back({"composite-behavior", path,
                     "behavior models attach to simple components only"});
  }
  std::set<std::string> child_names;
  for (const auto& child : c.children) {
    if (!child_names.insert(child.name).second)
      out.push_back({"duplicate-component", path + "." + child.name,
                     "component name repeated at this level"});
  }
  check_connections(c.children, &c, c.connections, path + ": ", out);
  for (const auto& child : c.children)
    check_component(child, path + "." + child.name, out);
}

}  // namespace

std::vector<Diagnostic> validate_model(const SystemModel& m) {
  std::vector<Diagnostic> out;
  std::set<std::string> names;
  for (const auto& c : m.components) {
    if (!names.insert(c.name).second)
      out.push_back({"duplicate-component", c.name,
                     "component name repeated at this level"});
  }
  for (const auto& c : m.components) check_component(c, c.name, out);
  check_connections(m.components, nullptr, m.connections, "", out);

  std::set<PortRef> targets;
  std::set<PortRef> sources;
  for (const auto& conn : m.connections) {
    targets.insert(conn.to);
    sources.insert(conn.from);
  }
  for (const auto& r : m.system_inputs) {
    const Port* p = resolve_at_level(m.components, nullptr, r);
    if (p == nullptr) {
      out.push_back({"unresolved-reference", r.str(), "system input does not exist"});
    } else if (p->direction != Direction::kInput) {
      out.push_back({"system-input-direction", r.str(),
                     "system inputs must be input ports"});
    } else if (targets.count(r) != 0) {
      out.push_back({"system-input-connected", r.str(),
                     "system inputs must be unconnected"});
    }
  }
  for (const auto& r : m.system_outputs) {
    const Port* p = resolve_at_level(m.components, nullptr, r);
    if (p == nullptr) {
      out.push_back({"unresolved-reference", r.str(), "system output does not exist"});
    } else if (p->direction != Direction::kOutput) {
      out.push_back({"system-output-direction", r.str(),
                     "system outputs must be output ports"});
    } else if (sources.count(r) != 0) {
      out.push_back({"system-output-connected", r.str(),
                     "system outputs must be unconnected"});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Flattening

bool is_flat(const SystemModel& m) {
  return std::all_of(m.components.begin(), m.components.end(),
                     [](const Component& c) {
                       return c.kind == ComponentKind::kSimple;
                     });
}

namespace {

struct Edge {
  std::string from;  // "path.port"
  std::string to;
};

struct FlatGraph {
  std::vector<Edge> edges;
  std::set<std::string> simple_ports;
  std::map<std::string, Direction> boundary_ports;  // composite boundary nodes
  std::vector<Component> simple;                    // renamed copies
};

void collect(const Component& c, const std::string& path, FlatGraph& g) {
  if (c.kind == ComponentKind::kSimple) {
    Component copy = c;
    copy.name = path;
    g.simple.push_back(std::move(copy));
    for (const auto& p : c.ports) g.simple_ports.insert(path + "." + p.name);
    return;
  }
  for (const auto& p : c.ports) g.boundary_ports[path + "." + p.name] = p.direction;
  const std::string parent =
      path.rfind('.') == std::string::npos ? std::string{} : path.substr(0, path.rfind('.'));
  auto qualify = [&](const PortRef& r) {
    if (r.component == c.name) return path + "." + r.port;
    return path + "." + r.component + "." + r.port;
  };
  for (const auto& conn : c.connections)
    g.edges.push_back({qualify(conn.from), qualify(conn.to)});
  for (const auto& child : c.children) collect(child, path + "." + child.name, g);
}

}  // namespace

SystemModel flatten(const SystemModel& m) {
  if (is_flat(m)) return m;

  FlatGraph g;
  for (const auto& conn : m.connections) g.edges.push_back({conn.from.str(), conn.to.str()});
  for (const auto& c : m.components) collect(c, c.name, g);

  // Every boundary port must be bound on the inside.
  for (const auto& [node, dir] : g.boundary_ports) {
    const bool bound = std::any_of(g.edges.begin(), g.edges.end(), [&](const Edge& e) {
      if (dir == Direction::kInput) {
        return e.from == node && e.to.rfind(node.substr(0, node.rfind('.')) + ".", 0) == 0;
      }
      return e.to == node && e.from.rfind(node.substr(0, node.rfind('.')) + ".", 0) == 0;
    });
    if (!bound) {
      throw ModelError("composite boundary port '" + node + "' has no inner binding");
    }
  }

  std::multimap<std::string, std::string> out_edges;
  std::multimap<std::string, std::string> in_edges;
  for (const auto& e : g.edges) {
    out_edges.emplace(e.from, e.to);
    in_edges.emplace(e.to, e.from);
  }

  // Follows edges through boundary nodes until simple ports are reached.
  auto reach = [&](const std::string& start,
                   const std::multimap<std::string, std::string>& adj) {
    std::vector<std::string> found;
    std::set<std::string> visited{start};
    std::function<void(const std::string&)> dfs = [&](const std::string& node) {
      auto [lo, hi] = adj.equal_range(node);
      for (auto it = lo; it != hi; ++it) {
        const auto& next = it->second;
        if (!visited.insert(next).second) continue;
        if (g.simple_ports.count(next) != 0) {
          found.push_back(next);
        } else {
          dfs(next);
        }
      }
    };
    dfs(start);
    return found;
  };

  SystemModel flat;
  flat.name = m.name;
  flat.components = std::move(g.simple);

  std::set<Connection> seen;
  for (const auto& e : g.edges) {
    if (g.simple_ports.count(e.from) == 0) continue;
    std::vector<std::string> targets;
    if (g.simple_ports.count(e.to) != 0) {
      targets.push_back(e.to);
    } else {
      std::set<std::string> visited{e.from, e.to};
      // Depth-first through boundary nodes, preserving edge order.
      std::function<void(const std::string&)> dfs = [&](const std::string& node) {
        auto [lo, hi] = out_edges.equal_range(node);
        for (auto it = lo; it != hi; ++it) {
          const auto& next = it->second;
          if (!visited.insert(next).second) continue;
          if (g.simple_ports.count(next) != 0) {
            targets.push_back(next);
          } else {
            dfs(next);
          }
        }
      };
      dfs(e.to);
    }
    for (const auto& t : targets) {
      Connection c{PortRef::parse(e.from), PortRef::parse(t)};
      if (seen.insert(c).second) flat.connections.push_back(std::move(c));
    }
  }

  for (const auto& r : m.system_inputs) {
    const auto node = r.str();
    if (g.simple_ports.count(node) != 0) {
      flat.system_inputs.push_back(r);
      continue;
    }
    for (const auto& t : reach(node, out_edges)) flat.system_inputs.push_back(PortRef::parse(t));
  }
  for (const auto& r : m.system_outputs) {
    const auto node = r.str();
    if (g.simple_ports.count(node) != 0) {
      flat.system_outputs.push_back(r);
      continue;
    }
    for (const auto& t : reach(node, in_edges)) flat.system_outputs.push_back(PortRef::parse(t));
  }
  return flat;
}

}  // namespace fptc
