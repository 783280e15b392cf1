#include "fptc/fault_tree.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "fptc/errors.hpp"

namespace fptc::ft {

std::string_view to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::kTop: return "top";
    case EventKind::kIntermediate: return "intermediate";
    case EventKind::kBasic: return "basic";
    case EventKind::kExternal: return "external";
    case EventKind::kUndeveloped: return "undeveloped";
  }
  return "?";
}

std::string_view to_string(GateKind k) noexcept {
  return k == GateKind::kAnd ? "AND" : "OR";
}

std::string_view to_string(QuantMethod m) noexcept {
  return m == QuantMethod::kBottomUp ? "bottom-up" : "cut-set-inclusion-exclusion";
}

std::string Label::str() const {
  return component + "." + port + "." + std::string(fptc::to_string(failure));
}

Label Label::parse(std::string_view text) {
  const auto dot = text.rfind('.');
  if (dot == std::string_view::npos)
    throw AnalysisError("malformed event label '" + std::string(text) + "'");
  const PortRef ref = PortRef::parse(text.substr(0, dot));
  return Label{ref.component, ref.port, failure_from_string(text.substr(dot + 1))};
}

const Event& FaultTree::event(int id) const {
  for (const auto& e : events) {
    if (e.id == id) return e;
  }
  throw AnalysisError("fault tree has no event " + std::to_string(id));
}

const Gate* FaultTree::gate_for(int id) const {
  for (const auto& g : gates) {
    if (g.output == id) return &g;
  }
  return nullptr;
}

std::vector<const Event*> FaultTree::leaves() const {
  std::vector<const Event*> out;
  for (const auto& e : events) {
    if (e.is_leaf()) out.push_back(&e);
  }
  return out;
}

void check_tree(const FaultTree& t) {
  std::set<int> ids;
  int tops = 0;
  for (const auto& e : t.events) {
    if (!ids.insert(e.id).second)
      throw AnalysisError("duplicate event id " + std::to_string(e.id));
    if (e.kind == EventKind::kTop) ++tops;
    if (e.probability && (*e.probability < 0.0 || *e.probability > 1.0))
      throw AnalysisError("probability of event " + std::to_string(e.id) + " outside [0,1]");
  }
  if (tops != 1) throw AnalysisError("fault tree needs exactly one top event");
  if (t.event(t.root).kind != EventKind::kTop)
    throw AnalysisError("root must be the top event");
  std::map<int, int> fed;
  std::set<int> outputs;
  for (const auto& g : t.gates) {
    if (g.inputs.empty()) throw AnalysisError("gate without inputs");
    if (!outputs.insert(g.output).second)
      throw AnalysisError("event " + std::to_string(g.output) + " is produced by two gates");
    if (t.event(g.output).is_leaf())
      throw AnalysisError("leaf event " + std::to_string(g.output) + " has a gate");
    for (int in : g.inputs) {
      t.event(in);
      ++fed[in];
    }
  }
  for (const auto& e : t.events) {
    if (!e.is_leaf() && outputs.count(e.id) == 0)
      throw AnalysisError("event " + std::to_string(e.id) + " is not a gate output");
    if (e.id == t.root) {
      if (fed.count(e.id) != 0) throw AnalysisError("top event feeds a gate");
    } else if (fed[e.id] != 1) {
      throw AnalysisError("event " + std::to_string(e.id) + " must feed exactly one gate");
    }
  }
}

// ---------------------------------------------------------------------------
// Plain recursive form used for construction and reduction.

namespace {

struct Node {
  EventKind kind = EventKind::kIntermediate;
  Label label;
  std::optional<double> probability;
  GateKind gate = GateKind::kOr;
  std::vector<Node> kids;

  bool is_leaf() const {
    return kind == EventKind::kBasic || kind == EventKind::kExternal ||
           kind == EventKind::kUndeveloped;
  }
};

Node to_node(const FaultTree& t, int id) {
  const Event& e = t.event(id);
  Node n{e.kind, e.label, e.probability, GateKind::kOr, {}};
  if (const Gate* g = t.gate_for(id)) {
    n.gate = g->kind;
    for (int in : g->inputs) n.kids.push_back(to_node(t, in));
  }
  return n;
}

FaultTree from_node(const Node& root, const PortRef& target, FailureType failure) {
  FaultTree t;
  t.target_port = target;
  t.target_failure = failure;
  std::vector<Gate> gates;
  std::function<int(const Node&)> emit = [&](const Node& n) {
    const int id = static_cast<int>(t.events.size());
    t.events.push_back(Event{id, n.kind, n.label, n.probability});
    if (!n.is_leaf()) {
      const std::size_t gate_slot = gates.size();
      gates.push_back(Gate{n.gate, id, {}});
      std::vector<int> inputs;
      for (const auto& k : n.kids) inputs.push_back(emit(k));
      gates[gate_slot].inputs = std::move(inputs);
    }
    return id;
  };
  t.root = emit(root);
  t.gates = std::move(gates);
  return t;
}

struct Cause {
  enum Kind { kLeaf, kPropagation, kTransformation } kind = kLeaf;
  EventKind leaf_kind = EventKind::kBasic;
  Label leaf;
  std::vector<std::pair<PortRef, FailureType>> children;
};

class Generator {
 public:
  Generator(const SystemModel& flat, const FlaResult& fla) : flat_(flat), fla_(fla) {
    for (const auto& fr : fla.fired) fired_rules_.insert(fr.rule);
  }

  Node expand(const PortRef& port, FailureType f, bool is_top) {
    const auto key = std::make_pair(port, f);
    const Label label{port.component, port.port, f};
    if (on_path_.count(key) != 0) {
      diagnostics.push_back("cycle at " + label.str() + ": cut as undeveloped event");
      return Node{EventKind::kUndeveloped, label, std::nullopt, GateKind::kOr, {}};
    }
    const auto causes = causes_of(port, f);
    if (causes.empty()) {
      diagnostics.push_back("no cause for " + label.str() + ": undeveloped event");
      if (!is_top) return Node{EventKind::kUndeveloped, label, std::nullopt, GateKind::kOr, {}};
    }
    if (!is_top && causes.size() == 1 && causes.front().kind == Cause::kLeaf) {
      return Node{causes.front().leaf_kind, causes.front().leaf, std::nullopt, GateKind::kOr, {}};
    }

    on_path_.insert(key);
    Node node{is_top ? EventKind::kTop : EventKind::kIntermediate, label, std::nullopt,
              GateKind::kOr, {}};
    if (causes.empty()) {
      node.kids.push_back(Node{EventKind::kUndeveloped, label, std::nullopt, GateKind::kOr, {}});
    } else if (causes.size() == 1) {
      const Cause& c = causes.front();
      node.gate = c.kind == Cause::kTransformation ? GateKind::kAnd : GateKind::kOr;
      add_cause(node, c, /*nested=*/false, label);
    } else {
      node.gate = GateKind::kOr;
      for (const auto& c : causes) add_cause(node, c, /*nested=*/true, label);
    }
    on_path_.erase(key);
    return node;
  }

  std::vector<std::string> diagnostics;

 private:
  void add_cause(Node& parent, const Cause& c, bool nested, const Label& label) {
    switch (c.kind) {
      case Cause::kLeaf:
        parent.kids.push_back(Node{c.leaf_kind, c.leaf, std::nullopt, GateKind::kOr, {}});
        break;
      case Cause::kPropagation:
        for (const auto& [p, f] : c.children) parent.kids.push_back(expand(p, f, false));
        break;
      case Cause::kTransformation: {
        Node* target = &parent;
        Node inner{EventKind::kIntermediate, label, std::nullopt, GateKind::kAnd, {}};
        if (nested) target = &inner;
        for (const auto& [p, f] : c.children) target->kids.push_back(expand(p, f, false));
        if (nested) parent.kids.push_back(std::move(inner));
        break;
      }
    }
  }

  std::vector<Cause> causes_of(const PortRef& port, FailureType f) const {
    std::vector<Cause> causes;
    if (auto it = fla_.injected.find(port); it != fla_.injected.end() && it->second.contains(f)) {
      causes.push_back(Cause{Cause::kLeaf, EventKind::kExternal,
                             Label{port.component, port.port, f}, {}});
    }
    const Port* p = flat_.find_port(port);
    if (p == nullptr) throw AnalysisError("unknown port '" + port.str() + "'");
    if (p->direction == Direction::kInput) {
      for (const auto& conn : flat_.connections) {
        if (conn.to == port && fla_.tokens.at(conn.from).contains(f))
          causes.push_back(Cause{Cause::kPropagation, EventKind::kBasic, {}, {{conn.from, f}}});
      }
      return causes;
    }
    for (std::size_t ri = 0; ri < fla_.rules.size(); ++ri) {
      if (fired_rules_.count(ri) == 0) continue;
      const auto& rule = fla_.rules[ri];
      if (rule.component != port.component) continue;
      const bool produces = std::any_of(rule.rhs.begin(), rule.rhs.end(), [&](const RuleTerm& t) {
        return t.port == port.port && t.failure == f;
      });
      if (!produces) continue;
      Cause c;
      for (const auto& t : rule.lhs) {
        if (is_concrete(t.failure)) c.children.emplace_back(PortRef{rule.component, t.port}, t.failure);
      }
      if (c.children.empty()) {
        c.kind = Cause::kLeaf;
        c.leaf_kind = EventKind::kBasic;
        c.leaf = Label{port.component, port.port, f};
      } else if (rule.rule_class == RuleClass::kPropagation) {
        c.kind = Cause::kPropagation;
      } else {
        c.kind = Cause::kTransformation;
      }
      const bool duplicate = std::any_of(causes.begin(), causes.end(), [&](const Cause& o) {
        return o.kind == c.kind && o.leaf == c.leaf && o.children == c.children;
      });
      if (!duplicate) causes.push_back(std::move(c));
    }
    return causes;
  }

  const SystemModel& flat_;
  const FlaResult& fla_;
  std::set<std::size_t> fired_rules_;
  std::set<std::pair<PortRef, FailureType>> on_path_;
};

}  // namespace

std::vector<FaultTree> generate_fault_trees(const SystemModel& flat, const FlaResult& fla,
                                            const PortRef& target,
                                            std::optional<FailureType> only) {
  const FailureSet reachable = reachable_failures(fla, target);
  std::vector<FailureType> failures;
  if (only) {
    if (!reachable.contains(*only))
      throw AnalysisError("failure '" + std::string(fptc::to_string(*only)) +
                          "' does not reach '" + target.str() + "'");
    failures.push_back(*only);
  } else {
    failures = reachable.members();
  }
  std::vector<FaultTree> trees;
  for (const FailureType f : failures) {
    Generator gen(flat, fla);
    Node root = gen.expand(target, f, /*is_top=*/true);
    FaultTree t = from_node(root, target, f);
    t.diagnostics = std::move(gen.diagnostics);
    trees.push_back(std::move(t));
  }
  return trees;
}

// ---------------------------------------------------------------------------
// Qualitative reduction

namespace {

bool same_leaf(const Node& a, const Node& b) {
  return a.is_leaf() && b.is_leaf() && a.kind == b.kind && a.label == b.label &&
         a.probability == b.probability;
}

Node reduce(const Node& n, bool is_root) {
  if (n.is_leaf()) return n;
  Node out = n;
  out.kids.clear();
  for (const auto& k : n.kids) {
    Node r = reduce(k, false);
    if (out.gate == GateKind::kOr && !r.is_leaf() && r.gate == GateKind::kOr) {
      for (auto& gk : r.kids) out.kids.push_back(std::move(gk));
    } else {
      out.kids.push_back(std::move(r));
    }
  }
  std::vector<Node> unique;
  for (auto& k : out.kids) {
    const bool dup = std::any_of(unique.begin(), unique.end(),
                                 [&](const Node& u) { return same_leaf(u, k); });
    if (!dup) unique.push_back(std::move(k));
  }
  out.kids = std::move(unique);
  if (!is_root && out.kids.size() == 1) return out.kids.front();
  return out;
}

}  // namespace

FaultTree qualitative_reduce(const FaultTree& t) {
  FaultTree out = from_node(reduce(to_node(t, t.root), true), t.target_port, t.target_failure);
  out.diagnostics = t.diagnostics;
  return out;
}

// ---------------------------------------------------------------------------
// Cut sets and evaluation

namespace {

CutSetFamily minimize(const CutSetFamily& family) {
  CutSetFamily out;
  for (const auto& s : family) {
    const bool absorbed = std::any_of(family.begin(), family.end(), [&](const CutSet& o) {
      return o.size() < s.size() && std::includes(s.begin(), s.end(), o.begin(), o.end());
    });
    if (!absorbed) out.insert(s);
  }
  return out;
}

CutSetFamily cut_sets_of(const FaultTree& t, int id) {
  const Event& e = t.event(id);
  if (e.is_leaf()) return CutSetFamily{CutSet{e.label}};
  const Gate* g = t.gate_for(id);
  if (g == nullptr) throw AnalysisError("event " + std::to_string(id) + " has no gate");
  if (g->kind == GateKind::kOr) {
    CutSetFamily all;
    for (int in : g->inputs) {
      for (auto& s : cut_sets_of(t, in)) all.insert(std::move(s));
    }
    return minimize(all);
  }
  CutSetFamily acc{CutSet{}};
  for (int in : g->inputs) {
    const CutSetFamily child = cut_sets_of(t, in);
    CutSetFamily next;
    for (const auto& a : acc) {
      for (const auto& b : child) {
        CutSet u = a;
        u.insert(b.begin(), b.end());
        next.insert(std::move(u));
      }
    }
    acc = minimize(next);
  }
  return acc;
}

}  // namespace

CutSetFamily minimal_cut_sets(const FaultTree& t) { return cut_sets_of(t, t.root); }

bool evaluate(const FaultTree& t, const std::set<Label>& occurs) {
  std::function<bool(int)> eval = [&](int id) {
    const Event& e = t.event(id);
    if (e.is_leaf()) return occurs.count(e.label) != 0;
    const Gate* g = t.gate_for(id);
    if (g->kind == GateKind::kAnd)
      return std::all_of(g->inputs.begin(), g->inputs.end(), eval);
    return std::any_of(g->inputs.begin(), g->inputs.end(), eval);
  };
  return eval(t.root);
}

// ---------------------------------------------------------------------------
// Quantification

namespace {

constexpr std::size_t kMaxInclusionExclusionCutSets = 24;

}  // namespace

Quantification quantify(const FaultTree& t, const ProbabilityMap& probabilities) {
  Quantification q;
  std::map<Label, double> p;
  std::map<Label, int> occurrences;
  std::set<EventKind> assumed_kinds;
  for (const Event* leaf : t.leaves()) {
    ++occurrences[leaf->label];
    double value = 0.0;
    if (auto it = probabilities.find(leaf->label.str()); it != probabilities.end()) {
      value = it->second;
    } else if (leaf->probability) {
      value = *leaf->probability;
    } else {
      throw AnalysisError("missing probability for " + std::string(to_string(leaf->kind)) +
                          " event '" + leaf->label.str() + "'");
    }
    if (value < 0.0 || value > 1.0)
      throw AnalysisError("probability for '" + leaf->label.str() + "' outside [0,1]");
    p[leaf->label] = value;
    if (leaf->kind != EventKind::kBasic) assumed_kinds.insert(leaf->kind);
  }
  for (const EventKind k : assumed_kinds) {
    q.notes.push_back("probabilities of " + std::string(to_string(k)) +
                      " events are user-supplied assumptions");
  }

  const bool shared = std::any_of(occurrences.begin(), occurrences.end(),
                                  [](const auto& kv) { return kv.second > 1; });
  if (!shared) {
    std::function<double(int)> prob = [&](int id) -> double {
      const Event& e = t.event(id);
      if (e.is_leaf()) return p.at(e.label);
      const Gate* g = t.gate_for(id);
      if (g->kind == GateKind::kAnd) {
        double acc = 1.0;
        for (int in : g->inputs) acc *= prob(in);
        return acc;
      }
      double none = 1.0;
      for (int in : g->inputs) none *= 1.0 - prob(in);
      return 1.0 - none;
    };
    q.method = QuantMethod::kBottomUp;
    q.probability = prob(t.root);
    return q;
  }

  q.method = QuantMethod::kCutSetInclusionExclusion;
  q.notes.push_back("repeated basic events: exact cut-set inclusion-exclusion used");
  const CutSetFamily family = minimal_cut_sets(t);
  if (family.size() > kMaxInclusionExclusionCutSets)
    throw AnalysisError("too many minimal cut sets (" + std::to_string(family.size()) +
                        ") for exact inclusion-exclusion");
  std::vector<Label> labels;
  for (const auto& [l, _] : p) labels.push_back(l);
  if (labels.size() > 64) throw AnalysisError("too many distinct events for exact quantification");
  auto bit = [&](const Label& l) {
    return static_cast<std::uint64_t>(1)
           << (std::lower_bound(labels.begin(), labels.end(), l) - labels.begin());
  };
  std::vector<std::uint64_t> masks;
  for (const auto& cs : family) {
    std::uint64_t m = 0;
    for (const auto& l : cs) m |= bit(l);
    masks.push_back(m);
  }
  auto product = [&](std::uint64_t m) {
    double acc = 1.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if ((m >> i) & 1U) acc *= p.at(labels[i]);
    }
    return acc;
  };
  double total = 0.0;
  std::function<void(std::size_t, std::uint64_t, int)> walk = [&](std::size_t next,
                                                                   std::uint64_t acc,
                                                                   int depth) {
    for (std::size_t i = next; i < masks.size(); ++i) {
      const std::uint64_t u = acc | masks[i];
      total += (depth % 2 == 0 ? 1.0 : -1.0) * product(u);
      walk(i + 1, u, depth + 1);
    }
  };
  walk(0, 0, 0);
  q.probability = std::clamp(total, 0.0, 1.0);
  return q;
}

ProbabilityMap load_probabilities(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open probability file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(path + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw Error(path + ": expected an object of label -> probability");
  ProbabilityMap out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw Error(path + ": probability for '" + k + "' is not a number");
    out[k] = v.get<double>();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Export

nlohmann::ordered_json tree_to_json(const FaultTree& t) {
  nlohmann::ordered_json j;
  j["target"] = {{"port", t.target_port.str()},
                 {"failure", std::string(fptc::to_string(t.target_failure))}};
  j["root"] = t.root;
  auto events = nlohmann::ordered_json::array();
  for (const auto& e : t.events) {
    nlohmann::ordered_json ej;
    ej["id"] = e.id;
    ej["kind"] = std::string(to_string(e.kind));
    ej["component"] = e.label.component;
    ej["port"] = e.label.port;
    ej["failure"] = std::string(fptc::to_string(e.label.failure));
    if (e.probability) ej["probability"] = *e.probability;
    events.push_back(std::move(ej));
  }
  j["events"] = std::move(events);
  auto gates = nlohmann::ordered_json::array();
  for (const auto& g : t.gates) {
    gates.push_back({{"kind", std::string(to_string(g.kind))},
                     {"output", g.output},
                     {"inputs", g.inputs}});
  }
  j["gates"] = std::move(gates);
  j["diagnostics"] = t.diagnostics;
  return j;
}

namespace {

EventKind event_kind_from(const std::string& s) {
  for (auto k : {EventKind::kTop, EventKind::kIntermediate, EventKind::kBasic,
                 EventKind::kExternal, EventKind::kUndeveloped}) {
    if (to_string(k) == s) return k;
  }
  throw AnalysisError("unknown event kind '" + s + "'");
}

}  // namespace

FaultTree tree_from_json(const nlohmann::json& j) {
  try {
    FaultTree t;
    t.target_port = PortRef::parse(j.at("target").at("port").get<std::string>());
    t.target_failure = failure_from_string(j.at("target").at("failure").get<std::string>());
    t.root = j.at("root").get<int>();
    for (const auto& ej : j.at("events")) {
      Event e;
      e.id = ej.at("id").get<int>();
      e.kind = event_kind_from(ej.at("kind").get<std::string>());
      e.label = Label{ej.at("component").get<std::string>(), ej.at("port").get<std::string>(),
                      failure_from_string(ej.at("failure").get<std::string>())};
      if (ej.contains("probability")) e.probability = ej.at("probability").get<double>();
      t.events.push_back(std::move(e));
    }
    for (const auto& gj : j.at("gates")) {
      const auto kind = gj.at("kind").get<std::string>();
      if (kind != "AND" && kind != "OR") throw AnalysisError("unknown gate kind '" + kind + "'");
      t.gates.push_back(Gate{kind == "AND" ? GateKind::kAnd : GateKind::kOr,
                             gj.at("output").get<int>(), gj.at("inputs").get<std::vector<int>>()});
    }
    if (j.contains("diagnostics")) t.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
    check_tree(t);
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw AnalysisError(std::string("malformed fault-tree JSON: ") + e.what());
  }
}

FaultTree import_tree(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text.begin(), json_text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw AnalysisError(std::string("malformed fault-tree JSON: ") + e.what());
  }
  return tree_from_json(j);
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string_view event_shape(EventKind k) {
  switch (k) {
    case EventKind::kTop: return "shape=box, style=bold";
    case EventKind::kIntermediate: return "shape=box";
    case EventKind::kBasic: return "shape=circle";
    case EventKind::kExternal: return "shape=house";
    case EventKind::kUndeveloped: return "shape=diamond";
  }
  return "shape=box";
}

}  // namespace

std::string export_tree(const FaultTree& t, ExportFormat format) {
  if (format == ExportFormat::kJson) return tree_to_json(t).dump(2) + "\n";
  std::ostringstream os;
  os << "digraph \"" << dot_escape(t.target_port.str() + "." +
                                    std::string(fptc::to_string(t.target_failure)))
     << "\" {\n  rankdir=TB;\n";
  for (const auto& e : t.events) {
    os << "  e" << e.id << " [label=\"" << dot_escape(e.label.component + "." + e.label.port)
       << "\\n" << fptc::to_string(e.label.failure) << "\\n(" << to_string(e.kind) << ")";
    if (e.probability) os << "\\np=" << *e.probability;
    os << "\", " << event_shape(e.kind) << "];\n";
  }
  for (std::size_t i = 0; i < t.gates.size(); ++i) {
    const auto& g = t.gates[i];
    os << "  g" << i << " [label=\"" << to_string(g.kind) << "\", shape="
       << (g.kind == GateKind::kAnd ? "invhouse" : "invtriangle") << "];\n";
    os << "  e" << g.output << " -> g" << i << ";\n";
    for (int in : g.inputs) os << "  g" << i << " -> e" << in << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace fptc::ft
