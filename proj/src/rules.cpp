#include "fptc/rules.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "fptc/errors.hpp"

namespace fptc {

std::string_view to_string(RuleClass c) noexcept {
  switch (c) {
    case RuleClass::kPropagation: return "propagation";
    case RuleClass::kTransformation: return "transformation";
    case RuleClass::kSource: return "source";
    case RuleClass::kSink: return "sink";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Parser: rule := terms "->" terms ";"? ; terms := term ("," term)* ;
//         term := IDENT "." failure

namespace {

class RuleLexer {
 public:
  RuleLexer(std::string_view line, std::size_t line_no)
      : line_(line), line_no_(line_no) {}

  std::vector<FptcRule> parse_line() {
    skip_space();
    if (at_end()) return {};
    FptcRule rule;
    rule.lhs = parse_terms("left-hand side");
    skip_space();
    if (!consume("->")) fail("expected '->'");
    rule.rhs = parse_terms("right-hand side");
    skip_space();
    consume(";");
    skip_space();
    if (!at_end()) fail("unexpected trailing text");
    for (const auto& t : rule.rhs) {
      if (t.failure == FailureType::kWildcard)
        fail("wildcard is not allowed on the right-hand side");
    }
    check_unique(rule.lhs, "left-hand side");
    check_unique(rule.rhs, "right-hand side");
    return {std::move(rule)};
  }

 private:
  std::vector<RuleTerm> parse_terms(const char* side) {
    std::vector<RuleTerm> terms;
    skip_space();
    if (at_end() || peek() == ';' || peek() == '-')
      fail(std::string("empty ") + side);
    terms.push_back(parse_term());
    skip_space();
    while (consume(",")) {
      terms.push_back(parse_term());
      skip_space();
    }
    return terms;
  }

  RuleTerm parse_term() {
    skip_space();
    const std::size_t start = pos_;
    while (!at_end() && is_ident_char(peek())) ++pos_;
    const std::string_view word = line_.substr(start, pos_ - start);
    // A term ends with ".*" for the wildcard.
    std::string text(word);
    if (!at_end() && peek() == '*' && !text.empty() && text.back() == '.') {
      ++pos_;
      text += '*';
    }
    const auto dot = text.rfind('.');
    if (text.empty()) fail("expected a port.failure term");
    if (dot == std::string::npos || dot == 0 || dot + 1 == text.size()) {
      column_ = start;
      fail("term '" + text + "' must have the form port.failure");
    }
    const auto failure = parse_failure(std::string_view(text).substr(dot + 1));
    if (!failure) {
      column_ = start + dot + 1;
      fail("unknown failure type '" + text.substr(dot + 1) + "'");
    }
    return RuleTerm{text.substr(0, dot), *failure};
  }

  void check_unique(const std::vector<RuleTerm>& terms, const char* side) {
    std::set<std::string> seen;
    for (const auto& t : terms) {
      if (!seen.insert(t.port).second) {
        column_ = 0;
        fail("port '" + t.port + "' repeated on the " + side);
      }
    }
  }

  static bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  }
  bool at_end() const { return pos_ >= line_.size(); }
  char peek() const { return line_[pos_]; }
  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool consume(std::string_view token) {
    if (line_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) {
    const std::size_t col = (column_ == std::string::npos ? pos_ : column_) + 1;
    throw ParseError("rule syntax error: " + what, line_no_, col);
  }

  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
  std::size_t column_ = std::string::npos;
};

}  // namespace

std::vector<FptcRule> parse_rules(std::string_view text) {
  std::vector<FptcRule> rules;
  std::size_t line_no = 0;
  while (!text.empty() || line_no == 0) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    for (auto& r : RuleLexer(line, line_no).parse_line()) rules.push_back(std::move(r));
    if (text.empty()) break;
  }
  return rules;
}

std::vector<FptcRule> parse_rules_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open rules file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_rules(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line(), e.column());
  }
}

std::string render_rule(const FptcRule& rule) {
  std::string out;
  auto side = [&out](const std::vector<RuleTerm>& terms) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (i != 0) out += ", ";
      out += terms[i].port;
      out += '.';
      out += to_string(terms[i].failure);
    }
  };
  side(rule.lhs);
  out += " -> ";
  side(rule.rhs);
  out += ';';
  return out;
}

std::string render_rules(const std::vector<FptcRule>& rules) {
  std::string out;
  for (const auto& r : rules) {
    out += render_rule(r);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Binding

FptcRule BoundRule::as_rule() const { return FptcRule{component, lhs, rhs}; }

std::vector<const BoundRule*> BoundRuleSet::for_component(
    std::string_view component) const {
  std::vector<const BoundRule*> out;
  for (const auto& r : rules) {
    if (r.component == component) out.push_back(&r);
  }
  return out;
}

namespace {

struct Resolved {
  std::string component;
  const Component* comp = nullptr;
  const Port* port = nullptr;
};

Resolved resolve_term(const std::string& ref, const SystemModel& m,
                      const std::string& default_owner) {
  const auto dot = ref.rfind('.');
  if (dot != std::string::npos) {
    const std::string comp_name = ref.substr(0, dot);
    const std::string port_name = ref.substr(dot + 1);
    const Component* c = m.find_component(comp_name);
    if (c == nullptr) throw BindError("unknown component '" + comp_name + "' in term '" + ref + "'");
    if (c->kind == ComponentKind::kComposite)
      throw BindError("rule attached to composite component '" + comp_name +
                      "': composites have no failure behavior of their own");
    const Port* p = c->find_port(port_name);
    if (p == nullptr) throw BindError("unknown port '" + ref + "'");
    return {comp_name, c, p};
  }
  if (!default_owner.empty()) {
    const Component* c = m.find_component(default_owner);
    if (c != nullptr) {
      if (const Port* p = c->find_port(ref)) return {default_owner, c, p};
    }
  }
  std::vector<Resolved> hits;
  for (const auto& [path, comp] : m.simple_components()) {
    if (const Port* p = comp->find_port(ref)) hits.push_back({path, comp, p});
  }
  if (hits.empty()) {
    // Give the composite error precedence when the name is a boundary port.
    std::function<bool(const std::vector<Component>&)> on_composite =
        [&](const std::vector<Component>& level) {
          for (const auto& c : level) {
            if (c.kind == ComponentKind::kComposite &&
                (c.find_port(ref) != nullptr || on_composite(c.children)))
              return true;
          }
          return false;
        };
    if (on_composite(m.components))
      throw BindError("rule term '" + ref +
                      "' names a composite component's port; composites have "
                      "no failure behavior of their own");
    throw BindError("unknown port '" + ref + "'");
  }
  if (hits.size() > 1)
    throw BindError("ambiguous port '" + ref + "'; qualify it as Component.port");
  return hits.front();
}

BoundRule bind_one(const FptcRule& rule, const SystemModel& m,
                   const std::string& default_owner) {
  BoundRule bound;
  std::string owner = rule.owner.empty() ? default_owner : rule.owner;
  auto bind_side = [&](const std::vector<RuleTerm>& terms, Direction expected,
                       std::vector<RuleTerm>& out) {
    for (const auto& t : terms) {
      const Resolved r =
          resolve_term(t.port, m, bound.component.empty() ? owner : bound.component);
      if (bound.component.empty()) {
        bound.component = r.component;
      } else if (bound.component != r.component) {
        throw BindError("rule '" + render_rule(rule) + "' spans components '" +
                        bound.component + "' and '" + r.component + "'");
      }
      if (r.port->direction != expected) {
        throw BindError("direction mismatch in rule '" + render_rule(rule) +
                        "': port '" + t.port + "' is an " +
                        std::string(to_string(r.port->direction)) +
                        " port but appears on the " +
                        (expected == Direction::kInput ? "left" : "right") +
                        "-hand side");
      }
      if (expected == Direction::kOutput && t.failure == FailureType::kWildcard)
        throw BindError("wildcard cannot appear on the right-hand side of '" +
                        render_rule(rule) + "'");
      out.push_back(RuleTerm{r.port->name, t.failure});
    }
  };
  bind_side(rule.lhs, Direction::kInput, bound.lhs);
  bind_side(rule.rhs, Direction::kOutput, bound.rhs);
  bound.rule_class = classify_rule(bound.lhs, bound.rhs);
  return bound;
}

}  // namespace

BoundRuleSet bind_rules(const std::vector<FptcRule>& rules, const SystemModel& m) {
  BoundRuleSet out;
  for (const auto& r : rules) out.rules.push_back(bind_one(r, m, r.owner));
  return out;
}

BoundRuleSet bind_model_rules(const SystemModel& m) {
  BoundRuleSet out;
  std::function<void(const Component&, const std::string&)> walk =
      [&](const Component& c, const std::string& path) {
        if (!c.rules.empty()) {
          if (c.kind == ComponentKind::kComposite)
            throw BindError("rule attached to composite component '" + path + "'");
          std::string text;
          for (const auto& r : c.rules) text += r + "\n";
          for (auto& rule : parse_rules(text)) {
            rule.owner = path;
            out.rules.push_back(bind_one(rule, m, path));
          }
        }
        for (const auto& child : c.children) walk(child, path + "." + child.name);
      };
  // Flattened models carry dotted names at top level.
  for (const auto& c : m.components) walk(c, c.name);
  return out;
}

BoundRuleSet merge(BoundRuleSet base, const BoundRuleSet& extra) {
  base.rules.insert(base.rules.end(), extra.rules.begin(), extra.rules.end());
  return base;
}

// ---------------------------------------------------------------------------
// Classification

RuleClass classify_rule(const std::vector<RuleTerm>& lhs,
                        const std::vector<RuleTerm>& rhs) {
  auto is_nf = [](const RuleTerm& t) { return t.failure == FailureType::kNoFailure; };
  const bool lhs_quiet = std::all_of(lhs.begin(), lhs.end(), [](const RuleTerm& t) {
    return t.failure == FailureType::kNoFailure || t.failure == FailureType::kWildcard;
  });
  const bool rhs_all_nf = std::all_of(rhs.begin(), rhs.end(), is_nf);
  if (lhs_quiet && !rhs_all_nf) return RuleClass::kSource;
  if (rhs_all_nf) return RuleClass::kSink;
  if (lhs.size() == 1 &&
      std::all_of(rhs.begin(), rhs.end(), [&](const RuleTerm& t) {
        return t.failure == lhs.front().failure;
      }))
    return RuleClass::kPropagation;
  return RuleClass::kTransformation;
}

std::vector<std::string> lint_rule(const FptcRule& rule) {
  std::vector<std::string> warnings;
  auto all = [](const std::vector<RuleTerm>& ts, FailureType f) {
    return std::all_of(ts.begin(), ts.end(),
                       [f](const RuleTerm& t) { return t.failure == f; });
  };
  if (all(rule.lhs, FailureType::kNoFailure) && all(rule.rhs, FailureType::kNoFailure))
    warnings.push_back("rule '" + render_rule(rule) +
                       "' is a no-op (noFailure -> noFailure), classified as sink");
  for (const auto& t : rule.rhs) {
    if (t.failure == FailureType::kWildcard)
      warnings.push_back("wildcard on the right-hand side of '" + render_rule(rule) + "'");
  }
  return warnings;
}

}  // namespace fptc
