#include "axv/model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "axv/text.hpp"
#include "dsl_lexer.hpp"

namespace axv {

const BehaviorSpec* AutonomyModel::find(std::string_view behavior_id) const {
  for (const auto& b : behaviors)
    if (b.id == behavior_id) return &b;
  return nullptr;
}

namespace {

using detail::Tok;
using detail::TokenStream;

TemplateText parse_template(TokenStream& ts) {
  const detail::Token& t = ts.expect(Tok::String, "string");
  try {
    return TemplateText(t.text);
  } catch (const TemplateError& e) {
    SourcePos pos = t.pos;
    pos.column += 1 + static_cast<int>(e.offset());
    throw ParseError(pos, e.what());
  }
}

double parse_prior(TokenStream& ts) {
  if (!ts.at(Tok::LBracket)) return kDefaultPrior;
  ts.next();
  ts.expect_keyword("prior");
  double p = ts.expect(Tok::Number, "prior probability").number;
  ts.expect(Tok::RBracket, "']'");
  return p;
}

TreeNode parse_node(TokenStream& ts) {
  if (ts.at_keyword("null")) {
    ts.next();
    return TreeNode{NullLeaf{}};
  }
  if (ts.at_keyword("reason")) {
    ts.next();
    std::string id = ts.expect(Tok::Ident, "reason identifier").text;
    return TreeNode{ReasonLeaf{std::move(id), parse_template(ts)}};
  }
  if (ts.at_keyword("if")) {
    ts.next();
    Condition cond = detail::parse_condition_expr(ts);
    double prior = parse_prior(ts);
    ts.expect(Tok::LBrace, "'{'");
    TreeNode when_true = parse_node(ts);
    ts.expect(Tok::RBrace, "'}'");
    ts.expect_keyword("else");
    ts.expect(Tok::LBrace, "'{'");
    TreeNode when_false = parse_node(ts);
    ts.expect(Tok::RBrace, "'}'");
    return TreeNode{DecisionNode{std::move(cond), prior, std::move(when_true), std::move(when_false)}};
  }
  ts.fail("'if', 'reason' or 'null'");
}

BehaviorSpec parse_behavior(TokenStream& ts) {
  ts.expect_keyword("behavior");
  BehaviorSpec b{.id = ts.expect(Tok::Ident, "behavior identifier").text,
                 .aliases = {},
                 .guards = {},
                 .tree = TreeNode{NullLeaf{}}};
  ts.expect(Tok::LBrace, "'{'");
  for (;;) {
    if (ts.at_keyword("alias")) {
      ts.next();
      b.aliases.push_back(ts.expect(Tok::String, "alias string").text);
      while (ts.at(Tok::Comma)) {
        ts.next();
        b.aliases.push_back(ts.expect(Tok::String, "alias string").text);
      }
    } else if (ts.at_keyword("guard")) {
      ts.next();
      GuardConstraint g{.condition = detail::parse_condition_expr(ts), .prior_true = kDefaultPrior,
                        .explain = {}};
      g.prior_true = parse_prior(ts);
      ts.expect_keyword("explain");
      g.explain = parse_template(ts);
      b.guards.push_back(std::move(g));
    } else {
      break;
    }
  }
  if (!ts.at_keyword("tree")) ts.fail("'alias', 'guard' or 'tree'");
  ts.next();
  ts.expect(Tok::LBrace, "'{'");
  b.tree = parse_node(ts);
  ts.expect(Tok::RBrace, "'}'");
  ts.expect(Tok::RBrace, "'}'");
  return b;
}

std::string alias_key(const std::string& alias) { return join(normalize(alias), " "); }

}  // namespace

AutonomyModel parse_model(std::string_view source) {
  TokenStream ts(detail::tokenize(source));
  AutonomyModel model;
  while (!ts.at(Tok::End)) {
    if (!ts.at_keyword("behavior")) ts.fail("'behavior'");
    model.behaviors.push_back(parse_behavior(ts));
  }

  std::set<std::string> ids;
  std::map<std::string, std::string> alias_owner;
  for (const auto& b : model.behaviors) {
    if (!ids.insert(b.id).second) throw ModelError("duplicate behavior id '" + b.id + "'");
    for (const auto& alias : b.aliases) {
      auto [it, inserted] = alias_owner.emplace(alias_key(alias), b.id);
      if (!inserted && it->second != b.id) {
        throw ModelError("alias \"" + alias + "\" is shared by behaviors '" + it->second +
                         "' and '" + b.id + "'");
      }
    }
  }
  return model;
}

// ---- serialization ----

namespace {

std::string quoted(const std::string& s) { return to_source(Operand{TextLit{s}}); }

std::string prior_suffix(double p) {
  return p == kDefaultPrior ? "" : " [prior " + format_number(p) + "]";
}

void write_node(std::ostringstream& out, const TreeNode& n, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, NullLeaf>) {
          out << pad << "null\n";
        } else if constexpr (std::is_same_v<T, ReasonLeaf>) {
          out << pad << "reason " << node.reason_id << " " << quoted(node.text.source()) << "\n";
        } else {
          out << pad << "if " << to_source(node.condition) << prior_suffix(node.prior_true)
              << " {\n";
          write_node(out, *node.true_child, indent + 1);
          out << pad << "} else {\n";
          write_node(out, *node.false_child, indent + 1);
          out << pad << "}\n";
        }
      },
      n.node);
}

}  // namespace

std::string serialize_model(const AutonomyModel& model) {
  std::ostringstream out;
  for (std::size_t i = 0; i < model.behaviors.size(); ++i) {
    const auto& b = model.behaviors[i];
    if (i != 0) out << "\n";
    out << "behavior " << b.id << " {\n";
    if (!b.aliases.empty()) {
      out << "  alias ";
      for (std::size_t a = 0; a < b.aliases.size(); ++a)
        out << (a != 0 ? ", " : "") << quoted(b.aliases[a]);
      out << "\n";
    }
    for (const auto& g : b.guards) {
      out << "  guard " << to_source(g.condition) << prior_suffix(g.prior_true) << " explain "
          << quoted(g.explain.source()) << "\n";
    }
    out << "  tree {\n";
    write_node(out, b.tree, 2);
    out << "  }\n}\n";
  }
  return out.str();
}

// ---- validation ----

namespace {

const std::set<std::string>& standard_event_kinds() {
  static const std::set<std::string> kinds = {"telemetry",   "gps_fix",     "surfaced",
                                              "dived",       "zone_entered", "zone_exited",
                                              "phase_change", "fault",      "custom"};
  return kinds;
}

struct Vocabulary {
  std::set<std::string> vars = {"phase", "zone"};
  std::set<std::string> event_kinds = standard_event_kinds();

  void add(const Condition& c) {
    std::vector<std::string> v, k;
    collect_variables(c, v);
    collect_event_kinds(c, k);
    vars.insert(v.begin(), v.end());
    event_kinds.insert(k.begin(), k.end());
  }
};

void gather_vocabulary(const TreeNode& n, Vocabulary& vocab) {
  if (const auto* d = std::get_if<DecisionNode>(&n.node)) {
    vocab.add(d->condition);
    gather_vocabulary(*d->true_child, vocab);
    gather_vocabulary(*d->false_child, vocab);
  }
}

bool prior_in_range(double p) { return p > 0.0 && p < 1.0; }

class BehaviorValidator {
 public:
  BehaviorValidator(const BehaviorSpec& b, const Vocabulary& vocab, std::vector<Diagnostic>& out)
      : b_(b), vocab_(vocab), out_(out) {}

  void run() {
    for (std::size_t i = 0; i < b_.guards.size(); ++i) {
      const auto& g = b_.guards[i];
      std::string where = "guard " + std::to_string(i + 1);
      if (!prior_in_range(g.prior_true))
        report(Severity::Error, "prior-range",
               where + ": prior " + format_number(g.prior_true) + " is outside (0, 1)");
      if (g.explain.empty())
        report(Severity::Error, "empty-explain", where + ": explain text is empty");
      check_slots(g.explain, where);
    }
    walk(b_.tree, "root");
    if (count_reason_leaves(b_.tree) == 0)
      report(Severity::Error, "no-reason", "tree has no reason leaf");
    for (const auto& [cond, paths] : conditions_) {
      if (paths.size() > 1) {
        report(Severity::Error, "duplicate-condition",
               "condition `" + cond + "` appears at " + join(paths, " and "));
      }
    }
  }

 private:
  void walk(const TreeNode& n, const std::string& path) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, DecisionNode>) {
            std::string key = to_source(node.condition);
            auto it = std::find_if(conditions_.begin(), conditions_.end(),
                                   [&](const auto& e) { return e.first == key; });
            if (it == conditions_.end())
              conditions_.emplace_back(key, std::vector<std::string>{path});
            else
              it->second.push_back(path);
            if (!prior_in_range(node.prior_true))
              report(Severity::Error, "prior-range",
                     "node " + path + ": prior " + format_number(node.prior_true) +
                         " is outside (0, 1)");
            walk(*node.true_child, path + ".T");
            walk(*node.false_child, path + ".F");
          } else if constexpr (std::is_same_v<T, ReasonLeaf>) {
            check_slots(node.text, "reason " + node.reason_id);
          }
        },
        n.node);
  }

  void check_slots(const TemplateText& t, const std::string& where) {
    for (const auto& seg : t.segments()) {
      if (const auto* v = std::get_if<VarSlot>(&seg); v && !vocab_.vars.contains(v->name)) {
        report(Severity::Warning, "unknown-slot",
               where + ": slot {" + v->name + "} names a variable no condition references");
      }
      if (const auto* e = std::get_if<ElapsedSlot>(&seg);
          e && !vocab_.event_kinds.contains(e->event_kind)) {
        report(Severity::Warning, "unknown-slot",
               where + ": slot {elapsed_since(" + e->event_kind + ")} names an unknown event kind");
      }
    }
  }

  void report(Severity s, std::string code, std::string message) {
    out_.push_back(Diagnostic{s, std::move(code), b_.id, std::move(message)});
  }

  const BehaviorSpec& b_;
  const Vocabulary& vocab_;
  std::vector<Diagnostic>& out_;
  // Structural identity is decided on canonical source text, which is
  // injective over parsed ASTs.
  std::vector<std::pair<std::string, std::vector<std::string>>> conditions_;
};

}  // namespace

std::vector<Diagnostic> validate_model(const AutonomyModel& model) {
  Vocabulary vocab;
  for (const auto& b : model.behaviors) {
    for (const auto& g : b.guards) vocab.add(g.condition);
    gather_vocabulary(b.tree, vocab);
  }
  std::vector<Diagnostic> out;
  for (const auto& b : model.behaviors) BehaviorValidator(b, vocab, out).run();
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string to_string(const Diagnostic& d) {
  return std::string(d.severity == Severity::Error ? "error" : "warning") + " [" + d.code + "] " +
         d.behavior + ": " + d.message;
}

const ReasonLeaf* find_reason_leaf(const TreeNode& tree, std::string_view reason_id) {
  if (const auto* r = std::get_if<ReasonLeaf>(&tree.node))
    return r->reason_id == reason_id ? r : nullptr;
  if (const auto* d = std::get_if<DecisionNode>(&tree.node)) {
    if (const auto* r = find_reason_leaf(*d->true_child, reason_id)) return r;
    return find_reason_leaf(*d->false_child, reason_id);
  }
  return nullptr;
}

std::size_t count_reason_leaves(const TreeNode& tree) {
  if (std::holds_alternative<ReasonLeaf>(tree.node)) return 1;
  if (const auto* d = std::get_if<DecisionNode>(&tree.node))
    return count_reason_leaves(*d->true_child) + count_reason_leaves(*d->false_child);
  return 0;
}

std::size_t tree_depth(const TreeNode& tree) {
  if (const auto* d = std::get_if<DecisionNode>(&tree.node))
    return 1 + std::max(tree_depth(*d->true_child), tree_depth(*d->false_child));
  return 0;
}

}  // namespace axv
