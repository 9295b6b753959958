#include "axv/condition.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

#include "dsl_lexer.hpp"

namespace axv {

ParseError::ParseError(SourcePos pos, const std::string& message)
    : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " +
                         message),
      pos_(pos),
      detail_(message) {}

double DurationLit::seconds() const {
  switch (unit) {
    case DurationUnit::Minutes: return amount * 60.0;
    case DurationUnit::Hours: return amount * 3600.0;
    case DurationUnit::Seconds: break;
  }
  return amount;
}

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
  }
  return "?";
}

Condition make_not(Condition c) { return Condition{Not{std::move(c)}}; }
Condition make_and(Condition a, Condition b) { return Condition{And{std::move(a), std::move(b)}}; }
Condition make_or(Condition a, Condition b) { return Condition{Or{std::move(a), std::move(b)}}; }

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  std::array<char, 400> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed);
  return std::string(buf.data(), res.ptr);
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto start = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(start) || s.front() == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
  });
}

namespace detail {
namespace {

CmpOp to_cmp(const std::string& s) {
  if (s == "<") return CmpOp::Lt;
  if (s == "<=") return CmpOp::Le;
  if (s == ">") return CmpOp::Gt;
  if (s == ">=") return CmpOp::Ge;
  if (s == "==") return CmpOp::Eq;
  return CmpOp::Ne;
}

Operand parse_operand(TokenStream& ts) {
  const Token& t = ts.peek();
  switch (t.kind) {
    case Tok::Ident: return VarRef{ts.next().text};
    case Tok::Number: return NumberLit{ts.next().number};
    case Tok::Duration: {
      const Token& d = ts.next();
      return DurationLit{d.number, static_cast<DurationUnit>(d.unit)};
    }
    case Tok::String: return TextLit{ts.next().text};
    case Tok::Keyword:
      if (t.text == "true" || t.text == "false") return BoolLit{ts.next().text == "true"};
      if (t.text == "elapsed_since") {
        ts.next();
        ts.expect(Tok::LParen, "'('");
        std::string kind = ts.expect(Tok::Ident, "event kind").text;
        ts.expect(Tok::RParen, "')'");
        return ElapsedSince{std::move(kind)};
      }
      break;
    default: break;
  }
  ts.fail("operand");
}

Condition parse_unary(TokenStream& ts) {
  if (ts.at_keyword("not")) {
    ts.next();
    return make_not(parse_unary(ts));
  }
  if (ts.at(Tok::LParen)) {
    ts.next();
    Condition inner = parse_condition_expr(ts);
    ts.expect(Tok::RParen, "')'");
    return inner;
  }
  if (ts.at_keyword("in_zone")) {
    ts.next();
    ts.expect(Tok::LParen, "'('");
    std::string zone = ts.expect(Tok::String, "zone name string").text;
    ts.expect(Tok::RParen, "')'");
    return Condition{InZone{std::move(zone)}};
  }
  if (ts.peek().kind == Tok::Ident && ts.peek().text == "phase" && ts.peek(1).kind == Tok::Op &&
      ts.peek(1).text == "==" && ts.peek(2).kind == Tok::String) {
    ts.next();
    ts.next();
    return Condition{PhaseIs{ts.next().text}};
  }
  Operand lhs = parse_operand(ts);
  if (!ts.at(Tok::Op)) ts.fail("comparison operator");
  CmpOp op = to_cmp(ts.next().text);
  Operand rhs = parse_operand(ts);
  return Condition{Compare{std::move(lhs), op, std::move(rhs)}};
}

Condition parse_and(TokenStream& ts) {
  Condition lhs = parse_unary(ts);
  while (ts.at_keyword("and")) {
    ts.next();
    lhs = make_and(std::move(lhs), parse_unary(ts));
  }
  return lhs;
}

}  // namespace

Condition parse_condition_expr(TokenStream& ts) {
  Condition lhs = parse_and(ts);
  while (ts.at_keyword("or")) {
    ts.next();
    lhs = make_or(std::move(lhs), parse_and(ts));
  }
  return lhs;
}

}  // namespace detail

Condition parse_condition(std::string_view source) {
  detail::TokenStream ts(detail::tokenize(source));
  Condition c = detail::parse_condition_expr(ts);
  if (!ts.at(detail::Tok::End)) ts.fail("end of condition");
  return c;
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

struct OperandPrinter {
  std::string operator()(const VarRef& v) const { return v.name; }
  std::string operator()(const NumberLit& n) const { return format_number(n.value); }
  std::string operator()(const DurationLit& d) const {
    return format_number(d.amount) + static_cast<char>(d.unit);
  }
  std::string operator()(const TextLit& t) const { return quote(t.value); }
  std::string operator()(const BoolLit& b) const { return b.value ? "true" : "false"; }
  std::string operator()(const ElapsedSince& e) const {
    return "elapsed_since(" + e.event_kind + ")";
  }
};

// Binding strength: or < and < unary.
int precedence(const Condition& c) {
  if (std::holds_alternative<Or>(c.node)) return 1;
  if (std::holds_alternative<And>(c.node)) return 2;
  return 3;
}

std::string print(const Condition& c, int min_prec);

std::string print_at(const Condition& c, int min_prec) {
  std::string s = print(c, min_prec);
  return precedence(c) < min_prec ? "(" + s + ")" : s;
}

std::string print(const Condition& c, int /*min_prec*/) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Compare>) {
          return std::visit(OperandPrinter{}, n.lhs) + " " + std::string(to_string(n.op)) + " " +
                 std::visit(OperandPrinter{}, n.rhs);
        } else if constexpr (std::is_same_v<T, InZone>) {
          return "in_zone(" + quote(n.zone) + ")";
        } else if constexpr (std::is_same_v<T, PhaseIs>) {
          return "phase == " + quote(n.phase);
        } else if constexpr (std::is_same_v<T, Not>) {
          return "not " + print_at(*n.operand, 3);
        } else if constexpr (std::is_same_v<T, And>) {
          // Left-associative: a right-nested and needs parentheses.
          return print_at(*n.lhs, 2) + " and " + print_at(*n.rhs, 3);
        } else {
          return print_at(*n.lhs, 1) + " or " + print_at(*n.rhs, 2);
        }
      },
      c.node);
}

void collect(const Condition& c, std::vector<std::string>* vars, std::vector<std::string>* kinds) {
  auto operand = [&](const Operand& o) {
    if (const auto* v = std::get_if<VarRef>(&o); v && vars) vars->push_back(v->name);
    if (const auto* e = std::get_if<ElapsedSince>(&o); e && kinds) kinds->push_back(e->event_kind);
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Compare>) {
          operand(n.lhs);
          operand(n.rhs);
        } else if constexpr (std::is_same_v<T, Not>) {
          collect(*n.operand, vars, kinds);
        } else if constexpr (std::is_same_v<T, And> || std::is_same_v<T, Or>) {
          collect(*n.lhs, vars, kinds);
          collect(*n.rhs, vars, kinds);
        }
      },
      c.node);
}

}  // namespace

std::string to_source(const Condition& c) { return print_at(c, 1); }
std::string to_source(const Operand& o) { return std::visit(OperandPrinter{}, o); }

void collect_variables(const Condition& c, std::vector<std::string>& out) {
  collect(c, &out, nullptr);
}
void collect_event_kinds(const Condition& c, std::vector<std::string>& out) {
  collect(c, nullptr, &out);
}

}  // namespace axv
