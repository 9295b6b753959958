#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "axv/box.hpp"

namespace axv {

/// Source position (1-based) used in parser diagnostics.
struct SourcePos {
  int line = 1;
  int column = 1;
  bool operator==(const SourcePos&) const = default;
};

/// Thrown for any lexical or syntactic problem in model or condition source.
class ParseError : public std::runtime_error {
 public:
  ParseError(SourcePos pos, const std::string& message);
  SourcePos pos() const { return pos_; }
  const std::string& detail() const { return detail_; }

 private:
  SourcePos pos_;
  std::string detail_;
};

// ---- operands ----

struct VarRef {
  std::string name;
  bool operator==(const VarRef&) const = default;
};

struct NumberLit {
  double value = 0.0;
  bool operator==(const NumberLit&) const = default;
};

enum class DurationUnit : char { Seconds = 's', Minutes = 'm', Hours = 'h' };

/// Duration literal. Keeps the written unit so serialization is lossless.
struct DurationLit {
  double amount = 0.0;
  DurationUnit unit = DurationUnit::Seconds;
  double seconds() const;
  bool operator==(const DurationLit&) const = default;
};

struct TextLit {
  std::string value;
  bool operator==(const TextLit&) const = default;
};

struct BoolLit {
  bool value = false;
  bool operator==(const BoolLit&) const = default;
};

/// `elapsed_since(kind)`: seconds since the latest event of that kind.
struct ElapsedSince {
  std::string event_kind;
  bool operator==(const ElapsedSince&) const = default;
};

using Operand = std::variant<VarRef, NumberLit, DurationLit, TextLit, BoolLit, ElapsedSince>;

enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

std::string_view to_string(CmpOp op);

// ---- condition nodes ----

struct Condition;

struct Compare {
  Operand lhs;
  CmpOp op = CmpOp::Eq;
  Operand rhs;
  bool operator==(const Compare&) const = default;
};

struct InZone {
  std::string zone;
  bool operator==(const InZone&) const = default;
};

struct PhaseIs {
  std::string phase;
  bool operator==(const PhaseIs&) const = default;
};

struct Not {
  Box<Condition> operand;
  bool operator==(const Not&) const = default;
};

struct And {
  Box<Condition> lhs;
  Box<Condition> rhs;
  bool operator==(const And&) const = default;
};

struct Or {
  Box<Condition> lhs;
  Box<Condition> rhs;
  bool operator==(const Or&) const = default;
};

/// Boolean expression over mission state. Equality is structural.
struct Condition {
  std::variant<Compare, InZone, PhaseIs, Not, And, Or> node;
  bool operator==(const Condition&) const = default;
};

Condition make_not(Condition c);
Condition make_and(Condition a, Condition b);
Condition make_or(Condition a, Condition b);

/// Parses a standalone condition expression (`not` > comparison > `and` > `or`).
Condition parse_condition(std::string_view source);

/// Canonical source text; parse_condition(to_source(c)) == c.
std::string to_source(const Condition& c);
std::string to_source(const Operand& o);

/// State variables referenced anywhere in the expression.
void collect_variables(const Condition& c, std::vector<std::string>& out);
/// Event kinds referenced via elapsed_since.
void collect_event_kinds(const Condition& c, std::vector<std::string>& out);

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double v);

bool is_identifier(std::string_view s);

}  // namespace axv
