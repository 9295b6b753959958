#include "axv/state.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace axv {

std::string format_value(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  return std::get<std::string>(v);
}

namespace {

std::string describe_t(double t) { return format_number(t); }

const std::string* text_field(const MissionEvent& e, const char* field) {
  auto it = e.data.find(field);
  if (it == e.data.end()) return nullptr;
  return std::get_if<std::string>(&it->second);
}

}  // namespace

OutOfOrderError::OutOfOrderError(double event_t, double clock)
    : StateError("out-of-order event: t=" + describe_t(event_t) + " precedes mission clock " +
                 describe_t(clock)),
      event_t_(event_t),
      clock_(clock) {}

MissionState::MissionState(double start) : clock_(start) {}

const Value* MissionState::var(std::string_view name) const {
  auto it = vars_.find(std::string(name));
  return it == vars_.end() ? nullptr : &it->second;
}

void MissionState::ingest(const MissionEvent& e) {
  if (!std::isfinite(e.t) || e.t < 0.0)
    throw StateError("event time must be a finite number >= 0, got " + describe_t(e.t));
  if (!is_identifier(e.kind)) throw StateError("event kind must be an identifier: '" + e.kind + "'");
  if (e.t < clock_) throw OutOfOrderError(e.t, clock_);

  const std::string* zone = nullptr;
  if (e.kind == "zone_entered" || e.kind == "zone_exited") {
    zone = text_field(e, "zone");
    if (zone == nullptr) throw StateError(e.kind + " event requires a text field 'zone'");
  }
  const std::string* phase = nullptr;
  if (e.kind == "phase_change") {
    phase = text_field(e, "phase");
    if (phase == nullptr) throw StateError("phase_change event requires a text field 'phase'");
  }

  history_.reserve(history_.size() + 1);
  for (const auto& [name, value] : e.data) vars_[name] = value;
  if (zone != nullptr) {
    if (e.kind == "zone_entered")
      zones_.insert(*zone);
    else
      zones_.erase(*zone);
  }
  if (phase != nullptr) phase_ = *phase;
  last_seen_[e.kind] = e.t;
  clock_ = e.t;
  history_.push_back(e);
}

void MissionState::advance_clock(double t) {
  if (!std::isfinite(t)) throw StateError("clock must be finite");
  if (t < clock_) throw OutOfOrderError(t, clock_);
  clock_ = t;
}

double MissionState::elapsed_since(std::string_view kind) const {
  auto it = last_seen_.find(kind);
  if (it == last_seen_.end()) return std::numeric_limits<double>::infinity();
  return clock_ - it->second;
}

MissionState new_state(double start) { return MissionState(start); }

MissionState ingest_event(MissionState state, const MissionEvent& e) {
  state.ingest(e);
  return state;
}

double elapsed_since(const MissionState& state, std::string_view kind) {
  return state.elapsed_since(kind);
}

std::size_t state_fingerprint(const MissionState& state) {
  std::ostringstream out;
  out << format_number(state.clock()) << '|' << state.phase().value_or("<none>") << '|';
  for (const auto& z : state.zones_inside()) out << z << ',';
  out << '|';
  for (const auto& [k, v] : state.vars()) out << k << '=' << v.index() << format_value(v) << ';';
  out << '|';
  for (const auto& e : state.history()) out << to_log_line(e) << '\n';
  return std::hash<std::string>{}(out.str());
}

// ---- three-valued logic ----

std::string_view to_string(TruthValue v) {
  switch (v) {
    case TruthValue::True: return "true";
    case TruthValue::False: return "false";
    case TruthValue::Unknown: break;
  }
  return "unknown";
}

TruthValue kleene_not(TruthValue a) {
  if (a == TruthValue::True) return TruthValue::False;
  if (a == TruthValue::False) return TruthValue::True;
  return TruthValue::Unknown;
}

// With False < Unknown < True, and = min and or = max.
TruthValue kleene_and(TruthValue a, TruthValue b) { return std::min(a, b); }
TruthValue kleene_or(TruthValue a, TruthValue b) { return std::max(a, b); }

namespace {

TruthValue from_bool(bool b) { return b ? TruthValue::True : TruthValue::False; }

class Evaluator {
 public:
  Evaluator(const MissionState& s, EvalDiagnostics* diag) : state_(s), diag_(diag) {}

  TruthValue eval(const Condition& c) {
    return std::visit(
        [&](const auto& n) -> TruthValue {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Compare>) {
            return compare(n);
          } else if constexpr (std::is_same_v<T, InZone>) {
            return from_bool(state_.zones_inside().contains(n.zone));
          } else if constexpr (std::is_same_v<T, PhaseIs>) {
            if (!state_.phase()) return TruthValue::Unknown;
            return from_bool(*state_.phase() == n.phase);
          } else if constexpr (std::is_same_v<T, Not>) {
            return kleene_not(eval(*n.operand));
          } else if constexpr (std::is_same_v<T, And>) {
            return kleene_and(eval(*n.lhs), eval(*n.rhs));
          } else {
            return kleene_or(eval(*n.lhs), eval(*n.rhs));
          }
        },
        c.node);
  }

 private:
  std::optional<Value> resolve(const Operand& o) const {
    return std::visit(
        [&](const auto& x) -> std::optional<Value> {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, VarRef>) {
            const Value* v = state_.var(x.name);
            return v ? std::optional<Value>(*v) : std::nullopt;
          } else if constexpr (std::is_same_v<T, NumberLit>) {
            return Value{x.value};
          } else if constexpr (std::is_same_v<T, DurationLit>) {
            return Value{x.seconds()};
          } else if constexpr (std::is_same_v<T, TextLit>) {
            return Value{x.value};
          } else if constexpr (std::is_same_v<T, BoolLit>) {
            return Value{x.value};
          } else {
            return Value{state_.elapsed_since(x.event_kind)};
          }
        },
        o);
  }

  TruthValue compare(const Compare& c) {
    auto lhs = resolve(c.lhs);
    auto rhs = resolve(c.rhs);
    if (!lhs || !rhs) return TruthValue::Unknown;
    if (lhs->index() != rhs->index()) {
      return mismatch(c, "operands have different types");
    }
    if (const auto* a = std::get_if<double>(&*lhs)) {
      double b = std::get<double>(*rhs);
      switch (c.op) {
        case CmpOp::Lt: return from_bool(*a < b);
        case CmpOp::Le: return from_bool(*a <= b);
        case CmpOp::Gt: return from_bool(*a > b);
        case CmpOp::Ge: return from_bool(*a >= b);
        case CmpOp::Eq: return from_bool(*a == b);
        case CmpOp::Ne: return from_bool(*a != b);
      }
    }
    if (c.op != CmpOp::Eq && c.op != CmpOp::Ne) {
      return mismatch(c, "ordering is only defined for numbers");
    }
    bool equal = *lhs == *rhs;
    return from_bool(c.op == CmpOp::Eq ? equal : !equal);
  }

  TruthValue mismatch(const Compare& c, const char* why) {
    if (diag_ != nullptr) {
      diag_->messages.push_back("type mismatch in `" + to_source(Condition{c}) + "`: " + why);
    }
    return TruthValue::Unknown;
  }

  const MissionState& state_;
  EvalDiagnostics* diag_;
};

}  // namespace

TruthValue eval_condition(const Condition& c, const MissionState& state,
                          EvalDiagnostics* diagnostics) {
  return Evaluator(state, diagnostics).eval(c);
}

// ---- log lines ----

std::string to_log_line(const MissionEvent& e) {
  nlohmann::ordered_json j;
  j["t"] = e.t;
  j["kind"] = e.kind;
  nlohmann::ordered_json data = nlohmann::ordered_json::object();
  for (const auto& [k, v] : e.data) {
    std::visit([&](const auto& x) { data[k] = x; }, v);
  }
  j["data"] = std::move(data);
  return j.dump();
}

MissionEvent parse_log_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw StateError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw StateError("event record must be a JSON object");
  MissionEvent e;
  auto t = j.find("t");
  if (t == j.end() || !t->is_number()) throw StateError("field 't' must be a number");
  e.t = t->get<double>();
  auto kind = j.find("kind");
  if (kind == j.end() || !kind->is_string()) throw StateError("field 'kind' must be a string");
  e.kind = kind->get<std::string>();
  if (e.kind.empty()) throw StateError("field 'kind' must be non-empty");
  if (auto data = j.find("data"); data != j.end()) {
    if (!data->is_object()) throw StateError("field 'data' must be an object");
    for (const auto& [k, v] : data->items()) {
      if (v.is_number())
        e.data[k] = v.get<double>();
      else if (v.is_string())
        e.data[k] = v.get<std::string>();
      else if (v.is_boolean())
        e.data[k] = v.get<bool>();
      else
        throw StateError("data field '" + k + "' must be a number, string or boolean");
    }
  }
  if (e.t < 0.0) throw StateError("field 't' must be >= 0");
  return e;
}

}  // namespace axv
