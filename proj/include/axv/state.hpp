#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "axv/condition.hpp"

namespace axv {

/// Payload value carried by an event: number, text or boolean.
using Value = std::variant<double, std::string, bool>;

std::string format_value(const Value& v);

/// Timestamped mission event; `t` is seconds since mission start.
struct MissionEvent {
  double t = 0.0;
  std::string kind;
  std::map<std::string, Value> data;
  bool operator==(const MissionEvent&) const = default;
};

class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an event's timestamp precedes the mission clock.
class OutOfOrderError : public StateError {
 public:
  OutOfOrderError(double event_t, double clock);
  double event_t() const { return event_t_; }
  double clock() const { return clock_; }

 private:
  double event_t_;
  double clock_;
};

/// Mission status and history folded from the event stream.
///
/// Single-writer: `ingest` and `advance_clock` mutate in place and give the
/// strong guarantee (a rejected event leaves the state untouched).
class MissionState {
 public:
  explicit MissionState(double start = 0.0);

  double clock() const { return clock_; }
  const std::map<std::string, Value>& vars() const { return vars_; }
  const std::vector<MissionEvent>& history() const { return history_; }
  const std::set<std::string>& zones_inside() const { return zones_; }
  const std::optional<std::string>& phase() const { return phase_; }
  bool start_known() const { return true; }

  const Value* var(std::string_view name) const;

  void ingest(const MissionEvent& e);
  /// Moves the clock forward without an event (e.g. to query "now").
  void advance_clock(double t);

  /// Seconds since the latest event of `kind`; +inf if none occurred.
  double elapsed_since(std::string_view kind) const;

  bool operator==(const MissionState&) const = default;

 private:
  double clock_;
  std::map<std::string, Value> vars_;
  std::vector<MissionEvent> history_;
  std::set<std::string> zones_;
  std::optional<std::string> phase_;
  std::map<std::string, double, std::less<>> last_seen_;
};

MissionState new_state(double start);
/// Value-returning form of MissionState::ingest.
MissionState ingest_event(MissionState state, const MissionEvent& e);
double elapsed_since(const MissionState& state, std::string_view kind);

/// Stable digest of the full state; equal states hash equally.
std::size_t state_fingerprint(const MissionState& state);

enum class TruthValue { False, Unknown, True };

std::string_view to_string(TruthValue v);

TruthValue kleene_not(TruthValue a);
TruthValue kleene_and(TruthValue a, TruthValue b);
TruthValue kleene_or(TruthValue a, TruthValue b);

/// Type mismatches found while evaluating; they degrade to Unknown.
struct EvalDiagnostics {
  std::vector<std::string> messages;
};

/// Strong Kleene evaluation. Absent variables make a comparison Unknown;
/// zone membership is always known; phase is Unknown until a phase_change.
TruthValue eval_condition(const Condition& c, const MissionState& state,
                          EvalDiagnostics* diagnostics = nullptr);

// ---- mission log lines (newline-delimited JSON) ----

/// `{"t":100.0,"kind":"telemetry","data":{...}}`
std::string to_log_line(const MissionEvent& e);
/// Throws StateError on malformed JSON or schema violations.
MissionEvent parse_log_line(std::string_view line);

}  // namespace axv
