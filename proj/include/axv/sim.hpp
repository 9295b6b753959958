#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "axv/state.hpp"

namespace axv {

/// Log problem tied to a 1-based line number.
class LogError : public std::runtime_error {
 public:
  LogError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads newline-delimited event records; blank lines are skipped.
/// Timestamps must be non-decreasing.
std::vector<MissionEvent> read_log(std::istream& in);
std::vector<MissionEvent> load_log(const std::filesystem::path& path);

void write_log(const std::vector<MissionEvent>& events, std::ostream& out);
std::string log_text(const std::vector<MissionEvent>& events);

/// Canned mission reproducing the surfacing and GPS-fix scenarios.
std::vector<MissionEvent> gen_demo_mission();

/// Canonical demo model source (the shipped demo.axm).
std::string_view demo_model_source();

inline constexpr double kSpeedMax = std::numeric_limits<double>::infinity();

/// "max" or a positive number.
double parse_speed(std::string_view text);

using EventSink = std::function<void(const MissionEvent&)>;

struct ReplayReport {
  std::size_t delivered = 0;
  std::chrono::steady_clock::duration wall_time{};
  bool cancelled = false;
};

/// A sink threw; replay stopped at `index`.
class ReplayError : public std::runtime_error {
 public:
  ReplayError(std::size_t index, const std::string& cause);
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Delivers events to `sink`, event i at (t_i - t_0) / speed_factor seconds
/// after the first. Infinite speed delivers back to back. Stop requests are
/// honoured between deliveries.
ReplayReport replay(const std::vector<MissionEvent>& events, double speed_factor,
                    const EventSink& sink, std::stop_token stop = {});

}  // namespace axv
