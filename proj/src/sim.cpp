#include "axv/sim.hpp"

#include <charconv>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <sstream>

namespace axv {

LogError::LogError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

ReplayError::ReplayError(std::size_t index, const std::string& cause)
    : std::runtime_error("replay aborted at event " + std::to_string(index) + ": " + cause),
      index_(index) {}

std::vector<MissionEvent> read_log(std::istream& in) {
  std::vector<MissionEvent> events;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    MissionEvent e;
    try {
      e = parse_log_line(line);
    } catch (const StateError& err) {
      throw LogError(number, err.what());
    }
    if (!events.empty() && e.t < events.back().t) {
      throw LogError(number, "timestamp t=" + format_number(e.t) +
                                 " is earlier than the previous event's t=" +
                                 format_number(events.back().t));
    }
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<MissionEvent> load_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mission log '" + path.string() + "'");
  return read_log(in);
}

void write_log(const std::vector<MissionEvent>& events, std::ostream& out) {
  for (const auto& e : events) out << to_log_line(e) << '\n';
}

std::string log_text(const std::vector<MissionEvent>& events) {
  std::ostringstream out;
  write_log(events, out);
  return out.str();
}

std::vector<MissionEvent> gen_demo_mission() {
  using Data = std::map<std::string, Value>;
  return {
      {0.0, "phase_change", Data{{"phase", std::string("transit")}}},
      {50.0, "gps_fix", Data{}},
      {100.0, "telemetry", Data{{"depth", 30.0}}},
      // Scenario A asks "why surfacing" around t=500, battery still unreported.
      {450.0, "surfaced", Data{{"depth", 0.0}}},
      {600.0, "telemetry", Data{{"battery_pct", 85.0}}},
      {700.0, "zone_entered", Data{{"zone", std::string("no_surface")}}},
      // Scenario B: the last fix is now 1350 s old.
      {1400.0, "surfaced", Data{{"depth", 0.0}}},
  };
}

std::string_view demo_model_source() {
  return R"axm(behavior surface {
  alias "surfacing", "coming up", "going to the surface"
  guard not in_zone("no_surface") explain "the vehicle is inside a no-surface zone"
  tree {
    if battery_pct < 20 [prior 0.3] { reason low_battery "the battery is at {battery_pct}%" }
    else {
      if elapsed_since(gps_fix) > 1200s [prior 0.6]
        { reason gps_fix_needed "it needs a GPS fix; the last fix was {elapsed_since(gps_fix)} ago" }
      else { reason mission_complete "the mission plan is complete" }
    }
  }
}
behavior gps_fix {
  alias "a gps fix", "doing a gps fix", "gps"
  guard not in_zone("no_surface") explain "the vehicle is inside a no-surface zone"
  guard depth < 2 explain "the vehicle must be near the surface (current depth {depth} m)"
  tree { reason scheduled_fix "a periodic GPS fix is scheduled" }
}
)axm";
}

double parse_speed(std::string_view text) {
  if (text == "max") return kSpeedMax;
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !(v > 0.0))
    throw std::invalid_argument("speed must be a positive number or 'max', got '" +
                                std::string(text) + "'");
  return v;
}

ReplayReport replay(const std::vector<MissionEvent>& events, double speed_factor,
                    const EventSink& sink, std::stop_token stop) {
  if (!(speed_factor > 0.0)) throw std::invalid_argument("speed factor must be > 0");
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].t < events[i - 1].t)
      throw std::invalid_argument("events out of order at index " + std::to_string(i));
  }

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  ReplayReport report;
  std::mutex m;
  std::condition_variable_any cv;

  for (std::size_t i = 0; i < events.size(); ++i) {
    if (stop.stop_requested()) {
      report.cancelled = true;
      break;
    }
    if (std::isfinite(speed_factor) && i > 0) {
      // Scheduled from the start so per-event jitter does not accumulate.
      auto offset = std::chrono::duration<double>((events[i].t - events.front().t) / speed_factor);
      auto due = start + std::chrono::duration_cast<Clock::duration>(offset);
      std::unique_lock lock(m);
      cv.wait_until(lock, stop, due, [] { return false; });
      if (stop.stop_requested()) {
        report.cancelled = true;
        break;
      }
    }
    try {
      sink(events[i]);
    } catch (const std::exception& e) {
      throw ReplayError(i, e.what());
    }
    ++report.delivered;
  }
  report.wall_time = Clock::now() - start;
  return report;
}

}  // namespace axv
