// axv-sim: replays a mission log into a running axv-explain service, or
// writes the canned demo mission.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "axv/sim.hpp"

namespace {

int run_replay(const std::string& log, const std::string& speed_text, const std::string& target,
               const std::string& mission) {
  double speed = axv::parse_speed(speed_text);
  auto events = axv::load_log(log);
  httplib::Client client(target);
  client.set_connection_timeout(5);
  const std::string path = "/api/missions/" + mission + "/events";

  auto report = axv::replay(events, speed, [&](const axv::MissionEvent& e) {
    auto res = client.Post(path, axv::to_log_line(e), "application/json");
    if (!res) throw std::runtime_error("POST " + path + ": " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw std::runtime_error("POST " + path + ": HTTP " + std::to_string(res->status) + " " + res->body);
  });
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(report.wall_time).count();
  std::cerr << "delivered " << report.delivered << " events in " << ms << " ms\n";
  return 0;
}

int run_demo(const std::string& out) {
  if (out == "-") {
    axv::write_log(axv::gen_demo_mission(), std::cout);
    return 0;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + out);
  axv::write_log(axv::gen_demo_mission(), f);
  return f ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mission log replay and demo generator"};
  app.require_subcommand(1);

  std::string log, speed = "1", target = "http://127.0.0.1:8080", mission;
  auto* replay_cmd = app.add_subcommand("replay", "Replay a log into a mission session");
  replay_cmd->add_option("--log", log, "Mission log (JSON lines)")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--speed", speed, "Speed factor, or 'max'")->capture_default_str();
  replay_cmd->add_option("--target", target, "Service base URL")->capture_default_str();
  replay_cmd->add_option("--mission", mission, "Mission id")->required();

  std::string out;
  auto* demo_cmd = app.add_subcommand("demo", "Write the demo mission log");
  demo_cmd->add_option("--out", out, "Output file ('-' for stdout)")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*replay_cmd) return run_replay(log, speed, target, mission);
    return run_demo(out);
  } catch (const std::exception& e) {
    std::cerr << "axv-sim: " << e.what() << "\n";
    return 1;
  }
}
