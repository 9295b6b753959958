// axv-explain: explanation service and model utilities.

#include <cmath>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>

#include "axv/http_api.hpp"
#include "axv/service.hpp"
#include "axv/sim.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_serve(const std::optional<std::string>& addr_flag, const std::optional<std::string>& static_dir,
              const std::optional<std::string>& transcript_dir) {
  axv::ListenAddress addr = axv::resolve_listen_address(addr_flag);

  // Block termination signals in every thread; a dedicated thread waits for them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  axv::ServiceOptions service_options;
  if (transcript_dir) {
    std::filesystem::create_directories(*transcript_dir);
    service_options.transcript_dir = *transcript_dir;
  }
  axv::ExplainService service(service_options);
  axv::HttpOptions http_options;
  if (static_dir) http_options.static_dir = *static_dir;
  axv::HttpApi api(service, http_options);

  int port = api.bind(addr.host, addr.port);
  if (port < 0) {
    std::cerr << "axv-explain: cannot bind " << addr.host << ":" << addr.port << "\n";
    return 1;
  }
  std::cerr << "axv-explain listening on http://" << addr.host << ":" << port << "\n";

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    api.stop();
  });
  api.listen_after_bind();
  // Wake the waiter if the server stopped on its own.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

int run_check(const std::string& path) {
  axv::AutonomyModel model = axv::parse_model(read_file(path));
  auto diags = axv::validate_model(model);
  for (const auto& d : diags) std::cout << path << ": " << axv::to_string(d) << "\n";
  if (axv::has_errors(diags)) return 1;
  std::cout << path << ": " << model.behaviors.size() << " behaviors, ok\n";
  return 0;
}

int run_fmt(const std::string& path, bool in_place) {
  std::string text = axv::serialize_model(axv::parse_model(read_file(path)));
  if (!in_place) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  return out ? 0 : 1;
}

int run_ask(const std::string& model_path, const std::optional<std::string>& log_path,
            std::optional<double> at, const std::string& question, bool numbers,
            const std::string& mode, double threshold) {
  auto model = std::make_shared<axv::AutonomyModel>(axv::parse_model(read_file(model_path)));
  auto diags = axv::validate_model(*model);
  if (axv::has_errors(diags)) {
    for (const auto& d : diags) std::cerr << model_path << ": " << axv::to_string(d) << "\n";
    return 1;
  }
  axv::SessionOptions options;
  options.show_numbers = numbers;
  options.policy = mode == "sound" ? axv::AnswerPolicy::sound(threshold) : axv::AnswerPolicy::complete();
  auto session = std::make_shared<axv::MissionSession>("offline", model, options);
  if (log_path) {
    for (const auto& e : axv::load_log(*log_path)) {
      if (at && e.t > *at) break;
      session->post_event(e);
    }
  }
  if (at && *at > session->state_snapshot().clock())
    session->post_event(axv::MissionEvent{*at, "telemetry", {}});

  axv::AnswerRecord record = session->ask(question);
  std::cout << record.answer << "\n";
  for (const auto& item : record.items) {
    std::cout << "  " << item.id << "  " << axv::to_string(item.band) << "  "
              << axv::format_number(std::round(item.probability * 1000) / 10) << "%  " << item.text
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Why / why-not explanations for autonomous missions"};
  app.require_subcommand(1);

  std::optional<std::string> addr, static_dir, transcript_dir;
  auto* serve = app.add_subcommand("serve", "Run the HTTP explanation service");
  serve->add_option("--addr", addr, std::string("Listen address host:port (env ") + axv::kAddrEnv + ")");
  serve->add_option("--static-dir", static_dir, "UI assets served at /");
  serve->add_option("--transcript-dir", transcript_dir, "Append each session transcript to a file here");

  std::string model_path;
  auto* check = app.add_subcommand("check", "Parse and validate a model");
  check->add_option("model", model_path, "Model file")->required();

  bool in_place = false;
  auto* fmt = app.add_subcommand("fmt", "Print a model in canonical form");
  fmt->add_option("model", model_path, "Model file")->required();
  fmt->add_flag("-i,--in-place", in_place, "Rewrite the file");

  std::optional<std::string> log_path;
  std::optional<double> at;
  std::string question, mode = "complete";
  double threshold = 0.8;
  bool numbers = false;
  auto* ask = app.add_subcommand("ask", "Answer one question against a mission log");
  ask->add_option("--model", model_path, "Model file")->required();
  ask->add_option("--log", log_path, "Mission log (JSON lines)");
  ask->add_option("--at", at, "Mission time to answer at (default: end of log)");
  ask->add_flag("--numbers", numbers, "Show percentages");
  ask->add_option("--policy", mode, "complete or sound")->check(CLI::IsMember({"complete", "sound"}));
  ask->add_option("--threshold", threshold, "Sound-policy threshold")->check(CLI::Range(0.0, 1.0));
  ask->add_option("question", question, "Question text")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*serve) return run_serve(addr, static_dir, transcript_dir);
    if (*check) return run_check(model_path);
    if (*fmt) return run_fmt(model_path, in_place);
    return run_ask(model_path, log_path, at, question, numbers, mode, threshold);
  } catch (const std::exception& e) {
    std::cerr << "axv-explain: " << e.what() << "\n";
    return 1;
  }
}
