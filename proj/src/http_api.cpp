#include "axv/http_api.hpp"

#include <charconv>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

namespace axv {

using json = nlohmann::json;

ListenAddress parse_listen_address(std::string_view text) {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("address must be host:port");
  ListenAddress addr;
  addr.host = colon == 0 ? "0.0.0.0" : std::string(text.substr(0, colon));
  std::string_view port = text.substr(colon + 1);
  auto res = std::from_chars(port.data(), port.data() + port.size(), addr.port);
  if (res.ec != std::errc{} || res.ptr != port.data() + port.size() || addr.port < 0 ||
      addr.port > 65535)
    throw std::invalid_argument("invalid port in address '" + std::string(text) + "'");
  return addr;
}

ListenAddress resolve_listen_address(const std::optional<std::string>& flag) {
  if (flag) return parse_listen_address(*flag);
  if (const char* env = std::getenv(kAddrEnv); env != nullptr && *env != '\0')
    return parse_listen_address(env);
  return ListenAddress{};
}

namespace {

constexpr const char* kPlaceholderPage = R"(<!DOCTYPE html>
<html><head><meta charset="utf-8"><title>axv-explain</title></head>
<body><p>axv-explain is running. The operator UI is not installed; the JSON API is under /api/missions.</p></body></html>
)";

void send_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", message}}.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
  try {
    json body = json::parse(req.body);
    if (!body.is_object()) throw ServiceError(400, "request body must be a JSON object");
    return body;
  } catch (const json::parse_error& e) {
    throw ServiceError(400, std::string("invalid JSON body: ") + e.what());
  }
}

AnswerPolicy policy_from(const json& body) {
  AnswerPolicy policy = AnswerPolicy::complete();
  auto it = body.find("policy");
  if (it == body.end() || it->is_null()) return policy;
  if (!it->is_object()) throw ServiceError(400, "'policy' must be an object");
  std::string mode = it->value("mode", "complete");
  if (mode == "sound")
    policy.mode = PolicyMode::Sound;
  else if (mode != "complete")
    throw ServiceError(400, "policy mode must be 'complete' or 'sound'");
  if (auto th = it->find("threshold"); th != it->end()) {
    if (!th->is_number()) throw ServiceError(400, "policy threshold must be a number");
    policy.threshold = th->get<double>();
  }
  return policy;
}

// Wraps a handler so ServiceError and bad input become JSON error bodies.
template <typename F>
httplib::Server::Handler guarded(F&& f) {
  return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const ServiceError& e) {
      send_error(res, e.status(), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, std::string("malformed request: ") + e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  };
}

std::string sse_frame(const StreamMessage& msg) {
  return "event: " + msg.type + "\ndata: " + msg.data + "\n\n";
}

}  // namespace

HttpApi::HttpApi(ExplainService& service, HttpOptions options)
    : service_(service), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

HttpApi::~HttpApi() { stop(); }

int HttpApi::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpApi::listen_after_bind() { return server_->listen_after_bind(); }

void HttpApi::stop() {
  stopping_ = true;
  server_->stop();
}

void HttpApi::install_routes() {
  auto& svr = *server_;

  svr.Post("/api/missions", guarded([this](const httplib::Request& req, httplib::Response& res) {
             json body = parse_body(req);
             auto model = body.find("model");
             if (model == body.end() || !model->is_string())
               throw ServiceError(400, "'model' must be a string of model source");
             std::string id = service_.create_mission(model->get<std::string>(), policy_from(body),
                                                      body.value("show_numbers", false));
             res.status = 201;
             res.set_content(json{{"mission_id", id}}.dump(), "application/json");
           }));

  svr.Post(R"(/api/missions/([^/]+)/events)",
           guarded([this](const httplib::Request& req, httplib::Response& res) {
             auto session = service_.session(req.matches[1].str());
             MissionEvent e;
             try {
               e = parse_log_line(req.body);
             } catch (const StateError& err) {
               throw ServiceError(400, err.what());
             }
             session->post_event(e);
             res.set_content(json{{"ok", true}, {"clock", e.t}}.dump(), "application/json");
           }));

  svr.Post(R"(/api/missions/([^/]+)/ask)",
           guarded([this](const httplib::Request& req, httplib::Response& res) {
             auto session = service_.session(req.matches[1].str());
             json body = parse_body(req);
             auto text = body.find("text");
             if (text == body.end() || !text->is_string())
               throw ServiceError(400, "'text' must be a string");
             AnswerRecord record = session->ask(text->get<std::string>());
             res.set_content(answer_json(record), "application/json");
           }));

  svr.Get(R"(/api/missions/([^/]+)/state)",
          guarded([this](const httplib::Request& req, httplib::Response& res) {
            auto session = service_.session(req.matches[1].str());
            res.set_content(state_json(session->state_snapshot()), "application/json");
          }));

  svr.Get(R"(/api/missions/([^/]+)/transcript)",
          guarded([this](const httplib::Request& req, httplib::Response& res) {
            auto session = service_.session(req.matches[1].str());
            res.set_content(render_transcript(session->transcript()), "text/plain; charset=utf-8");
          }));

  svr.Get(R"(/api/missions/([^/]+)/stream)",
          guarded([this](const httplib::Request& req, httplib::Response& res) {
            auto session = service_.session(req.matches[1].str());
            std::shared_ptr<Subscription> sub = session->subscribe(true);
            res.set_header("Cache-Control", "no-cache");
            res.set_chunked_content_provider(
                "text/event-stream", [this, sub](std::size_t, httplib::DataSink& sink) {
                  if (stopping_ || !sink.is_writable()) return false;
                  if (auto msg = sub->next(std::chrono::milliseconds(250))) {
                    std::string frame = sse_frame(*msg);
                    return sink.write(frame.data(), frame.size());
                  }
                  return true;
                });
          }));

  if (options_.static_dir && std::filesystem::is_directory(*options_.static_dir)) {
    svr.set_mount_point("/", options_.static_dir->string());
  } else {
    svr.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kPlaceholderPage, "text/html");
    });
  }
}

}  // namespace axv
