#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "axv/engine.hpp"
#include "axv/model.hpp"
#include "axv/nlg.hpp"
#include "axv/query.hpp"
#include "axv/state.hpp"

namespace axv {

/// Failure with an HTTP-style status (400 bad input, 404 unknown mission,
/// 409 conflicting event order).
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& message)
      : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct AnswerItem {
  std::string id;
  double probability = 0.0;
  CertaintyBand band = CertaintyBand::Low;
  std::string text;
};

struct AnswerRecord {
  Intent intent;
  std::string answer;
  std::vector<AnswerItem> items;
};

struct TranscriptEntry {
  std::string question;
  AnswerRecord answer;
  double clock = 0.0;
};

/// One line per entry pair: "[t=500] Q: ..." then "[t=500] A: ...".
std::string render_transcript(const std::vector<TranscriptEntry>& entries);

/// Message delivered to stream subscribers; `type` is "mission_event" or "chat".
struct StreamMessage {
  std::string type;
  std::string data;  // JSON payload
};

/// Queue fed by a session; unregisters itself on destruction.
class Subscription {
 public:
  ~Subscription();
  Subscription(const Subscription&) = delete;
  Subscription& operator=(const Subscription&) = delete;

  /// Waits up to `timeout` for the next message.
  std::optional<StreamMessage> next(std::chrono::milliseconds timeout);

 private:
  friend class MissionSession;
  struct Channel {
    std::mutex m;
    std::condition_variable cv;
    std::deque<StreamMessage> queue;
  };
  Subscription(std::weak_ptr<class MissionSession> owner, std::shared_ptr<Channel> channel)
      : owner_(std::move(owner)), channel_(std::move(channel)) {}

  std::weak_ptr<MissionSession> owner_;
  std::shared_ptr<Channel> channel_;
};

struct SessionOptions {
  AnswerPolicy policy;
  bool show_numbers = false;
  std::optional<std::filesystem::path> transcript_file;
};

/// A mission under observation: model, live state, transcript and stream.
///
/// Events are applied by one writer at a time; questions read a consistent
/// snapshot and never modify the state.
class MissionSession : public std::enable_shared_from_this<MissionSession> {
 public:
  MissionSession(std::string id, std::shared_ptr<const AutonomyModel> model, SessionOptions options);

  const std::string& id() const { return id_; }
  const AutonomyModel& model() const { return *model_; }
  const SessionOptions& options() const { return options_; }

  void post_event(const MissionEvent& e);
  AnswerRecord ask(std::string_view question);

  MissionState state_snapshot() const;
  std::size_t state_fingerprint() const;
  std::vector<TranscriptEntry> transcript() const;

  /// Subscribes to live messages. With `backlog`, the queue starts with the
  /// full history and transcript so a fresh client can rebuild its view.
  std::unique_ptr<Subscription> subscribe(bool backlog = true);

 private:
  friend class Subscription;
  void unsubscribe(const Subscription::Channel* channel);
  void publish(StreamMessage msg);  // caller holds feed_mutex_
  AnswerRecord answer(std::string_view question, const MissionState& state) const;

  std::string id_;
  std::shared_ptr<const AutonomyModel> model_;
  SessionOptions options_;

  mutable std::shared_mutex state_mutex_;
  MissionState state_;

  // Lock order: state_mutex_ before feed_mutex_.
  mutable std::mutex feed_mutex_;
  std::vector<TranscriptEntry> transcript_;
  std::vector<std::shared_ptr<Subscription::Channel>> channels_;
};

struct ServiceOptions {
  std::optional<std::filesystem::path> transcript_dir;
};

/// Registry of concurrent mission sessions.
class ExplainService {
 public:
  explicit ExplainService(ServiceOptions options = {});

  /// Parses and validates the model; syntax or validation errors become a
  /// 400 ServiceError carrying the diagnostic text.
  std::string create_mission(std::string_view model_source, const AnswerPolicy& policy,
                             bool show_numbers);

  std::shared_ptr<MissionSession> session(std::string_view id) const;

  void post_event(std::string_view id, const MissionEvent& e);
  AnswerRecord ask(std::string_view id, std::string_view question);

  std::size_t session_count() const;

 private:
  std::string new_id();

  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<MissionSession>, std::less<>> sessions_;
  std::uint64_t counter_ = 0;
  std::uint64_t salt_;
};

// ---- JSON encodings shared by the HTTP layer and the transcript file ----

std::string answer_json(const AnswerRecord& record);
std::string event_json(const MissionEvent& e);
std::string state_json(const MissionState& s);
std::string chat_json(const TranscriptEntry& entry);

}  // namespace axv
