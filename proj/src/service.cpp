#include "axv/service.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace axv {

using json = nlohmann::ordered_json;

namespace {

json value_json(const Value& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

json answer_object(const AnswerRecord& r) {
  json items = json::array();
  for (const auto& item : r.items) {
    items.push_back({{"id", item.id},
                     {"probability", item.probability},
                     {"band", std::string(to_string(item.band))},
                     {"text", item.text}});
  }
  json j;
  j["intent"] = std::string(to_string(r.intent.kind));
  j["behavior"] = r.intent.behavior.empty() ? json(nullptr) : json(r.intent.behavior);
  j["answer"] = r.answer;
  j["items"] = std::move(items);
  return j;
}

std::string help_text(const AutonomyModel& model) {
  std::string text = "I can explain what the vehicle is doing and why.";
  if (!model.behaviors.empty() && !model.behaviors.front().aliases.empty()) {
    text += " Try \"why are you " + model.behaviors.front().aliases.front() + "?\" or \"why not " +
            model.behaviors.front().aliases.front() + "?\".";
  }
  std::vector<std::string> ids;
  for (const auto& b : model.behaviors) ids.push_back(b.id);
  text += " Known behaviors: " + (ids.empty() ? std::string("none") : join(ids, ", ")) + ".";
  return text;
}

std::string status_text(const MissionState& s) {
  std::string text = "Mission time " + format_number(s.clock()) + "s";
  text += "; phase " + s.phase().value_or("unknown");
  std::vector<std::string> zones(s.zones_inside().begin(), s.zones_inside().end());
  text += "; inside zones: " + (zones.empty() ? std::string("none") : join(zones, ", "));
  std::vector<std::string> vars;
  for (const auto& [k, v] : s.vars()) vars.push_back(k + "=" + format_value(v));
  if (!vars.empty()) text += "; " + join(vars, ", ");
  return text + ".";
}

}  // namespace

std::string answer_json(const AnswerRecord& record) { return answer_object(record).dump(); }

std::string event_json(const MissionEvent& e) { return to_log_line(e); }

std::string state_json(const MissionState& s) {
  json vars = json::object();
  for (const auto& [k, v] : s.vars()) vars[k] = value_json(v);
  json zones = json::array();
  for (const auto& z : s.zones_inside()) zones.push_back(z);
  json j;
  j["clock"] = s.clock();
  j["phase"] = s.phase() ? json(*s.phase()) : json(nullptr);
  j["vars"] = std::move(vars);
  j["zones"] = std::move(zones);
  return j.dump();
}

std::string chat_json(const TranscriptEntry& entry) {
  json j;
  j["clock"] = entry.clock;
  j["question"] = entry.question;
  j["reply"] = answer_object(entry.answer);
  return j.dump();
}

std::string render_transcript(const std::vector<TranscriptEntry>& entries) {
  std::ostringstream out;
  for (const auto& e : entries) {
    std::string t = format_number(e.clock);
    out << "[t=" << t << "] Q: " << e.question << '\n';
    out << "[t=" << t << "] A: " << e.answer.answer << '\n';
  }
  return out.str();
}

// ---- Subscription ----

Subscription::~Subscription() {
  if (auto owner = owner_.lock()) owner->unsubscribe(channel_.get());
}

std::optional<StreamMessage> Subscription::next(std::chrono::milliseconds timeout) {
  std::unique_lock lock(channel_->m);
  if (!channel_->cv.wait_for(lock, timeout, [&] { return !channel_->queue.empty(); }))
    return std::nullopt;
  StreamMessage msg = std::move(channel_->queue.front());
  channel_->queue.pop_front();
  return msg;
}

// ---- MissionSession ----

MissionSession::MissionSession(std::string id, std::shared_ptr<const AutonomyModel> model,
                               SessionOptions options)
    : id_(std::move(id)), model_(std::move(model)), options_(std::move(options)), state_(0.0) {}

void MissionSession::post_event(const MissionEvent& e) {
  std::unique_lock state_lock(state_mutex_);
  try {
    state_.ingest(e);
  } catch (const OutOfOrderError& err) {
    throw ServiceError(409, err.what());
  } catch (const StateError& err) {
    throw ServiceError(400, err.what());
  }
  std::lock_guard feed_lock(feed_mutex_);
  publish({"mission_event", event_json(e)});
}

AnswerRecord MissionSession::ask(std::string_view question) {
  std::shared_lock state_lock(state_mutex_);
  TranscriptEntry entry{std::string(question), answer(question, state_), state_.clock()};
  AnswerRecord record = entry.answer;
  std::lock_guard feed_lock(feed_mutex_);
  if (options_.transcript_file) {
    std::ofstream out(*options_.transcript_file, std::ios::app);
    out << chat_json(entry) << '\n';
  }
  publish({"chat", chat_json(entry)});
  transcript_.push_back(std::move(entry));
  return record;
}

AnswerRecord MissionSession::answer(std::string_view question, const MissionState& state) const {
  const AutonomyModel& model = *model_;
  AnswerRecord record;
  record.intent = parse_query(question, model);
  RealizeOptions realize{options_.show_numbers, nullptr};
  const PhrasingTable& phrasing = default_phrasing();

  switch (record.intent.kind) {
    case IntentKind::Why: {
      const BehaviorSpec& spec = *model.find(record.intent.behavior);
      WhyResult result;
      try {
        result = explain_why(model, state, spec.id);
      } catch (const CannotExplainError&) {
        record.answer = phrasing.cannot_explain;
        return record;
      }
      result = apply_answer_policy(std::move(result), options_.policy);
      record.answer = realize_why(result, model, spec.id, state, realize);
      for (const auto& r : result.reasons) {
        const ReasonLeaf* leaf = find_reason_leaf(spec.tree, r.reason_id);
        std::string text = leaf != nullptr ? render_template(leaf->text, state) : std::string();
        record.items.push_back(AnswerItem{r.reason_id, r.probability,
                                          certainty_band(r.probability), std::move(text)});
      }
      return record;
    }
    case IntentKind::WhyNot: {
      const BehaviorSpec& spec = *model.find(record.intent.behavior);
      auto blockers = explain_why_not(model, state, spec.id);
      record.answer = realize_why_not(blockers, model, spec.id, state, realize);
      for (const auto& b : blockers) {
        record.items.push_back(AnswerItem{"guard_" + std::to_string(b.guard_index),
                                          b.block_credence, certainty_band(b.block_credence),
                                          render_template(spec.guards[b.guard_index].explain, state)});
      }
      return record;
    }
    case IntentKind::Status:
      record.answer = status_text(state);
      return record;
    case IntentKind::Unknown:
      record.answer = help_text(model);
      return record;
  }
  return record;
}

MissionState MissionSession::state_snapshot() const {
  std::shared_lock lock(state_mutex_);
  return state_;
}

std::size_t MissionSession::state_fingerprint() const {
  std::shared_lock lock(state_mutex_);
  return axv::state_fingerprint(state_);
}

std::vector<TranscriptEntry> MissionSession::transcript() const {
  std::lock_guard lock(feed_mutex_);
  return transcript_;
}

std::unique_ptr<Subscription> MissionSession::subscribe(bool backlog) {
  auto channel = std::make_shared<Subscription::Channel>();
  std::shared_lock state_lock(state_mutex_);
  std::lock_guard feed_lock(feed_mutex_);
  if (backlog) {
    for (const auto& e : state_.history()) channel->queue.push_back({"mission_event", event_json(e)});
    for (const auto& entry : transcript_) channel->queue.push_back({"chat", chat_json(entry)});
  }
  channels_.push_back(channel);
  return std::unique_ptr<Subscription>(new Subscription(weak_from_this(), std::move(channel)));
}

void MissionSession::unsubscribe(const Subscription::Channel* channel) {
  std::lock_guard lock(feed_mutex_);
  std::erase_if(channels_, [&](const auto& c) { return c.get() == channel; });
}

void MissionSession::publish(StreamMessage msg) {
  for (const auto& c : channels_) {
    {
      std::lock_guard lock(c->m);
      c->queue.push_back(msg);
    }
    c->cv.notify_all();
  }
}

// ---- ExplainService ----

ExplainService::ExplainService(ServiceOptions options)
    : options_(std::move(options)), salt_(std::random_device{}()) {
  salt_ = (salt_ << 32) ^ std::random_device{}();
}

std::string ExplainService::new_id() {
  // splitmix64 over a per-process salt and a counter: unique and opaque.
  std::uint64_t z = salt_ + 0x9e3779b97f4a7c15ULL * ++counter_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  std::ostringstream out;
  out << "m-" << std::hex << z;
  return out.str();
}

std::string ExplainService::create_mission(std::string_view model_source,
                                           const AnswerPolicy& policy, bool show_numbers) {
  if (!(policy.threshold >= 0.0 && policy.threshold <= 1.0))
    throw ServiceError(400, "policy threshold must be within [0, 1]");
  AutonomyModel model;
  try {
    model = parse_model(model_source);
  } catch (const ParseError& e) {
    throw ServiceError(400, std::string("model syntax error at ") + e.what());
  } catch (const ModelError& e) {
    throw ServiceError(400, std::string("model error: ") + e.what());
  }
  auto diagnostics = validate_model(model);
  if (has_errors(diagnostics)) {
    std::string message = "model validation failed:";
    for (const auto& d : diagnostics) message += "\n" + to_string(d);
    throw ServiceError(400, message);
  }

  std::lock_guard lock(mutex_);
  std::string id;
  do {
    id = new_id();
  } while (sessions_.contains(id));
  SessionOptions so{policy, show_numbers, std::nullopt};
  if (options_.transcript_dir) so.transcript_file = *options_.transcript_dir / (id + ".jsonl");
  sessions_.emplace(id, std::make_shared<MissionSession>(
                            id, std::make_shared<const AutonomyModel>(std::move(model)), so));
  return id;
}

std::shared_ptr<MissionSession> ExplainService::session(std::string_view id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "unknown mission '" + std::string(id) + "'");
  return it->second;
}

void ExplainService::post_event(std::string_view id, const MissionEvent& e) {
  session(id)->post_event(e);
}

AnswerRecord ExplainService::ask(std::string_view id, std::string_view question) {
  return session(id)->ask(question);
}

std::size_t ExplainService::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

}  // namespace axv
