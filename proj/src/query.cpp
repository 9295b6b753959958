#include "axv/query.hpp"

#include <algorithm>

namespace axv {

std::string_view to_string(IntentKind kind) {
  switch (kind) {
    case IntentKind::Why: return "why";
    case IntentKind::WhyNot: return "why_not";
    case IntentKind::Status: return "status";
    case IntentKind::Unknown: break;
  }
  return "unknown";
}

std::optional<IntentKind> parse_intent_kind(std::string_view name) {
  for (auto k : {IntentKind::Why, IntentKind::WhyNot, IntentKind::Status, IntentKind::Unknown})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

const std::vector<std::string>& negation_tokens() {
  static const std::vector<std::string> tokens = {"not",   "isnt", "hasnt", "wont", "doesnt",
                                                  "no",    "cant", "arent", "didnt"};
  return tokens;
}

namespace {

using Tokens = std::vector<std::string>;

bool starts_with(const Tokens& words, const Tokens& prefix) {
  return words.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), words.begin());
}

bool contains_run(const Tokens& words, const Tokens& run) {
  if (run.empty()) return false;
  return std::search(words.begin(), words.end(), run.begin(), run.end()) != words.end();
}

struct AliasMatch {
  const BehaviorSpec* behavior = nullptr;
  const std::string* alias = nullptr;
  std::size_t length = 0;
};

AliasMatch match_alias(const Tokens& words, const AutonomyModel& model) {
  AliasMatch best;
  for (const auto& b : model.behaviors) {
    for (const auto& alias : b.aliases) {
      Tokens run = normalize(alias);
      // Strictly longer wins, so earlier declarations keep ties.
      if (run.size() > best.length && contains_run(words, run)) best = {&b, &alias, run.size()};
    }
  }
  return best;
}

std::string known_behaviors(const AutonomyModel& model) {
  std::vector<std::string> ids;
  for (const auto& b : model.behaviors) ids.push_back(b.id);
  return ids.empty() ? "none" : join(ids, ", ");
}

}  // namespace

Intent parse_query(std::string_view text, const AutonomyModel& model) {
  Tokens words = normalize(text);
  Intent intent;

  if (!words.empty() && words.front() == "why") {
    const auto& neg = negation_tokens();
    bool negated = std::any_of(words.begin() + 1, words.end(), [&](const std::string& w) {
      return std::find(neg.begin(), neg.end(), w) != neg.end();
    });
    AliasMatch m = match_alias(words, model);
    if (m.behavior == nullptr) {
      intent.diagnostic = "no known behavior mentioned; known behaviors: " + known_behaviors(model);
      return intent;
    }
    intent.kind = negated ? IntentKind::WhyNot : IntentKind::Why;
    intent.behavior = m.behavior->id;
    intent.matched_alias = *m.alias;
    return intent;
  }
  if ((!words.empty() && words.front() == "status") ||
      starts_with(words, {"what", "are", "you", "doing"})) {
    intent.kind = IntentKind::Status;
    return intent;
  }
  intent.diagnostic = "question not recognised; known behaviors: " + known_behaviors(model);
  return intent;
}

}  // namespace axv
