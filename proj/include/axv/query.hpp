#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "axv/model.hpp"
#include "axv/text.hpp"

namespace axv {

enum class IntentKind { Why, WhyNot, Status, Unknown };

std::string_view to_string(IntentKind kind);
std::optional<IntentKind> parse_intent_kind(std::string_view name);

/// Parsed operator question. `behavior` is set for Why/WhyNot only.
struct Intent {
  IntentKind kind = IntentKind::Unknown;
  std::string behavior;
  std::optional<std::string> matched_alias;
  /// Explanation for an Unknown result (e.g. the known behaviors).
  std::string diagnostic;
  bool operator==(const Intent&) const = default;
};

/// Tokens that turn a leading "why" into a why-not question.
const std::vector<std::string>& negation_tokens();

/// Total and deterministic: anything unrecognised becomes Unknown.
Intent parse_query(std::string_view text, const AutonomyModel& model);

}  // namespace axv
