#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "axv/model.hpp"
#include "axv/state.hpp"

namespace axv {

struct PathStep {
  Condition condition;
  TruthValue truth = TruthValue::Unknown;
  bool took_true_branch = true;
  bool operator==(const PathStep&) const = default;
};

struct ScoredReason {
  std::string reason_id;
  double probability = 0.0;
  /// Conditions on the path to the (first) leaf carrying this reason.
  std::vector<PathStep> path_conditions;
};

/// Reasons sorted by descending probability (ties: declaration order).
struct WhyResult {
  std::vector<ScoredReason> reasons;
  double dropped_null_mass = 0.0;
};

/// A guard that is not known to hold.
struct ScoredBlocker {
  std::size_t guard_index = 0;
  double block_credence = 0.0;
  TruthValue truth = TruthValue::False;
};

enum class PolicyMode { Complete, Sound };

struct AnswerPolicy {
  PolicyMode mode = PolicyMode::Complete;
  double threshold = 0.8;

  static AnswerPolicy complete() { return {PolicyMode::Complete, 0.8}; }
  static AnswerPolicy sound(double threshold = 0.8) { return {PolicyMode::Sound, threshold}; }
};

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownBehaviorError : public EngineError {
 public:
  explicit UnknownBehaviorError(std::string_view id);
};

/// The tree puts (almost) all mass on null leaves: the model contradicts
/// the observation that the behavior is happening.
class CannotExplainError : public EngineError {
 public:
  explicit CannotExplainError(std::string_view id);
};

/// Raw mass arriving at one leaf, identified by its pre-order index.
struct LeafMass {
  std::size_t leaf_index = 0;
  double mass = 0.0;
};

/// Mass propagation from the root with m = 1. Decided nodes pass all mass
/// to one child; Unknown nodes split it by prior_true. Returns one entry per
/// leaf (reason and null) in pre-order, before any renormalization.
std::vector<LeafMass> propagate_mass(const TreeNode& tree, const MissionState& state);

/// Sort key for reasons. Probabilities equal to 12 decimal places compare
/// equal, so rounding noise cannot override declaration order on ties.
inline long long ranking_key(double p) { return std::llround(p * 1e12); }

WhyResult explain_why(const AutonomyModel& model, const MissionState& state,
                      std::string_view behavior);

/// Brute-force reference for explain_why: enumerates every truth assignment
/// of the tree's Unknown conditions. Refuses more than 20 of them.
WhyResult enumerate_explain(const AutonomyModel& model, const MissionState& state,
                            std::string_view behavior);

inline constexpr std::size_t kMaxEnumeratedConditions = 20;

std::vector<ScoredBlocker> explain_why_not(const AutonomyModel& model, const MissionState& state,
                                           std::string_view behavior);

/// Sound mode keeps reasons with probability >= threshold, without
/// renormalizing; Complete mode returns the result unchanged.
WhyResult apply_answer_policy(WhyResult result, const AnswerPolicy& policy);

}  // namespace axv
