#include "axv/engine.hpp"

#include <algorithm>

namespace axv {

UnknownBehaviorError::UnknownBehaviorError(std::string_view id)
    : EngineError("unknown behavior '" + std::string(id) + "'") {}

CannotExplainError::CannotExplainError(std::string_view id)
    : EngineError("cannot explain '" + std::string(id) +
                  "': every path of its tree ends on a null leaf in the current state") {}

namespace {

constexpr double kNullMassLimit = 1.0 - 1e-12;

const BehaviorSpec& require_behavior(const AutonomyModel& model, std::string_view id) {
  const BehaviorSpec* b = model.find(id);
  if (b == nullptr) throw UnknownBehaviorError(id);
  return *b;
}

struct LeafVisit {
  std::size_t index = 0;
  double mass = 0.0;
  const ReasonLeaf* reason = nullptr;  // null for NullLeaf
  std::vector<PathStep> path;
};

class Propagator {
 public:
  explicit Propagator(const MissionState& state) : state_(state) {}

  std::vector<LeafVisit> run(const TreeNode& root) {
    std::vector<PathStep> path;
    visit(root, 1.0, path);
    return std::move(leaves_);
  }

 private:
  void visit(const TreeNode& n, double mass, std::vector<PathStep>& path) {
    if (const auto* d = std::get_if<DecisionNode>(&n.node)) {
      TruthValue tv = eval_condition(d->condition, state_);
      double to_true = 0.0;
      double to_false = 0.0;
      switch (tv) {
        case TruthValue::True: to_true = mass; break;
        case TruthValue::False: to_false = mass; break;
        case TruthValue::Unknown:
          to_true = mass * d->prior_true;
          to_false = mass * (1.0 - d->prior_true);
          break;
      }
      path.push_back(PathStep{d->condition, tv, true});
      visit(*d->true_child, to_true, path);
      path.back().took_true_branch = false;
      visit(*d->false_child, to_false, path);
      path.pop_back();
      return;
    }
    LeafVisit leaf{leaves_.size(), mass, std::get_if<ReasonLeaf>(&n.node), {}};
    if (leaf.reason != nullptr) leaf.path = path;
    leaves_.push_back(std::move(leaf));
  }

  const MissionState& state_;
  std::vector<LeafVisit> leaves_;
};

}  // namespace

std::vector<LeafMass> propagate_mass(const TreeNode& tree, const MissionState& state) {
  std::vector<LeafMass> out;
  for (const auto& leaf : Propagator(state).run(tree)) out.push_back({leaf.index, leaf.mass});
  return out;
}

WhyResult explain_why(const AutonomyModel& model, const MissionState& state,
                      std::string_view behavior) {
  const BehaviorSpec& spec = require_behavior(model, behavior);
  std::vector<LeafVisit> leaves = Propagator(state).run(spec.tree);

  double null_mass = 0.0;
  for (const auto& leaf : leaves)
    if (leaf.reason == nullptr) null_mass += leaf.mass;
  if (null_mass >= kNullMassLimit) throw CannotExplainError(behavior);

  // Condition on "some reason applies" by dropping null mass.
  const double scale = null_mass > 0.0 ? 1.0 / (1.0 - null_mass) : 1.0;

  WhyResult result;
  result.dropped_null_mass = null_mass;
  for (auto& leaf : leaves) {
    if (leaf.reason == nullptr || leaf.mass <= 0.0) continue;
    auto it = std::find_if(result.reasons.begin(), result.reasons.end(), [&](const auto& r) {
      return r.reason_id == leaf.reason->reason_id;
    });
    if (it == result.reasons.end()) {
      result.reasons.push_back(
          ScoredReason{leaf.reason->reason_id, leaf.mass * scale, std::move(leaf.path)});
    } else {
      it->probability += leaf.mass * scale;
    }
  }
  // Renormalization can overshoot 1 by an ulp.
  for (auto& r : result.reasons) r.probability = std::min(r.probability, 1.0);
  std::stable_sort(result.reasons.begin(), result.reasons.end(),
                   [](const auto& a, const auto& b) { return ranking_key(a.probability) > ranking_key(b.probability); });
  return result;
}

std::vector<ScoredBlocker> explain_why_not(const AutonomyModel& model, const MissionState& state,
                                           std::string_view behavior) {
  const BehaviorSpec& spec = require_behavior(model, behavior);
  std::vector<ScoredBlocker> blockers;
  for (std::size_t i = 0; i < spec.guards.size(); ++i) {
    const auto& guard = spec.guards[i];
    TruthValue tv = eval_condition(guard.condition, state);
    if (tv == TruthValue::True) continue;
    double credence = tv == TruthValue::False ? 1.0 : 1.0 - guard.prior_true;
    blockers.push_back(ScoredBlocker{i, credence, tv});
  }
  std::stable_sort(blockers.begin(), blockers.end(), [](const auto& a, const auto& b) {
    return a.block_credence > b.block_credence;
  });
  return blockers;
}

WhyResult apply_answer_policy(WhyResult result, const AnswerPolicy& policy) {
  if (policy.mode == PolicyMode::Sound) {
    std::erase_if(result.reasons,
                  [&](const ScoredReason& r) { return r.probability < policy.threshold; });
  }
  return result;
}

}  // namespace axv
