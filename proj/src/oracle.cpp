// Brute-force enumeration over truth assignments. Kept free of the
// propagation code in engine.cpp so the two can check each other.

#include <algorithm>
#include <cstdint>
#include <map>

#include "axv/engine.hpp"

namespace axv {
namespace {

struct UnknownCondition {
  const Condition* condition;
  double prior_true;
};

void collect_unknown(const TreeNode& n, const MissionState& state,
                     std::vector<UnknownCondition>& out) {
  const auto* d = std::get_if<DecisionNode>(&n.node);
  if (d == nullptr) return;
  if (eval_condition(d->condition, state) == TruthValue::Unknown) {
    bool seen = std::any_of(out.begin(), out.end(),
                            [&](const UnknownCondition& u) { return *u.condition == d->condition; });
    if (!seen) out.push_back({&d->condition, d->prior_true});
  }
  collect_unknown(*d->true_child, state, out);
  collect_unknown(*d->false_child, state, out);
}

// Leaf reached under one complete assignment of the unknown conditions.
const TreeNode* descend(const TreeNode& root, const MissionState& state,
                        const std::vector<UnknownCondition>& unknowns, std::uint32_t assignment) {
  const TreeNode* n = &root;
  while (const auto* d = std::get_if<DecisionNode>(&n->node)) {
    TruthValue tv = eval_condition(d->condition, state);
    bool truth = tv == TruthValue::True;
    if (tv == TruthValue::Unknown) {
      auto it = std::find_if(unknowns.begin(), unknowns.end(),
                             [&](const UnknownCondition& u) { return *u.condition == d->condition; });
      truth = ((assignment >> static_cast<std::uint32_t>(it - unknowns.begin())) & 1U) != 0;
    }
    n = truth ? &*d->true_child : &*d->false_child;
  }
  return n;
}

void leaves_in_order(const TreeNode& n, std::vector<const TreeNode*>& out) {
  if (const auto* d = std::get_if<DecisionNode>(&n.node)) {
    leaves_in_order(*d->true_child, out);
    leaves_in_order(*d->false_child, out);
  } else {
    out.push_back(&n);
  }
}

}  // namespace

WhyResult enumerate_explain(const AutonomyModel& model, const MissionState& state,
                            std::string_view behavior) {
  const BehaviorSpec* spec = model.find(behavior);
  if (spec == nullptr) throw UnknownBehaviorError(behavior);

  std::vector<UnknownCondition> unknowns;
  collect_unknown(spec->tree, state, unknowns);
  if (unknowns.size() > kMaxEnumeratedConditions) {
    throw EngineError("enumeration refused: " + std::to_string(unknowns.size()) +
                      " unknown conditions exceed the limit of " +
                      std::to_string(kMaxEnumeratedConditions));
  }

  std::map<const TreeNode*, double> leaf_mass;
  const std::uint32_t assignments = 1U << unknowns.size();
  for (std::uint32_t a = 0; a < assignments; ++a) {
    double weight = 1.0;
    for (std::size_t i = 0; i < unknowns.size(); ++i) {
      bool truth = ((a >> i) & 1U) != 0;
      weight *= truth ? unknowns[i].prior_true : 1.0 - unknowns[i].prior_true;
    }
    leaf_mass[descend(spec->tree, state, unknowns, a)] += weight;
  }

  std::vector<const TreeNode*> order;
  leaves_in_order(spec->tree, order);

  double null_mass = 0.0;
  for (const auto& [leaf, mass] : leaf_mass)
    if (std::holds_alternative<NullLeaf>(leaf->node)) null_mass += mass;
  if (null_mass >= 1.0 - 1e-12) throw CannotExplainError(behavior);

  WhyResult result;
  result.dropped_null_mass = null_mass;
  for (const TreeNode* leaf : order) {
    const auto* reason = std::get_if<ReasonLeaf>(&leaf->node);
    auto found = leaf_mass.find(leaf);
    if (reason == nullptr || found == leaf_mass.end() || found->second <= 0.0) continue;
    double p = found->second / (1.0 - null_mass);
    auto it = std::find_if(result.reasons.begin(), result.reasons.end(),
                           [&](const ScoredReason& r) { return r.reason_id == reason->reason_id; });
    if (it == result.reasons.end())
      result.reasons.push_back(ScoredReason{reason->reason_id, p, {}});
    else
      it->probability += p;
  }
  // Renormalization can overshoot 1 by an ulp.
  for (auto& r : result.reasons) r.probability = std::min(r.probability, 1.0);
  std::stable_sort(result.reasons.begin(), result.reasons.end(),
                   [](const auto& x, const auto& y) { return ranking_key(x.probability) > ranking_key(y.probability); });
  return result;
}

}  // namespace axv
