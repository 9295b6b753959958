#include "random_models.hpp"

#include <algorithm>
#include <cmath>

namespace axv::testing {
namespace {

const std::vector<std::string> kNumericVars = {"v0", "v1", "v2", "v3", "v4", "v5"};
const std::vector<std::string> kFlagVars = {"f0", "f1", "f2"};
const std::vector<std::string> kModeVars = {"m0", "m1"};
const std::vector<std::string> kZones = {"za", "zb"};
const std::vector<std::string> kPhases = {"p1", "p2"};
const std::vector<std::string> kEventKinds = {"gps_fix", "fault", "e1"};
const std::vector<std::string> kModes = {"alpha", "beta"};

double round_to(double v, double step) { return std::round(v / step) * step; }

}  // namespace

std::size_t count_decisions(const TreeNode& tree) {
  if (const auto* d = std::get_if<DecisionNode>(&tree.node))
    return 1 + count_decisions(*d->true_child) + count_decisions(*d->false_child);
  return 0;
}

double ModelGenerator::random_prior() {
  if (chance(0.4)) return kDefaultPrior;
  return round_to(uniform(0.05, 0.95), 0.01);
}

Condition ModelGenerator::atom() {
  static constexpr CmpOp kOps[] = {CmpOp::Lt, CmpOp::Le, CmpOp::Gt,
                                   CmpOp::Ge, CmpOp::Eq, CmpOp::Ne};
  CmpOp op = kOps[pick(6)];
  CmpOp eq = chance(0.5) ? CmpOp::Eq : CmpOp::Ne;
  switch (pick(7)) {
    case 0:
      return Condition{Compare{VarRef{kNumericVars[pick(6)]}, op,
                               NumberLit{round_to(uniform(0, 100), 0.5)}}};
    case 1:
      return Condition{InZone{kZones[pick(2)]}};
    case 2:
      return Condition{PhaseIs{kPhases[pick(2)]}};
    case 3: {
      static constexpr DurationUnit kUnits[] = {DurationUnit::Seconds, DurationUnit::Minutes,
                                                DurationUnit::Hours};
      DurationUnit unit = kUnits[pick(3)];
      double amount = unit == DurationUnit::Seconds ? std::round(uniform(1, 2000))
                                                    : round_to(uniform(0.5, 30), 0.5);
      return Condition{Compare{ElapsedSince{kEventKinds[pick(3)]}, chance(0.5) ? CmpOp::Gt : CmpOp::Lt,
                               DurationLit{amount, unit}}};
    }
    case 4:
      return Condition{Compare{VarRef{kFlagVars[pick(3)]}, eq, BoolLit{chance(0.5)}}};
    case 5:
      return Condition{Compare{VarRef{kModeVars[pick(2)]}, eq, TextLit{kModes[pick(2)]}}};
    default:
      return Condition{Compare{NumberLit{std::round(uniform(0, 100))}, op,
                               VarRef{kNumericVars[pick(6)]}}};
  }
}

Condition ModelGenerator::random_condition(int nesting) {
  if (nesting <= 0 || chance(0.6)) return atom();
  switch (pick(3)) {
    case 0: return make_not(random_condition(nesting - 1));
    case 1: return make_and(random_condition(nesting - 1), random_condition(nesting - 1));
    default: return make_or(random_condition(nesting - 1), random_condition(nesting - 1));
  }
}

TemplateText ModelGenerator::random_template(const std::vector<std::string>& vars) {
  std::string text = "explanation " + std::to_string(pick(1000));
  switch (pick(4)) {
    case 0:
      if (!vars.empty()) text += " with {" + vars[static_cast<std::size_t>(pick(static_cast<int>(vars.size())))] + "}";
      break;
    case 1: text += " after {elapsed_since(gps_fix)}"; break;
    case 2: text += " in phase {phase}"; break;
    default: break;
  }
  return TemplateText(text);
}

TreeNode ModelGenerator::grow(const TreeShape& shape, int depth, std::vector<std::string>& used,
                              std::vector<std::string>& vars_seen, int& reasons) {
  bool stop = depth >= shape.max_depth || static_cast<int>(used.size()) >= shape.max_conditions ||
              (depth > 0 && chance(shape.leaf_bias));
  if (!stop) {
    Condition c = shape.independent_vars
                      ? Condition{Compare{VarRef{"u" + std::to_string(next_var_++)}, CmpOp::Lt,
                                          NumberLit{50}}}
                      : random_condition();
    std::string key = to_source(c);
    if (std::find(used.begin(), used.end(), key) == used.end()) {
      used.push_back(key);
      collect_variables(c, vars_seen);
      double prior = random_prior();
      TreeNode t = grow(shape, depth + 1, used, vars_seen, reasons);
      TreeNode f = grow(shape, depth + 1, used, vars_seen, reasons);
      return TreeNode{DecisionNode{std::move(c), prior, std::move(t), std::move(f)}};
    }
  }
  if (chance(shape.null_leaf_chance)) return TreeNode{NullLeaf{}};
  std::string id = reasons > 0 && chance(0.1) ? "r" + std::to_string(pick(reasons))
                                              : "r" + std::to_string(reasons++);
  return TreeNode{ReasonLeaf{id, random_template(vars_seen)}};
}

TreeNode ModelGenerator::random_tree(const TreeShape& shape) {
  for (;;) {
    next_var_ = 0;
    std::vector<std::string> used;
    std::vector<std::string> vars;
    int reasons = 0;
    TreeNode tree = grow(shape, 0, used, vars, reasons);
    if (count_reason_leaves(tree) > 0) return tree;
  }
}

BehaviorSpec ModelGenerator::random_behavior(const std::string& id, const TreeShape& shape) {
  BehaviorSpec b{id, {"alias " + id, id + " thing"}, {}, random_tree(shape)};
  std::vector<std::string> vars;
  int guards = pick(3);
  for (int i = 0; i < guards; ++i) {
    Condition c = random_condition(1);
    collect_variables(c, vars);
    b.guards.push_back(GuardConstraint{std::move(c), random_prior(), random_template(vars)});
  }
  return b;
}

AutonomyModel ModelGenerator::random_model(int behaviors, const TreeShape& shape) {
  AutonomyModel m;
  for (int i = 0; i < behaviors; ++i) m.behaviors.push_back(random_behavior("b" + std::to_string(i), shape));
  return m;
}

MissionState ModelGenerator::random_state() {
  std::vector<MissionEvent> events;
  auto at = [&] { return std::round(uniform(0, 3000)); };
  if (chance(0.6)) events.push_back({at(), "phase_change", {{"phase", kPhases[pick(2)]}}});
  for (const auto& z : kZones)
    if (chance(0.4)) events.push_back({at(), "zone_entered", {{"zone", z}}});
  for (const auto& k : kEventKinds)
    if (chance(0.5)) events.push_back({at(), k, {}});

  std::map<std::string, Value> data;
  for (const auto& v : kNumericVars)
    if (chance(0.5)) data[v] = round_to(uniform(0, 100), 0.5);
  for (const auto& v : kFlagVars)
    if (chance(0.5)) data[v] = chance(0.5);
  for (const auto& v : kModeVars) {
    if (chance(0.1))
      data[v] = 7.0;  // wrong type on purpose: must degrade to Unknown
    else if (chance(0.5))
      data[v] = kModes[pick(2)];
  }
  for (int i = 0; i < 40; ++i)
    if (chance(0.5)) data["u" + std::to_string(i)] = std::round(uniform(0, 100));
  events.push_back({at(), "telemetry", std::move(data)});

  std::stable_sort(events.begin(), events.end(),
                   [](const auto& a, const auto& b) { return a.t < b.t; });
  MissionState s(0.0);
  for (const auto& e : events) s.ingest(e);
  s.advance_clock(s.clock() + std::round(uniform(0, 3000)));
  return s;
}

}  // namespace axv::testing
