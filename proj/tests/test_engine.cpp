#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "axv/engine.hpp"
#include "axv/sim.hpp"
#include "random_models.hpp"

using namespace axv;

namespace {

const AutonomyModel& demo() {
  static const AutonomyModel m = parse_model(demo_model_source());
  return m;
}

// Demo mission folded up to (and including) t, with the clock moved to t.
MissionState demo_at(double t) {
  MissionState s = new_state(0);
  for (const auto& e : gen_demo_mission())
    if (e.t <= t) s.ingest(e);
  s.advance_clock(t);
  return s;
}

double total(const WhyResult& r) {
  return std::accumulate(r.reasons.begin(), r.reasons.end(), 0.0,
                         [](double acc, const ScoredReason& x) { return acc + x.probability; });
}

AutonomyModel single(TreeNode tree, std::vector<GuardConstraint> guards = {}) {
  AutonomyModel m;
  m.behaviors.push_back(BehaviorSpec{"b", {"b"}, std::move(guards), std::move(tree)});
  return m;
}

// Leaf index ranges [first, last) of a decision node's two subtrees.
struct Split {
  const DecisionNode* node;
  std::size_t true_first, true_last, false_last;
};

std::size_t index_tree(const TreeNode& n, std::size_t next, std::vector<Split>& out) {
  const auto* d = std::get_if<DecisionNode>(&n.node);
  if (!d) return next + 1;
  std::size_t slot = out.size();
  out.push_back({d, next, 0, 0});
  std::size_t mid = index_tree(*d->true_child, next, out);
  std::size_t end = index_tree(*d->false_child, mid, out);
  out[slot].true_last = mid;
  out[slot].false_last = end;
  return end;
}

}  // namespace

TEST_CASE("scenario A: two reasons at t=500") {
  MissionState s = demo_at(500);
  CHECK(elapsed_since(s, "gps_fix") == 450);
  WhyResult r = explain_why(demo(), s, "surface");
  REQUIRE(r.reasons.size() == 2);
  CHECK(r.reasons[0].reason_id == "mission_complete");
  CHECK(r.reasons[0].probability == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(r.reasons[1].reason_id == "low_battery");
  CHECK(r.reasons[1].probability == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(r.dropped_null_mass == 0);

  WhyResult o = enumerate_explain(demo(), s, "surface");
  REQUIRE(o.reasons.size() == 2);
  CHECK(o.reasons[0].reason_id == "mission_complete");
  CHECK(std::abs(o.reasons[0].probability - 0.7) < 1e-12);

  // audit path for mission_complete: battery Unknown, gps False
  const auto& path = r.reasons[0].path_conditions;
  REQUIRE(path.size() == 2);
  CHECK(path[0].truth == TruthValue::Unknown);
  CHECK_FALSE(path[0].took_true_branch);
  CHECK(path[1].truth == TruthValue::False);
}

TEST_CASE("scenario B: one confident reason at t=1400") {
  WhyResult r = explain_why(demo(), demo_at(1400), "surface");
  REQUIRE(r.reasons.size() == 1);
  CHECK(r.reasons[0].reason_id == "gps_fix_needed");
  CHECK(r.reasons[0].probability == 1.0);
  WhyResult o = enumerate_explain(demo(), demo_at(1400), "surface");
  REQUIRE(o.reasons.size() == 1);
  CHECK(o.reasons[0].probability == 1.0);
}

TEST_CASE("single reason leaf tree") {
  AutonomyModel m = single(TreeNode{ReasonLeaf{"only", TemplateText("x")}});
  WhyResult r = explain_why(m, new_state(0), "b");
  REQUIRE(r.reasons.size() == 1);
  CHECK(r.reasons[0].reason_id == "only");
  CHECK(r.reasons[0].probability == 1.0);
  CHECK(r.reasons[0].path_conditions.empty());
  WhyResult o = enumerate_explain(m, new_state(0), "b");
  REQUIRE(o.reasons.size() == 1);
  CHECK(o.reasons[0].probability == 1.0);
}

TEST_CASE("null mass is dropped and the rest renormalized") {
  AutonomyModel m = parse_model(R"(behavior b { alias "b" tree {
    if x < 1 [prior 0.2] { null }
    else { if y < 1 [prior 0.25] { reason r1 "a" } else { reason r2 "b" } } } })");
  WhyResult r = explain_why(m, new_state(0), "b");
  CHECK(r.dropped_null_mass == doctest::Approx(0.2));
  REQUIRE(r.reasons.size() == 2);
  CHECK(r.reasons[0].reason_id == "r2");
  CHECK(r.reasons[0].probability == doctest::Approx(0.75));
  CHECK(total(r) == doctest::Approx(1.0));
}

TEST_CASE("ties keep declaration order") {
  AutonomyModel m = parse_model(R"(behavior b { alias "b" tree {
    if x < 1 { reason first "a" } else { reason second "b" } } })");
  WhyResult r = explain_why(m, new_state(0), "b");
  REQUIRE(r.reasons.size() == 2);
  CHECK(r.reasons[0].reason_id == "first");
  CHECK(r.reasons[1].reason_id == "second");
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(explain_why(demo(), new_state(0), "hover"), UnknownBehaviorError);
  CHECK_THROWS_AS(enumerate_explain(demo(), new_state(0), "hover"), UnknownBehaviorError);
  CHECK_THROWS_AS(explain_why_not(demo(), new_state(0), "hover"), UnknownBehaviorError);

  AutonomyModel m = parse_model(R"(behavior b { alias "b" tree {
    if x < 1 { reason r "a" } else { null } } })");
  MissionState s = new_state(0);
  s.ingest(MissionEvent{0, "telemetry", {{"x", 5.0}}});
  CHECK_THROWS_AS(explain_why(m, s, "b"), CannotExplainError);
  CHECK_THROWS_AS(enumerate_explain(m, s, "b"), CannotExplainError);
}

TEST_CASE("oracle refuses more than 20 unknown conditions") {
  std::string src = "behavior b { alias \"b\" tree { ";
  for (int i = 0; i < 21; ++i) src += "if u" + std::to_string(i) + " < 1 { reason r" + std::to_string(i) + " \"x\" } else { ";
  src += "null";
  for (int i = 0; i < 21; ++i) src += " }";
  src += " } }";
  AutonomyModel m = parse_model(src);
  CHECK_THROWS_AS(enumerate_explain(m, new_state(0), "b"), EngineError);
  CHECK(explain_why(m, new_state(0), "b").reasons.size() == 21);
}

TEST_CASE("why-not examples") {
  MissionState s = new_state(0);
  s.ingest(MissionEvent{1, "zone_entered", {{"zone", std::string("no_surface")}}});
  s.ingest(MissionEvent{2, "telemetry", {{"depth", 40.0}}});
  auto blockers = explain_why_not(demo(), s, "gps_fix");
  REQUIRE(blockers.size() == 2);
  CHECK(blockers[0].guard_index == 0);
  CHECK(blockers[0].block_credence == 1.0);
  CHECK(blockers[0].truth == TruthValue::False);
  CHECK(blockers[1].guard_index == 1);
  CHECK(blockers[1].block_credence == 1.0);

  blockers = explain_why_not(demo(), new_state(0), "gps_fix");
  REQUIRE(blockers.size() == 1);
  CHECK(blockers[0].guard_index == 1);
  CHECK(blockers[0].block_credence == 0.5);
  CHECK(blockers[0].truth == TruthValue::Unknown);

  CHECK(explain_why_not(single(TreeNode{ReasonLeaf{"r", TemplateText("x")}}), s, "b").empty());
}

TEST_CASE("why-not at t=800 on the demo mission") {
  auto blockers = explain_why_not(demo(), demo_at(800), "gps_fix");
  REQUIRE(blockers.size() == 1);
  CHECK(blockers[0].guard_index == 0);
  CHECK(blockers[0].block_credence == 1.0);
}

TEST_CASE("why-not orders by credence") {
  AutonomyModel m = parse_model(R"(behavior b { alias "b"
    guard a < 1 [prior 0.9] explain "a"
    guard b < 1 [prior 0.2] explain "b"
    guard c < 1 explain "c"
    tree { reason r "x" } })");
  auto blockers = explain_why_not(m, new_state(0), "b");
  REQUIRE(blockers.size() == 3);
  CHECK(blockers[0].guard_index == 1);
  CHECK(blockers[0].block_credence == doctest::Approx(0.8));
  CHECK(blockers[1].guard_index == 2);
  CHECK(blockers[2].guard_index == 0);
  CHECK(blockers[2].block_credence == doctest::Approx(0.1));
}

TEST_CASE("answer policy") {
  WhyResult a = explain_why(demo(), demo_at(500), "surface");
  CHECK(apply_answer_policy(a, AnswerPolicy::sound(0.8)).reasons.empty());
  WhyResult complete = apply_answer_policy(a, AnswerPolicy::complete());
  REQUIRE(complete.reasons.size() == 2);
  CHECK(complete.reasons[0].probability == a.reasons[0].probability);
  WhyResult b = explain_why(demo(), demo_at(1400), "surface");
  CHECK(apply_answer_policy(b, AnswerPolicy::sound(0.8)).reasons.size() == 1);
  WhyResult partial = apply_answer_policy(a, AnswerPolicy::sound(0.5));
  REQUIRE(partial.reasons.size() == 1);
  CHECK(partial.reasons[0].probability == doctest::Approx(0.7));  // not renormalized
  CHECK(apply_answer_policy(a, AnswerPolicy::sound(0.0)).reasons.size() == 2);
}

// ---- properties ----

TEST_CASE("property: explain_why matches the enumeration oracle") {
  testing::ModelGenerator gen(2024);
  testing::TreeShape shape;
  int explained = 0;
  for (int i = 0; i < 500; ++i) {
    AutonomyModel m = single(gen.random_tree(shape));
    MissionState s = gen.random_state();
    CAPTURE(i);
    try {
      WhyResult fast = explain_why(m, s, "b");
      WhyResult slow = enumerate_explain(m, s, "b");
      ++explained;
      REQUIRE(fast.reasons.size() == slow.reasons.size());
      for (std::size_t k = 0; k < fast.reasons.size(); ++k) {
        CHECK(fast.reasons[k].reason_id == slow.reasons[k].reason_id);
        CHECK(std::abs(fast.reasons[k].probability - slow.reasons[k].probability) <= 1e-9);
      }
      CHECK(std::abs(fast.dropped_null_mass - slow.dropped_null_mass) <= 1e-9);
      CHECK(std::abs(total(fast) - 1.0) <= 1e-9);
      CHECK(std::is_sorted(fast.reasons.begin(), fast.reasons.end(),
                           [](const auto& x, const auto& y) { return x.probability > y.probability; }));
    } catch (const CannotExplainError&) {
      CHECK_THROWS_AS(enumerate_explain(m, s, "b"), CannotExplainError);
    }
  }
  CHECK(explained > 400);
}

TEST_CASE("property: resolving an unknown condition conditions the distribution") {
  testing::ModelGenerator gen(77);
  testing::TreeShape shape;
  shape.independent_vars = true;
  int checked = 0;
  for (int i = 0; i < 400 && checked < 200; ++i) {
    TreeNode tree = gen.random_tree(shape);
    MissionState s = gen.random_state();
    std::vector<LeafMass> before = propagate_mass(tree, s);
    std::vector<Split> splits;
    index_tree(tree, 0, splits);

    // First Unknown node that receives mass.
    const Split* pick = nullptr;
    for (const auto& sp : splits) {
      if (eval_condition(sp.node->condition, s) != TruthValue::Unknown) continue;
      double reach = 0;
      for (std::size_t k = sp.true_first; k < sp.false_last; ++k) reach += before[k].mass;
      if (reach > 0) {
        pick = &sp;
        break;
      }
    }
    if (!pick) continue;
    ++checked;
    std::vector<std::string> vars;
    collect_variables(pick->node->condition, vars);
    REQUIRE(vars.size() == 1);
    MissionState resolved = s;
    resolved.ingest(MissionEvent{s.clock(), "telemetry", {{vars[0], 0.0}}});
    REQUIRE(eval_condition(pick->node->condition, resolved) == TruthValue::True);

    std::vector<LeafMass> after = propagate_mass(tree, resolved);
    REQUIRE(after.size() == before.size());
    double p = pick->node->prior_true;
    for (std::size_t k = 0; k < before.size(); ++k) {
      double expected = before[k].mass;
      if (k >= pick->true_first && k < pick->true_last)
        expected = before[k].mass / p;
      else if (k >= pick->true_last && k < pick->false_last)
        expected = 0;
      CHECK(std::abs(after[k].mass - expected) <= 1e-9);
    }
  }
  CHECK(checked == 200);
}

TEST_CASE("property: why-not returns exactly the guards that are not True") {
  testing::ModelGenerator gen(5);
  for (int i = 0; i < 300; ++i) {
    AutonomyModel m = gen.random_model(1, testing::TreeShape{});
    MissionState s = gen.random_state();
    const auto& b = m.behaviors[0];
    auto blockers = explain_why_not(m, s, b.id);
    std::vector<std::size_t> got, want;
    for (const auto& x : blockers) got.push_back(x.guard_index);
    for (std::size_t g = 0; g < b.guards.size(); ++g)
      if (eval_condition(b.guards[g].condition, s) != TruthValue::True) want.push_back(g);
    std::sort(got.begin(), got.end());
    CHECK(got == want);
    for (const auto& x : blockers) {
      if (x.truth == TruthValue::False)
        CHECK(x.block_credence == 1.0);
      else
        CHECK(x.block_credence == doctest::Approx(1 - b.guards[x.guard_index].prior_true));
    }
  }
}

TEST_CASE("property: results are deterministic") {
  testing::ModelGenerator gen(6);
  for (int i = 0; i < 100; ++i) {
    AutonomyModel m = single(gen.random_tree(testing::TreeShape{}));
    MissionState s = gen.random_state();
    try {
      WhyResult a = explain_why(m, s, "b"), b = explain_why(m, s, "b");
      REQUIRE(a.reasons.size() == b.reasons.size());
      for (std::size_t k = 0; k < a.reasons.size(); ++k) {
        CHECK(a.reasons[k].reason_id == b.reasons[k].reason_id);
        CHECK(a.reasons[k].probability == b.reasons[k].probability);
        CHECK(a.reasons[k].path_conditions == b.reasons[k].path_conditions);
      }
    } catch (const CannotExplainError&) {
    }
  }
}
