#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "axv/model.hpp"
#include "axv/sim.hpp"
#include "random_models.hpp"

using namespace axv;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kMinimal = R"(behavior b { alias "b" tree { reason r "r happened" } })";

Condition cmp(std::string var, CmpOp op, double n) {
  return Condition{Compare{VarRef{std::move(var)}, op, NumberLit{n}}};
}

}  // namespace

TEST_CASE("minimal model") {
  AutonomyModel m = parse_model(kMinimal);
  REQUIRE(m.behaviors.size() == 1);
  const auto& b = m.behaviors[0];
  CHECK(b.id == "b");
  CHECK(b.aliases == std::vector<std::string>{"b"});
  CHECK(b.guards.empty());
  CHECK(count_reason_leaves(b.tree) == 1);
  const auto* leaf = std::get_if<ReasonLeaf>(&b.tree.node);
  REQUIRE(leaf);
  CHECK(leaf->reason_id == "r");
  CHECK(leaf->text.source() == "r happened");
}

TEST_CASE("demo fixture parses to two behaviors") {
  std::string src = read_file(AXV_DATA_DIR "/demo.axm");
  CHECK(src == demo_model_source());
  AutonomyModel m = parse_model(src);
  REQUIRE(m.behaviors.size() == 2);
  CHECK(m.behaviors[0].id == "surface");
  CHECK(m.behaviors[1].id == "gps_fix");
  const auto& surface = m.behaviors[0];
  CHECK(tree_depth(surface.tree) == 2);
  for (const char* r : {"low_battery", "gps_fix_needed", "mission_complete"})
    CHECK(find_reason_leaf(surface.tree, r) != nullptr);
  CHECK(count_reason_leaves(surface.tree) == 3);

  const auto& root = std::get<DecisionNode>(surface.tree.node);
  CHECK(root.condition == cmp("battery_pct", CmpOp::Lt, 20));
  CHECK(root.prior_true == 0.3);
  const auto& inner = std::get<DecisionNode>(root.false_child->node);
  CHECK(inner.prior_true == 0.6);
  CHECK(inner.condition == Condition{Compare{ElapsedSince{"gps_fix"}, CmpOp::Gt,
                                             DurationLit{1200, DurationUnit::Seconds}}});

  const auto& gps = m.behaviors[1];
  REQUIRE(gps.guards.size() == 2);
  CHECK(gps.guards[0].prior_true == kDefaultPrior);
  CHECK(gps.guards[1].condition == cmp("depth", CmpOp::Lt, 2));
}

TEST_CASE("duplicate alias across behaviors names both") {
  const char* src = R"(
behavior a { alias "surfacing" tree { reason r "x" } }
behavior b { alias "Surfacing" tree { reason r "y" } })";
  try {
    parse_model(src);
    FAIL("expected ModelError");
  } catch (const ModelError& e) {
    std::string msg = e.what();
    CHECK(msg.find("'a'") != std::string::npos);
    CHECK(msg.find("'b'") != std::string::npos);
  }
}

TEST_CASE("duplicate behavior id") {
  CHECK_THROWS_AS(parse_model(kMinimal + "\n" + kMinimal), ModelError);
}

TEST_CASE("parse_condition examples") {
  CHECK(parse_condition("battery_pct < 20") == cmp("battery_pct", CmpOp::Lt, 20));
  CHECK(parse_condition(R"(not in_zone("no_surface") and depth < 2)") ==
        make_and(make_not(Condition{InZone{"no_surface"}}), cmp("depth", CmpOp::Lt, 2)));
  CHECK(parse_condition("elapsed_since(gps_fix) > 1200s") ==
        Condition{Compare{ElapsedSince{"gps_fix"}, CmpOp::Gt, DurationLit{1200, DurationUnit::Seconds}}});
}

TEST_CASE("condition precedence and forms") {
  Condition a = cmp("a", CmpOp::Lt, 1), b = cmp("b", CmpOp::Lt, 1), c = cmp("c", CmpOp::Lt, 1);
  CHECK(parse_condition("a < 1 or b < 1 and c < 1") == make_or(a, make_and(b, c)));
  CHECK(parse_condition("(a < 1 or b < 1) and c < 1") == make_and(make_or(a, b), c));
  CHECK(parse_condition("not not a < 1") == make_not(make_not(a)));
  CHECK(parse_condition(R"(phase == "transit")") == Condition{PhaseIs{"transit"}});
  CHECK(parse_condition("x != true") ==
        Condition{Compare{VarRef{"x"}, CmpOp::Ne, BoolLit{true}}});
  CHECK(parse_condition("t >= 2.5m") ==
        Condition{Compare{VarRef{"t"}, CmpOp::Ge, DurationLit{2.5, DurationUnit::Minutes}}});
  CHECK(parse_condition("x <= -3") == cmp("x", CmpOp::Le, -3));
  CHECK(DurationLit{2, DurationUnit::Hours}.seconds() == 7200);
}

TEST_CASE("syntax errors carry line and column") {
  const char* src = "behavior b {\n  alias \"b\"\n  tree { reason r }\n}";
  try {
    parse_model(src);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.pos().line == 3);
    CHECK(e.pos().column == 19);
    CHECK(std::string(e.what()).find("expected") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_condition("a <"), ParseError);
  CHECK_THROWS_AS(parse_condition("a < 1 and"), ParseError);
  CHECK_THROWS_AS(parse_condition("(a < 1"), ParseError);
  CHECK_THROWS_AS(parse_model(R"(behavior b { alias "b" tree { reason r "{oops" } })"), ParseError);
  CHECK_THROWS_AS(parse_model(R"(behavior b { alias "b" tree { reason r "x" } )"), ParseError);
}

TEST_CASE("validator: demo fixture is clean") {
  CHECK(validate_model(parse_model(demo_model_source())).empty());
}

TEST_CASE("validator: duplicate condition cites both paths") {
  const char* src = R"(behavior b { alias "b" tree {
    if battery_pct < 20 { reason r1 "x" }
    else { if battery_pct < 20 { reason r2 "y" } else { reason r3 "z" } } } })";
  auto diags = validate_model(parse_model(src));
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].severity == Severity::Error);
  CHECK(diags[0].code == "duplicate-condition");
  CHECK(diags[0].message.find("root and root.F") != std::string::npos);
}

TEST_CASE("validator: prior 1.0 rejected") {
  const char* src = R"(behavior b { alias "b" tree {
    if x < 1 [prior 1.0] { reason r1 "x" } else { reason r2 "y" } } })";
  auto diags = validate_model(parse_model(src));
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].code == "prior-range");
  CHECK(has_errors(diags));
}

TEST_CASE("validator: unknown slot is only a warning") {
  const char* src = R"(behavior b { alias "b" tree { reason r "value {mystery}" } })";
  auto diags = validate_model(parse_model(src));
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].severity == Severity::Warning);
  CHECK_FALSE(has_errors(diags));
}

TEST_CASE("validator: tree without reasons") {
  AutonomyModel m = parse_model(R"(behavior b { alias "b" tree { null } })");
  auto diags = validate_model(m);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].code == "no-reason");
}

TEST_CASE("serialization") {
  AutonomyModel m = parse_model(kMinimal);
  std::string text = serialize_model(m);
  CHECK(parse_model(text) == m);
  CHECK(serialize_model(parse_model(text)) == text);

  AutonomyModel demo = parse_model(demo_model_source());
  std::string demo_text = serialize_model(demo);
  CHECK(parse_model(demo_text) == demo);
  CHECK(demo_text.find("[prior 0.3]") != std::string::npos);

  AutonomyModel with_default = parse_model(
      R"(behavior b { alias "b" tree { if x < 1 [prior 0.5] { reason r "a" } else { null } } })");
  CHECK(serialize_model(with_default).find("prior") == std::string::npos);
}

TEST_CASE("property: round-trip over random models") {
  testing::ModelGenerator gen(0x5eed);
  for (int i = 0; i < 200; ++i) {
    AutonomyModel m = gen.random_model(1 + i % 3, testing::TreeShape{});
    CAPTURE(i);
    std::string text = serialize_model(m);
    AutonomyModel back = parse_model(text);
    REQUIRE(back == m);
    CHECK(serialize_model(back) == text);
    CHECK(validate_model(back).empty());
  }
}

TEST_CASE("property: to_source round-trips conditions") {
  testing::ModelGenerator gen(7);
  for (int i = 0; i < 500; ++i) {
    Condition c = gen.random_condition(4);
    CAPTURE(to_source(c));
    CHECK(parse_condition(to_source(c)) == c);
  }
}

TEST_CASE("property: parser is total over mutated input") {
  std::string base = std::string(demo_model_source());
  std::mt19937_64 rng(99);
  const std::string alphabet = "{}()[]\",<>=!#\n abz019_.-sm";
  int accepted = 0;
  for (int i = 0; i < 3000; ++i) {
    std::string s = base;
    int edits = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < edits && !s.empty(); ++k) {
      std::size_t at = rng() % s.size();
      switch (rng() % 3) {
        case 0: s.erase(at, 1 + rng() % 5); break;
        case 1: s.insert(at, 1, alphabet[rng() % alphabet.size()]); break;
        default: s[at] = static_cast<char>(rng() % 256); break;
      }
    }
    try {
      AutonomyModel m = parse_model(s);
      ++accepted;
      // The validator reports semantics only; it must not choke on parser output.
      for (const auto& d : validate_model(m)) CHECK(d.code != "syntax");
      CHECK(parse_model(s) == m);
    } catch (const ParseError&) {
    } catch (const ModelError&) {
    }
  }
  CHECK(accepted > 0);
}
