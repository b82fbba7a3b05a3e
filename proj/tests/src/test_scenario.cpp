#include <doctest.h>

#include <filesystem>
#include <set>

#include "helpers.hpp"
#include "icd/bruteforce.hpp"
#include "icd/generate.hpp"
#include "icd/scenario.hpp"

using namespace icd;
using namespace icdtest;

namespace {

CompositeModel bench_model(std::uint64_t seed = 5) {
  GeneratorParams gp;
  gp.ports = 144;
  gp.models = 6;
  gp.target_edges = 400;
  gp.seed = seed;
  return generate_random_dag(gp);
}

McrType classify(const Partitioning& parts, const ModeChangeRequest& r) {
  if (r.ops.size() == 1) return McrType::a;
  std::set<std::uint32_t> touched;
  for (const EdgeOp& op : r.ops) {
    touched.insert(parts.part_of(op.from));
    touched.insert(parts.part_of(op.to));
  }
  return touched.size() == 1 ? McrType::b : McrType::c;
}

}  // namespace

TEST_CASE("generator scenarios parse and round-trip") {
  const char* text = R"({"generator": {"seed": 9, "p_mcr_s": 0.02,
    "total": 50, "mix": {"a": 0.5, "b": 0.25, "c": 0.25},
    "models_per_mcr": 3, "edges_per_mcr": 5, "cycle_free_only": false}})";
  const ScenarioFile s = parse_scenario(text);
  REQUIRE(s.generator.has_value());
  CHECK_FALSE(s.schedule.has_value());
  CHECK(s.generator->seed == 9);
  CHECK(s.generator->p_mcr_s == 0.02);
  CHECK(s.generator->total == 50);
  CHECK(s.generator->mix.b == 0.25);
  CHECK(s.generator->models_per_mcr == 3);
  CHECK(s.generator->edges_per_mcr == 5);
  CHECK_FALSE(s.generator->cycle_free_only);
  // defaults for the optional tail
  CHECK(s.generator->tick_s == 0.001);
  CHECK(s.generator->warmup);
  CHECK(s.generator->unit_budget_per_tick == 5000);

  const std::string out = to_json_text(s);
  CHECK(out.back() == '\n');
  CHECK(to_json_text(parse_scenario(out)) == out);
}

TEST_CASE("schedule scenarios parse both entry forms") {
  const char* text = R"({"schedule": [
    {"tick": 0, "models": ["m0"], "ops": [["ins", "m0.i", "m0.o"]],
     "target_modes": {"m0": "on"}},
    {"tick": 5, "safe_mode": "m1"},
    {"tick": 9, "models": ["m1"], "ops": [["del", "m1.i", "m1.o"]]}
  ]})";
  const ScenarioFile s = parse_scenario(text);
  REQUIRE(s.schedule.has_value());
  REQUIRE(s.schedule->size() == 3);
  const auto& e0 = (*s.schedule)[0];
  CHECK(e0.tick == 0);
  CHECK(e0.models == std::vector<std::string>{"m0"});
  REQUIRE(e0.ops.size() == 1);
  CHECK(e0.ops[0].kind == EdgeOp::Kind::insert);
  CHECK(e0.ops[0].from == "m0.i");
  CHECK(e0.ops[0].to == "m0.o");
  CHECK(e0.target_modes.at("m0") == "on");
  CHECK((*s.schedule)[1].safe_mode == "m1");
  CHECK((*s.schedule)[1].ops.empty());
  CHECK((*s.schedule)[2].ops[0].kind == EdgeOp::Kind::erase);
  CHECK(to_json_text(parse_scenario(to_json_text(s))) == to_json_text(s));
}

TEST_CASE("scenario files reject malformed content") {
  CHECK_THROWS_AS(parse_scenario("{}"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(R"({"generator": {}, "schedule": []})"),
                  ScenarioError);
  CHECK_THROWS_AS(parse_scenario(R"({"generator": {"bogus": 1}})"),
                  ScenarioError);
  CHECK_THROWS_AS(
      parse_scenario(R"({"schedule": [{"tick": 0, "ops": [["set", "a", "b"]]}]})"),
      ScenarioError);
  CHECK_THROWS_AS(
      parse_scenario(R"({"schedule": [{"tick": 0, "ops": [["ins", "a"]]}]})"),
      ScenarioError);
  CHECK_THROWS_AS(
      parse_scenario(
          R"({"schedule": [{"tick": 0, "safe_mode": "m", "ops": [["ins", "a", "b"]]}]})"),
      ScenarioError);
  CHECK_THROWS_AS(parse_scenario("not json"), ScenarioError);
}

TEST_CASE("scenario config validation") {
  ScenarioConfig c;
  validate_scenario_config(c);
  SUBCASE("mix must sum to one") {
    c.mix = {0.5, 0.5, 0.5};
    CHECK_THROWS_AS(validate_scenario_config(c), ScenarioError);
  }
  SUBCASE("mix entries must be non-negative") {
    c.mix = {1.5, -0.25, -0.25};
    CHECK_THROWS_AS(validate_scenario_config(c), ScenarioError);
  }
  SUBCASE("multi-edge types need at least two edges") {
    c.edges_per_mcr = 1;
    CHECK_THROWS_AS(validate_scenario_config(c), ScenarioError);
    c.mix = {1, 0, 0};
    validate_scenario_config(c);
    c.edges_per_mcr = 0;
    CHECK_THROWS_AS(validate_scenario_config(c), ScenarioError);
  }
  SUBCASE("periods and ticks") {
    c.p_mcr_s = -1;
    CHECK_THROWS_AS(validate_scenario_config(c), ScenarioError);
    c.p_mcr_s = 0.01;
    c.tick_s = 0;
    CHECK_THROWS_AS(validate_scenario_config(c), ScenarioError);
  }
}

TEST_CASE("saving and loading a scenario file") {
  namespace fs = std::filesystem;
  ScenarioFile s;
  s.generator = ScenarioConfig{};
  s.generator->seed = 42;
  const fs::path p = fs::temp_directory_path() / "icd-test-scenario.json";
  save_scenario(s, p);
  const ScenarioFile back = load_scenario(p);
  REQUIRE(back.generator.has_value());
  CHECK(back.generator->seed == 42);
  fs::remove(p);
  CHECK_THROWS_AS(load_scenario(p), ScenarioError);
}

TEST_CASE("resolve_ops maps names to ports") {
  const CompositeModel m = chain_model(2);
  ScheduleEntry e;
  e.ops = {{EdgeOp::Kind::erase, "m0.i", "m0.o"},
           {EdgeOp::Kind::insert, "m1.i", "m1.o"}};
  const auto ops = resolve_ops(m, e);
  REQUIRE(ops.size() == 2);
  CHECK(ops[0] == make_erase(m.port("m0.i"), m.port("m0.o")));
  CHECK(ops[1] == make_insert(m.port("m1.i"), m.port("m1.o")));

  e.ops[0].from = "m0.nope";
  CHECK_THROWS_AS(resolve_ops(m, e), ScenarioError);
  ScheduleEntry safe;
  safe.safe_mode = "m0";
  CHECK_THROWS_AS(resolve_ops(m, safe), ScenarioError);
}

TEST_CASE("generated streams are deterministic") {
  const CompositeModel m = bench_model();
  const Partitioning parts = per_model_partitioning(m);
  ScenarioConfig cfg;
  cfg.total = 30;
  cfg.seed = 3;
  const auto s1 = generate_mcr_stream(m, parts, cfg);
  const auto s2 = generate_mcr_stream(m, parts, cfg);
  REQUIRE(s1.size() == s2.size());
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK(s1[i].ops == s2[i].ops);
    CHECK(s1[i].issue_tick == s2[i].issue_tick);
    CHECK(s1[i].id == s2[i].id);
  }
  cfg.seed = 4;
  const auto s3 = generate_mcr_stream(m, parts, cfg);
  bool differs = s3.size() != s1.size();
  for (std::size_t i = 0; !differs && i < s1.size(); ++i)
    differs = !(s3[i].ops == s1[i].ops);
  CHECK(differs);
}

TEST_CASE("the warm-up pair cancels itself out") {
  const CompositeModel m = bench_model();
  const Partitioning parts = per_model_partitioning(m);
  ScenarioConfig cfg;
  cfg.total = 20;
  const auto stream = generate_mcr_stream(m, parts, cfg);
  REQUIRE(stream.size() == 22);
  CHECK(stream[0].warmup);
  CHECK(stream[1].warmup);
  CHECK_FALSE(stream[2].warmup);
  REQUIRE(!stream[0].ops.empty());
  REQUIRE(stream[0].ops.size() == stream[1].ops.size());
  CHECK(stream[0].ops.size() <= 8);
  for (std::size_t k = 0; k < stream[0].ops.size(); ++k) {
    CHECK(stream[0].ops[k].kind == EdgeOp::Kind::erase);
    CHECK(stream[1].ops[k].kind == EdgeOp::Kind::insert);
    CHECK(stream[0].ops[k].from == stream[1].ops[k].from);
    CHECK(stream[0].ops[k].to == stream[1].ops[k].to);
  }
  // the rest of the stream never touches a warm-up edge
  for (std::size_t i = 2; i < stream.size(); ++i)
    for (const EdgeOp& op : stream[i].ops)
      for (const EdgeOp& wu : stream[0].ops)
        CHECK_FALSE((op.from == wu.from && op.to == wu.to));

  cfg.warmup = false;
  CHECK(generate_mcr_stream(m, parts, cfg).size() == 20);
}

TEST_CASE("type counts follow the mix by largest remainder") {
  const CompositeModel m = bench_model();
  const Partitioning parts = per_model_partitioning(m);
  ScenarioConfig cfg;
  cfg.total = 20;
  cfg.mix = {0.5, 0.3, 0.2};
  cfg.warmup = false;
  const auto stream = generate_mcr_stream(m, parts, cfg);
  REQUIRE(stream.size() == 20);
  std::size_t a = 0, b = 0, c = 0;
  for (const auto& r : stream) {
    switch (classify(parts, r)) {
      case McrType::a: ++a; break;
      case McrType::b: ++b; break;
      case McrType::c: ++c; break;
    }
  }
  CHECK(a == 10);
  CHECK(b == 6);
  CHECK(c == 4);
}

TEST_CASE("request shapes match their types") {
  const CompositeModel m = bench_model();
  const Partitioning parts = per_model_partitioning(m);
  ScenarioConfig cfg;
  cfg.total = 60;
  cfg.warmup = false;
  cfg.edges_per_mcr = 3;
  const auto stream = generate_mcr_stream(m, parts, cfg);
  for (const auto& r : stream) {
    CHECK(!r.models.empty());
    std::set<std::string> sorted_models(r.models.begin(), r.models.end());
    CHECK(sorted_models.size() == r.models.size());
    const McrType t = classify(parts, r);
    if (t == McrType::a) {
      CHECK(r.ops.size() == 1);
    } else {
      CHECK(r.ops.size() == 3);
      for (const EdgeOp& op : r.ops)
        CHECK(op.kind == EdgeOp::Kind::insert);
    }
  }
}

TEST_CASE("cycle-free streams are accepted wholesale") {
  const CompositeModel m = bench_model();
  const Partitioning parts = per_model_partitioning(m);
  ScenarioConfig cfg;
  cfg.total = 80;
  cfg.seed = 7;
  const auto stream = generate_mcr_stream(m, parts, cfg);
  BruteForceChecker ref(m);
  for (const auto& r : stream) CHECK(ref.apply(r.ops));
}

TEST_CASE("cycle-permitting streams include genuine rejections") {
  const CompositeModel m = bench_model();
  const Partitioning parts = per_model_partitioning(m);
  ScenarioConfig cfg;
  cfg.total = 120;
  cfg.seed = 7;
  cfg.cycle_free_only = false;
  cfg.edges_per_mcr = 4;
  const auto stream = generate_mcr_stream(m, parts, cfg);
  BruteForceChecker ref(m);
  std::size_t rejects = 0;
  for (const auto& r : stream) rejects += !ref.apply(r.ops);
  CHECK(rejects > 0);
}

TEST_CASE("issue ticks follow the period") {
  const CompositeModel m = bench_model();
  const Partitioning parts = per_model_partitioning(m);
  ScenarioConfig cfg;
  cfg.total = 5;
  cfg.warmup = false;
  cfg.p_mcr_s = 0.01;
  cfg.tick_s = 0.001;
  // the first measured request lands one period after start
  auto stream = generate_mcr_stream(m, parts, cfg);
  for (std::size_t i = 0; i < stream.size(); ++i)
    CHECK(stream[i].issue_tick == static_cast<std::int64_t>(10 * (i + 1)));

  cfg.p_mcr_s = 0;
  stream = generate_mcr_stream(m, parts, cfg);
  for (const auto& r : stream) CHECK(r.issue_tick == 0);

  // sub-tick periods still advance one tick per request
  cfg.p_mcr_s = 0.0001;
  stream = generate_mcr_stream(m, parts, cfg);
  for (std::size_t i = 0; i < stream.size(); ++i)
    CHECK(stream[i].issue_tick == static_cast<std::int64_t>(i + 1));
}

TEST_CASE("infeasible stream requests are reported") {
  const CompositeModel single = chain_model(1);
  const Partitioning parts = per_model_partitioning(single);
  ScenarioConfig cfg;
  cfg.total = 4;
  cfg.mix = {0, 0, 1};  // type c needs at least two partitions
  CHECK_THROWS_AS(generate_mcr_stream(single, parts, cfg), ScenarioError);
}
