#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "icd/generate.hpp"
#include "icd/harness.hpp"

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

StallRecord rec(std::uint64_t id, std::int64_t tick, McrType t,
                DecisionPath p, bool ok, std::uint64_t units) {
  StallRecord r;
  r.mcr_id = id;
  r.issue_tick = tick;
  r.type = t;
  r.path = p;
  r.accepted = ok;
  r.stall_units = units;
  return r;
}

}  // namespace

TEST_CASE("report aggregation and quartiles") {
  MetricsReport r;
  r.run_id = "agg";
  r.records = {
      rec(1, 0, McrType::a, DecisionPath::tc_query, true, 1),
      rec(2, 1, McrType::b, DecisionPath::tr_dfs, true, 2),
      rec(3, 2, McrType::c, DecisionPath::gc_dfs, false, 3),
      rec(4, 3, McrType::c, DecisionPath::gc_dfs_fallback, true, 4),
      rec(5, 4, McrType::a, DecisionPath::none, true, 5),
  };
  finalize_report(r);
  CHECK(r.accumulated_stall_units == 15);
  CHECK(r.count_a == 2);
  CHECK(r.count_b == 1);
  CHECK(r.count_c == 2);
  CHECK(r.accepts == 4);
  CHECK(r.rejects == 1);
  CHECK(r.fallbacks == 1);
  CHECK(r.fallback_pct == doctest::Approx(20.0));
  CHECK_FALSE(r.saturated);
  CHECK(r.stall_min == 1.0);
  CHECK(r.stall_q1 == 2.0);
  CHECK(r.stall_median == 3.0);
  CHECK(r.stall_q3 == 4.0);
  CHECK(r.stall_max == 5.0);

  MetricsReport empty;
  finalize_report(empty);
  CHECK(empty.fallback_pct == 0.0);
  CHECK_FALSE(empty.saturated);
  CHECK(empty.stall_median == 0.0);
}

TEST_CASE("metric rows serialize to the pinned layout") {
  MetricsReport r;
  r.run_id = "demo";
  r.period_s = 0.01;
  r.mix = {0.5, 0.25, 0.25};
  r.records = {
      rec(1, 0, McrType::a, DecisionPath::tc_query, true, 3),
      rec(2, 10, McrType::c, DecisionPath::gc_dfs_fallback, false, 40),
  };
  r.records[1].maintenance_was_active = true;
  finalize_report(r);

  std::ostringstream out;
  write_metrics_csv(out, {r}, {"note one"});
  CHECK(out.str() ==
        "# icd metrics v1\n"
        "# tool 0.1.0\n"
        "# note one\n"
        "# run demo period_s=0.01 mix=0.5/0.25/0.25 partitions=0 "
        "timing=deterministic\n"
        "run_id,period_s,mcr_id,issue_tick,type,path_taken,verdict,stall,"
        "stall_units,maintenance_active\n"
        "demo,0.01,1,0,a,tc-query,accept,0,3,0\n"
        "demo,0.01,2,10,c,gc-dfs-fallback,reject,0,40,1\n");

  std::ostringstream sum;
  write_summary_csv(sum, {r}, {});
  CHECK(sum.str() ==
        "# icd summary v1\n"
        "# tool 0.1.0\n"
        "# run demo period_s=0.01 mix=0.5/0.25/0.25 partitions=0 "
        "timing=deterministic\n"
        "run_id,period_s,mix_a,mix_b,mix_c,partitions,total,accepts,rejects,"
        "count_a,count_b,count_c,fallback_pct,accumulated_stall_ns,"
        "accumulated_stall_units,stall_min,stall_q1,stall_median,stall_q3,"
        "stall_max,saturated\n"
        "demo,0.01,0.5,0.25,0.25,0,2,1,1,1,0,1,50,0,43,3,12.25,21.5,30.75,"
        "40,0\n");
}

TEST_CASE("a generous budget keeps every path clean") {
  const CompositeModel m = bench_model();
  ScenarioConfig cfg;
  cfg.total = 40;
  cfg.seed = 2;
  cfg.unit_budget_per_tick = 1u << 20;
  const MetricsReport r = run_generated(m, cfg, {}, "clean");
  CHECK(r.run_id == "clean");
  CHECK(r.records.size() == 40);  // warm-up pair excluded
  CHECK(r.count_a + r.count_b + r.count_c == 40);
  CHECK(r.accepts + r.rejects == 40);
  CHECK(r.fallback_pct == 0.0);
  CHECK_FALSE(r.saturated);
  for (const auto& s : r.records) CHECK_FALSE(s.maintenance_was_active);
}

TEST_CASE("a starved budget saturates the fallback path") {
  const CompositeModel m = bench_model();
  ScenarioConfig cfg;
  cfg.total = 40;
  cfg.seed = 2;
  cfg.unit_budget_per_tick = 0;
  const MetricsReport r = run_generated(m, cfg, {}, "starved");
  CHECK(r.saturated);
  CHECK(r.fallback_pct == 100.0);
  for (const auto& s : r.records) {
    CHECK(s.maintenance_was_active);
    CHECK(s.path == DecisionPath::gc_dfs_fallback);
  }
}

TEST_CASE("deterministic runs are bit-stable") {
  const CompositeModel m = bench_model();
  ScenarioConfig cfg;
  cfg.total = 30;
  cfg.seed = 6;
  cfg.unit_budget_per_tick = 700;
  const MetricsReport r1 = run_generated(m, cfg, {}, "stable");
  const MetricsReport r2 = run_generated(m, cfg, {}, "stable");
  std::ostringstream a, b;
  write_metrics_csv(a, {r1}, {});
  write_metrics_csv(b, {r2}, {});
  CHECK(a.str() == b.str());
}

TEST_CASE("schedules replay entry by entry") {
  const CompositeModel m = chain_model(3, true);
  std::vector<ScheduleEntry> schedule(4);
  schedule[0].tick = 0;
  schedule[0].models = {"m0"};
  schedule[0].ops = {{EdgeOp::Kind::erase, "m0.i", "m0.o"}};
  schedule[0].target_modes = {{"m0", "off"}};
  schedule[1].tick = 5;
  schedule[1].models = {"m2"};
  schedule[1].ops = {{EdgeOp::Kind::insert, "m2.i", "m2.o"}};
  schedule[1].target_modes = {{"m2", "on"}};  // ring reopened by entry 0
  schedule[2].tick = 10;
  schedule[2].models = {"m0"};
  schedule[2].ops = {{EdgeOp::Kind::insert, "m0.i", "m0.o"}};
  schedule[2].target_modes = {{"m0", "on"}};  // would close the ring
  schedule[3].tick = 15;
  schedule[3].safe_mode = "m1";

  const MetricsReport r = run_schedule(m, schedule, {}, {}, "sched");
  REQUIRE(r.records.size() == 4);
  CHECK(r.records[0].accepted);
  CHECK(r.records[1].accepted);
  CHECK_FALSE(r.records[2].accepted);
  CHECK(r.records[3].accepted);
  CHECK(r.records[3].path == DecisionPath::none);

  const std::vector<bool> ref = replay_schedule_bruteforce(m, schedule);
  REQUIRE(ref.size() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(ref[i] == r.records[i].accepted);
}

TEST_CASE("period sweeps tag runs and find the saturation point") {
  const CompositeModel m = bench_model();
  ScenarioConfig cfg;
  cfg.total = 25;
  cfg.seed = 4;
  cfg.unit_budget_per_tick = 1u << 20;
  const PeriodSweep sw =
      sweep_period(m, cfg, {}, {0.0, 0.01}, "ps");
  REQUIRE(sw.runs.size() == 2);
  CHECK(sw.runs[0].run_id == "ps-p0");
  CHECK(sw.runs[1].run_id == "ps-p0.01");
  CHECK(sw.runs[0].period_s == 0.0);
  // period zero grants no inter-request ticks, so no budget ever
  CHECK(sw.runs[0].saturated);
  CHECK_FALSE(sw.runs[1].saturated);
  REQUIRE(sw.saturation_period_s.has_value());
  CHECK(*sw.saturation_period_s == 0.0);
}

TEST_CASE("type-mix sweeps enumerate the simplex grid") {
  const CompositeModel m = bench_model();
  ScenarioConfig cfg;
  cfg.total = 12;
  cfg.seed = 4;
  const auto even = sweep_type_mix(m, cfg, {}, 1, "mx");
  REQUIRE(even.size() == 1);
  CHECK(even[0].run_id == "mx-mix-even");

  const auto corners = sweep_type_mix(m, cfg, {}, 2, "mx");
  REQUIRE(corners.size() == 3);
  CHECK(corners[0].run_id == "mx-mix0-0-1");
  CHECK(corners[0].count_c == 12);
  CHECK(corners[1].run_id == "mx-mix0-1-0");
  CHECK(corners[1].count_b == 12);
  CHECK(corners[2].run_id == "mx-mix1-0-0");
  CHECK(corners[2].count_a == 12);

  CHECK(sweep_type_mix(m, cfg, {}, 3, "mx").size() == 6);
}

TEST_CASE("partition sweeps reclassify one fixed stream") {
  GeneratorParams gp;
  gp.ports = 120;
  gp.models = 10;
  gp.target_edges = 300;
  gp.seed = 30;
  const CompositeModel m = generate_random_dag(gp);
  ScenarioConfig cfg;
  cfg.total = 40;
  cfg.seed = 8;
  cfg.mix = {0.2, 0.2, 0.6};
  cfg.edges_per_mcr = 3;
  const auto runs = sweep_partitions(m, cfg, {}, {10, 5, 2, 1}, "pk");
  REQUIRE(runs.size() == 4);
  CHECK(runs[0].run_id == "pk-k10");
  CHECK(runs[3].run_id == "pk-k1");
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(runs[i].records.size() == 40);
    CHECK(runs[i].count_a == runs[0].count_a);  // single-op share is fixed
  }
  // coarser partitions only grow the one-partition share
  for (std::size_t i = 1; i < 4; ++i)
    CHECK(runs[i].count_b >= runs[i - 1].count_b);
  CHECK(runs[3].count_c == 0);
}
