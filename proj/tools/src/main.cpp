// icd: generate models, check them offline, replay scenarios, run the
// benchmark sweeps, and verify the oracle against brute force.
//
// Exit codes: 0 success, 1 domain failure (cycle where none allowed,
// verdict mismatch), 2 usage error.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "icd/bruteforce.hpp"
#include "icd/generate.hpp"
#include "icd/harness.hpp"
#include "icd/model.hpp"
#include "icd/oracle.hpp"
#include "icd/rng.hpp"
#include "icd/scenario.hpp"
#include "icd/stats.hpp"
#include "icd/workpiece.hpp"

namespace fs = std::filesystem;
using namespace icd;

namespace {

std::uint64_t env_seed() {
  if (const char* s = std::getenv("ICD_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end && *end == '\0') return v;
    std::cerr << "warning: ignoring non-numeric ICD_SEED\n";
  }
  return 1;
}

fs::path out_dir() {
  if (const char* d = std::getenv("ICD_OUT_DIR")) return fs::path(d);
  return fs::path(".");
}

// Relative output paths land in ICD_OUT_DIR (default ".").
fs::path place(const fs::path& p) {
  if (p.is_absolute()) return p;
  return out_dir() / p;
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

struct OracleFlags {
  std::string arith = "modular";
  std::uint64_t modulus = kDefaultModulus;
  std::size_t partitions = 0;  // 0 = per-model
  std::uint64_t recompute_threshold = 0;
  bool inexact_mixed = false;
  std::string timing = "deterministic";

  OracleConfig to_config() const {
    OracleConfig cfg;
    if (arith == "exact")
      cfg.arithmetic = CountMode::exact;
    else if (arith == "modular")
      cfg.arithmetic = CountMode::modular;
    else
      throw Error("unknown --arith value '" + arith + "'");
    cfg.modulus = modulus;
    if (partitions > 0) {
      cfg.partition_scheme = OracleConfig::PartitionScheme::fixed_count;
      cfg.partition_count = partitions;
    }
    cfg.recompute_threshold = recompute_threshold;
    cfg.exact_mixed = !inexact_mixed;
    if (timing == "deterministic")
      cfg.timing = OracleConfig::Timing::deterministic;
    else if (timing == "wallclock")
      cfg.timing = OracleConfig::Timing::wallclock;
    else
      throw Error("unknown --timing value '" + timing + "'");
    return cfg;
  }
};

void add_oracle_flags(CLI::App* cmd, OracleFlags& f) {
  cmd->add_option("--arith", f.arith, "count arithmetic: modular | exact")
      ->capture_default_str();
  cmd->add_option("--modulus", f.modulus, "modular-arithmetic prime")
      ->capture_default_str();
  cmd->add_option("--partitions", f.partitions,
                  "fixed partition count (0 = one per model)")
      ->capture_default_str();
  cmd->add_option("--recompute-threshold", f.recompute_threshold,
                  "batch size forcing a closure rebuild (0 = |V_c|)")
      ->capture_default_str();
  cmd->add_flag("--inexact-mixed", f.inexact_mixed,
                "keep mixed insert+delete type-b requests on the reduction "
                "(conservative rejects possible)");
  cmd->add_option("--timing", f.timing, "deterministic | wallclock")
      ->capture_default_str();
}

struct StreamFlags {
  std::uint64_t seed = env_seed();
  double period = -1;  // <0 = keep scenario value
  std::int64_t total = -1;
  std::vector<double> mix;
  std::int64_t edges_per_mcr = -1;
  std::int64_t models_per_mcr = -1;
  double tick = -1;
  std::int64_t budget = -1;
  bool no_warmup = false;
  bool allow_cycles = false;

  void apply(ScenarioConfig& cfg, bool seed_given) const {
    if (seed_given) cfg.seed = seed;
    if (period >= 0) cfg.p_mcr_s = period;
    if (total >= 0) cfg.total = static_cast<std::size_t>(total);
    if (!mix.empty()) {
      if (mix.size() != 3) throw Error("--mix needs three proportions a,b,c");
      cfg.mix = {mix[0], mix[1], mix[2]};
    }
    if (edges_per_mcr >= 0)
      cfg.edges_per_mcr = static_cast<std::size_t>(edges_per_mcr);
    if (models_per_mcr >= 0)
      cfg.models_per_mcr = static_cast<std::size_t>(models_per_mcr);
    if (tick > 0) cfg.tick_s = tick;
    if (budget >= 0) cfg.unit_budget_per_tick = static_cast<std::uint64_t>(budget);
    if (no_warmup) cfg.warmup = false;
    if (allow_cycles) cfg.cycle_free_only = false;
  }
};

void add_stream_flags(CLI::App* cmd, StreamFlags& f) {
  cmd->add_option("--seed", f.seed, "stream seed (env ICD_SEED)")
      ->capture_default_str();
  cmd->add_option("--period", f.period, "request period p_mcr_s, seconds");
  cmd->add_option("--total", f.total, "number of requests");
  cmd->add_option("--mix", f.mix, "type proportions a,b,c")->delimiter(',');
  cmd->add_option("--edges-per-mcr", f.edges_per_mcr, "ops per b/c request");
  cmd->add_option("--models-per-mcr", f.models_per_mcr,
                  "partitions a type-c request draws from");
  cmd->add_option("--tick", f.tick, "simulated tick period, seconds");
  cmd->add_option("--budget", f.budget,
                  "deterministic maintenance work units per tick");
  cmd->add_flag("--no-warmup", f.no_warmup, "skip the warm-up requests");
  cmd->add_flag("--allow-cycles", f.allow_cycles,
                "let generated requests close cycles (rejections expected)");
}

std::string config_note(const ScenarioConfig& c, const OracleConfig& o) {
  std::ostringstream s;
  s << "seed=" << c.seed << " total=" << c.total << " tick_s=" << c.tick_s
    << " budget=" << c.unit_budget_per_tick << " edges_per_mcr="
    << c.edges_per_mcr << " cycle_free=" << (c.cycle_free_only ? 1 : 0)
    << " arith="
    << (o.arithmetic == CountMode::exact ? "exact" : "modular")
    << " exact_mixed=" << (o.exact_mixed ? 1 : 0);
  return s.str();
}

void emit_reports(const fs::path& csv_path,
                  const std::vector<MetricsReport>& runs,
                  const std::vector<std::string>& notes) {
  {
    if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
    std::ofstream out(csv_path);
    if (!out) throw Error("cannot write " + csv_path.string());
    write_metrics_csv(out, runs, notes);
  }
  fs::path summary = csv_path;
  summary.replace_filename(csv_path.stem().string() + "-summary" +
                           csv_path.extension().string());
  std::ofstream out(summary);
  if (!out) throw Error("cannot write " + summary.string());
  write_summary_csv(out, runs, notes);
}

void print_run_summary(const MetricsReport& r) {
  std::cout << "run " << r.run_id << ": requests=" << r.records.size()
            << " accepts=" << r.accepts << " rejects=" << r.rejects
            << " types=" << r.count_a << "/" << r.count_b << "/" << r.count_c
            << " fallback=" << r.fallback_pct << "%"
            << " stall_units=" << r.accumulated_stall_units;
  if (r.wallclock) std::cout << " stall_ns=" << r.accumulated_stall_ns;
  if (r.saturated) std::cout << " saturated";
  std::cout << "\n";
}

// ---- generate ----

int cmd_generate(std::size_t ports, std::size_t models, std::uint64_t edges,
                 std::uint64_t seed, const std::string& out,
                 const std::string& scenario_out, const StreamFlags& sf) {
  GeneratorParams gp;
  gp.ports = ports;
  gp.models = models;
  gp.target_edges =
      edges != 0 || ports == 0
          ? edges
          : static_cast<std::uint64_t>(ports) * (ports - 1) / 8;
  gp.seed = seed;
  const CompositeModel model = generate_random_dag(gp);
  const CompositeGraph g = build_composite_graph(model);
  const fs::path model_path = place(out);
  save_composite(model, model_path);
  std::cout << "# icd " << kVersion << " generate seed=" << seed << "\n";
  std::cout << "model " << model_path.string() << ": ports=" << g.size()
            << " edges=" << g.edge_count() << " models="
            << model.models().size() << "\n";
  if (!scenario_out.empty()) {
    ScenarioFile sc;
    ScenarioConfig cfg;
    sf.apply(cfg, false);
    cfg.seed = seed + 1;  // stream seed split from the model seed
    validate_scenario_config(cfg);
    sc.generator = cfg;
    const fs::path sc_path = place(scenario_out);
    save_scenario(sc, sc_path);
    std::cout << "scenario " << sc_path.string() << ": seed=" << cfg.seed
              << " total=" << cfg.total << "\n";
  }
  return 0;
}

// ---- check ----

int cmd_check(const std::string& model_file, const OracleFlags& of) {
  using clock = std::chrono::steady_clock;
  CompositeModel model;
  try {
    model = load_composite(model_file);
  } catch (const ModelError& e) {
    std::cout << "invalid: " << e.what() << "\n";
    return 1;
  }
  const OracleConfig cfg = of.to_config();
  const auto t0 = clock::now();
  const CompositeGraph g = build_composite_graph(model);
  const auto t1 = clock::now();
  const PathCountClosure closure =
      PathCountClosure::from_graph(g, cfg.arithmetic, cfg.modulus);
  const auto t2 = clock::now();
  const Partitioning parts = make_partitioning(model, cfg);
  const auto reductions = update_tr(closure, parts);
  const auto t3 = clock::now();

  auto ms = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration_cast<std::chrono::microseconds>(b - a)
               .count() /
           1000.0;
  };
  std::cout << "# icd " << kVersion << " check\n";
  std::cout << "acyclic: yes\n";
  std::cout << "ports=" << g.size() << " edges=" << g.edge_count()
            << " models=" << model.models().size() << " partitions="
            << parts.num_parts() << "\n";
  std::cout << "build_ms graph=" << ms(t0, t1) << " closure=" << ms(t1, t2)
            << " reductions=" << ms(t2, t3) << "\n";
  for (const auto& red : reductions)
    std::cout << "partition " << red.partition_index() << ": vertices="
              << red.size() << " reduced_edges=" << red.edge_count() << "\n";
  return 0;
}

// ---- run ----

int cmd_run(const std::string& model_file, const std::string& scenario_file,
            const std::string& out, const OracleFlags& of,
            const StreamFlags& sf, bool seed_given, std::string run_id) {
  const CompositeModel model = load_composite(model_file);
  const ScenarioFile sc = load_scenario(scenario_file);
  const OracleConfig ocfg = of.to_config();

  MetricsReport report;
  ScenarioConfig cfg;  // echo for notes
  if (sc.generator) {
    cfg = *sc.generator;
    sf.apply(cfg, seed_given);
    validate_scenario_config(cfg);
    if (run_id.empty()) run_id = "run-s" + std::to_string(cfg.seed);
    report = run_generated(model, cfg, ocfg, run_id);
  } else {
    sf.apply(cfg, seed_given);
    if (run_id.empty()) run_id = "schedule";
    report = run_schedule(model, *sc.schedule, cfg, ocfg, run_id);
  }
  emit_reports(place(out), {report}, {config_note(cfg, ocfg)});
  print_run_summary(report);
  return 0;
}

// ---- sweep ----

int cmd_sweep(const std::string& model_file, const std::string& scenario_file,
              const std::string& out, const OracleFlags& of,
              const StreamFlags& sf, bool seed_given,
              const std::vector<double>& periods, std::size_t mix_resolution,
              const std::vector<std::size_t>& partition_counts) {
  const int chosen = (!periods.empty() ? 1 : 0) + (mix_resolution > 0 ? 1 : 0) +
                     (!partition_counts.empty() ? 1 : 0);
  if (chosen != 1) {
    std::cerr << "usage error: pick exactly one of --periods, "
                 "--mix-resolution, --partition-counts\n";
    return 2;
  }
  const CompositeModel model = load_composite(model_file);
  const ScenarioFile sc = load_scenario(scenario_file);
  if (!sc.generator)
    throw Error("sweeps need a generator-form scenario file");
  ScenarioConfig cfg = *sc.generator;
  sf.apply(cfg, seed_given);
  validate_scenario_config(cfg);
  const OracleConfig ocfg = of.to_config();

  std::vector<MetricsReport> runs;
  std::optional<double> saturation;
  if (!periods.empty()) {
    std::vector<double> ps = periods;
    std::sort(ps.begin(), ps.end());
    PeriodSweep sw = sweep_period(model, cfg, ocfg, ps, "sweep");
    saturation = sw.saturation_period_s;
    runs = std::move(sw.runs);
  } else if (mix_resolution > 0) {
    runs = sweep_type_mix(model, cfg, ocfg, mix_resolution, "sweep");
  } else {
    runs = sweep_partitions(model, cfg, ocfg, partition_counts, "sweep");
  }
  emit_reports(place(out), runs, {config_note(cfg, ocfg)});
  for (const MetricsReport& r : runs) print_run_summary(r);
  if (!periods.empty()) {
    if (saturation)
      std::cout << "saturation_period_s=" << *saturation << "\n";
    else
      std::cout << "saturation_period_s=none\n";
  }
  return 0;
}

// ---- verify ----

struct VerifyStats {
  std::size_t mcrs = 0;
  std::size_t closure_checks = 0;
  std::size_t reduction_checks = 0;
};

void write_reproducer(const CompositeModel& model,
                      const std::vector<ModeChangeRequest>& stream,
                      std::size_t failed_index) {
  const fs::path mp = place("verify-repro-model.json");
  save_composite(model, mp);
  ScenarioFile sc;
  std::vector<ScheduleEntry> entries;
  for (std::size_t i = 0; i <= failed_index && i < stream.size(); ++i) {
    ScheduleEntry e;
    e.tick = static_cast<std::int64_t>(i);
    e.models = stream[i].models;
    for (const EdgeOp& op : stream[i].ops)
      e.ops.push_back({op.kind, model.port_name(op.from),
                       model.port_name(op.to)});
    entries.push_back(std::move(e));
  }
  sc.schedule = std::move(entries);
  const fs::path sp = place("verify-repro-scenario.json");
  save_scenario(sc, sp);
  std::cerr << "reproducer: " << mp.string() << " + " << sp.string()
            << " (failure at entry " << failed_index << ")\n";
}

// Differential sweep for one model size under several maintenance
// budgets; returns false (after writing a reproducer) on mismatch.
bool verify_size(std::size_t ports, std::size_t models, std::size_t trials,
                 std::uint64_t seed, bool exact, bool inject_fault,
                 VerifyStats& vs) {
  GeneratorParams gp;
  gp.ports = ports;
  gp.models = models;
  gp.target_edges = static_cast<std::uint64_t>(ports) * (ports - 1) / 8;
  gp.seed = seed;
  const CompositeModel model = generate_random_dag(gp);

  OracleConfig ocfg;
  ocfg.arithmetic = exact ? CountMode::exact : CountMode::modular;
  if (inject_fault) ocfg.fault_mask = kFaultSkipRevert;

  const Partitioning parts = make_partitioning(model, ocfg);
  const std::uint64_t budgets[3] = {0, 2000,
                                    std::numeric_limits<std::uint64_t>::max()};
  const std::size_t per = std::max<std::size_t>(1, trials / 3);
  for (int b = 0; b < 3; ++b) {
    ScenarioConfig cfg;
    cfg.seed = seed + 100 + static_cast<std::uint64_t>(b);
    cfg.total = per;
    cfg.cycle_free_only = false;  // rejections are the interesting half
    cfg.edges_per_mcr = 4;
    cfg.p_mcr_s = 0;
    const auto stream = generate_mcr_stream(model, parts, cfg);
    const DifferentialResult r =
        run_differential(model, stream, ocfg, budgets[b]);
    vs.mcrs += stream.size();
    if (!r.ok) {
      std::cerr << "mismatch at |V_c|=" << ports << " budget=" << budgets[b]
                << " mcr=" << r.failed_mcr << ": " << r.detail << "\n";
      write_reproducer(model, stream, r.failed_index);
      return false;
    }
  }
  return true;
}

bool verify_closure_properties(std::uint64_t seed, std::size_t sequences,
                               VerifyStats& vs) {
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < sequences; ++s) {
    const std::size_t n = 4 + uniform_below(rng, 9);  // 4..12
    CompositeGraph g(n);
    PathCountClosure cl(n, CountMode::exact);
    for (int step = 0; step < 50; ++step) {
      const PortId u = static_cast<PortId>(uniform_below(rng, n));
      const PortId v = static_cast<PortId>(uniform_below(rng, n));
      if (u == v) continue;
      if (g.has_edge(u, v)) {
        g.remove_edge(u, v);
        cl.erase_edge(u, v);
      } else if (!cl.would_close_cycle(u, v)) {
        g.add_edge(u, v);
        cl.insert_edge(u, v);
      }
      PathCountClosure ref = PathCountClosure::from_graph(g, CountMode::exact);
      ++vs.closure_checks;
      if (!(ref == cl)) {
        std::cerr << "closure differential failed (seq " << s << ", step "
                  << step << ")\n";
        return false;
      }
    }
  }
  return true;
}

bool verify_reduction_properties(std::uint64_t seed, std::size_t count,
                                 VerifyStats& vs) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    GeneratorParams gp;
    gp.models = 1 + uniform_below(rng, 4);
    const std::size_t per = 2 + 2 * uniform_below(rng, 4);  // 2..8, even
    gp.ports = gp.models * per;
    const std::uint64_t cap =
        static_cast<std::uint64_t>(gp.ports / 2) * (gp.ports / 2);
    gp.target_edges = uniform_below(rng, cap / 2 + 1);
    gp.seed = rng();
    const CompositeModel model = generate_random_dag(gp);
    const CompositeGraph g = build_composite_graph(model);
    const PathCountClosure cl =
        PathCountClosure::from_graph(g, CountMode::exact);
    const Partitioning parts = per_model_partitioning(model);
    const auto reds = update_tr(cl, parts);
    for (const auto& red : reds) {
      for (PortId a : red.vertices())
        for (PortId b : red.vertices()) {
          if (a == b) continue;
          ++vs.reduction_checks;
          if (red.reachable(a, b) != cl.reachable(a, b)) {
            std::cerr << "reduction reachability mismatch (model " << i
                      << ")\n";
            return false;
          }
        }
    }
  }
  return true;
}

int cmd_verify(const std::vector<std::size_t>& sizes, std::size_t trials,
               std::uint64_t seed, bool inject_fault) {
  if (trials == 0) {
    std::cout << "warning: trials=0, vacuous pass\n";
    return 0;
  }
  VerifyStats vs;
  const std::size_t per_size = std::max<std::size_t>(1, trials / sizes.size());
  for (const std::size_t v : sizes) {
    std::size_t models = 1;
    if (v % 20 == 0)
      models = (v >= 200 ? 10 : 5);
    else if (v % 10 == 0)
      models = 5;
    else if (v % 4 == 0)
      models = 2;
    const bool exact = v <= 50;
    if (!verify_size(v, models, per_size, seed, exact, inject_fault, vs))
      return 1;
    std::cout << "size " << v << ": ok (" << per_size << "+ requests, "
              << (exact ? "exact" : "modular") << ")\n";
  }
  if (!verify_closure_properties(seed + 1, 50, vs)) return 1;
  if (!verify_reduction_properties(seed + 2, 30, vs)) return 1;
  std::cout << "verify: ok, " << vs.mcrs << " differential requests, "
            << vs.closure_checks << " closure checks, " << vs.reduction_checks
            << " reduction pair checks\n";
  return 0;
}

// ---- demo-workpiece ----

int cmd_demo_workpiece(const OracleFlags& of, std::uint64_t lag_budget,
                       const std::string& out) {
  const CompositeModel model = build_workpiece_model();
  const auto schedule = workpiece_schedule();
  const auto expected = workpiece_expected_verdicts();

  const fs::path model_path = place("workpiece-model.json");
  save_composite(model, model_path);
  ScenarioFile sc;
  sc.schedule = schedule;
  const fs::path sc_path = place("workpiece-scenario.json");
  save_scenario(sc, sc_path);

  const OracleConfig ocfg = of.to_config();
  ScenarioConfig cfg;
  const MetricsReport report =
      run_schedule(model, schedule, cfg, ocfg, "workpiece");
  const auto reference = replay_schedule_bruteforce(model, schedule);

  std::cout << "# icd " << kVersion << " demo-workpiece\n";
  std::cout << "model " << model_path.string() << ", scenario "
            << sc_path.string() << "\n";
  bool ok = true;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const ScheduleEntry& e = schedule[i];
    const StallRecord& rec = report.records[i];
    std::ostringstream what;
    if (!e.safe_mode.empty())
      what << e.safe_mode << " -> safe mode";
    else
      what << e.models.front() << " -> "
           << e.target_modes.begin()->second;
    std::cout << "tick " << e.tick << " " << what.str() << ": "
              << (rec.accepted ? "accept" : "reject") << " ("
              << to_string(rec.path) << ")\n";
    if (rec.accepted != expected[i] || rec.accepted != reference[i]) {
      std::cout << "  MISMATCH: expected "
                << (expected[i] ? "accept" : "reject") << ", reference "
                << (reference[i] ? "accept" : "reject") << "\n";
      ok = false;
    }
  }
  emit_reports(place(out), {report}, {"workpiece schedule"});
  const std::uint64_t lag = report.wallclock ? report.accumulated_stall_ns
                                             : report.accumulated_stall_units;
  std::cout << "accumulated_stall=" << lag
            << (report.wallclock ? " ns" : " units") << " lag_budget="
            << lag_budget << " within_budget="
            << (lag <= lag_budget ? "yes" : "no") << "\n";
  print_run_summary(report);
  if (!ok) {
    std::cerr << "error: verdicts diverged from the reference\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online instantaneous-cycle-detection oracle toolkit"};
  app.require_subcommand(1);
  std::function<int()> action;

  // generate
  auto* g = app.add_subcommand("generate", "write a random composite model");
  static std::size_t g_ports = 0, g_models = 10;
  static std::uint64_t g_edges = 0, g_seed = env_seed();
  static std::string g_out = "model.json", g_scenario_out;
  static StreamFlags g_sf;
  g->add_option("--ports", g_ports, "total port count")->required();
  g->add_option("--models", g_models, "component count")->capture_default_str();
  g->add_option("--edges", g_edges,
                "target edge count (default ports*(ports-1)/8)");
  g->add_option("--seed", g_seed, "generator seed (env ICD_SEED)")
      ->capture_default_str();
  g->add_option("--out", g_out, "model file path")->capture_default_str();
  g->add_option("--scenario-out", g_scenario_out,
                "also write a generator-form scenario file");
  g->add_option("--period", g_sf.period, "scenario request period, seconds");
  g->add_option("--total", g_sf.total, "scenario request count");
  g->add_option("--mix", g_sf.mix, "scenario type proportions a,b,c")
      ->delimiter(',');
  g->callback([&] {
    action = [] {
      return cmd_generate(g_ports, g_models, g_edges, g_seed, g_out,
                          g_scenario_out, g_sf);
    };
  });

  // check
  auto* c = app.add_subcommand("check", "offline-validate a model file");
  static std::string c_model;
  static OracleFlags c_of;
  c->add_option("model", c_model, "model file")->required();
  add_oracle_flags(c, c_of);
  c->callback([&] { action = [] { return cmd_check(c_model, c_of); }; });

  // run
  auto* r = app.add_subcommand("run", "replay a scenario against the oracle");
  static std::string r_model, r_scenario, r_out = "metrics.csv", r_run_id;
  static OracleFlags r_of;
  static StreamFlags r_sf;
  r->add_option("--model", r_model, "model file")->required();
  r->add_option("--scenario", r_scenario, "scenario file")->required();
  r->add_option("--out", r_out, "metrics CSV path")->capture_default_str();
  r->add_option("--run-id", r_run_id, "run id for the CSV");
  add_oracle_flags(r, r_of);
  static CLI::Option* r_seed_opt = nullptr;
  add_stream_flags(r, r_sf);
  r_seed_opt = r->get_option("--seed");
  r->callback([&] {
    action = [] {
      return cmd_run(r_model, r_scenario, r_out, r_of, r_sf,
                     r_seed_opt->count() > 0, r_run_id);
    };
  });

  // sweep
  auto* s = app.add_subcommand("sweep", "period / mix / partition sweeps");
  static std::string s_model, s_scenario, s_out = "sweep.csv";
  static OracleFlags s_of;
  static StreamFlags s_sf;
  static std::vector<double> s_periods;
  static std::size_t s_mix_res = 0;
  static std::vector<std::size_t> s_counts;
  s->add_option("--model", s_model, "model file")->required();
  s->add_option("--scenario", s_scenario, "generator-form scenario file")
      ->required();
  s->add_option("--out", s_out, "metrics CSV path")->capture_default_str();
  s->add_option("--periods", s_periods, "request periods to sweep, seconds")
      ->delimiter(',');
  s->add_option("--mix-resolution", s_mix_res,
                "simplex grid resolution over (a,b,c)");
  s->add_option("--partition-counts", s_counts,
                "fixed partition counts to sweep")
      ->delimiter(',');
  add_oracle_flags(s, s_of);
  static CLI::Option* s_seed_opt = nullptr;
  add_stream_flags(s, s_sf);
  s_seed_opt = s->get_option("--seed");
  s->callback([&] {
    action = [] {
      return cmd_sweep(s_model, s_scenario, s_out, s_of, s_sf,
                       s_seed_opt->count() > 0, s_periods, s_mix_res,
                       s_counts);
    };
  });

  // verify
  auto* v = app.add_subcommand("verify",
                               "differential-test the oracle against brute "
                               "force");
  static std::vector<std::size_t> v_sizes = {20, 50, 100, 200, 400};
  static std::size_t v_trials = 10000;
  static std::uint64_t v_seed = env_seed();
  static bool v_fault = false;
  v->add_option("--sizes", v_sizes, "composite sizes |V_c|")
      ->delimiter(',')
      ->capture_default_str();
  v->add_option("--trials", v_trials, "total differential requests")
      ->capture_default_str();
  v->add_option("--seed", v_seed, "suite seed (env ICD_SEED)")
      ->capture_default_str();
  v->add_flag("--inject-fault", v_fault,
              "skip the reject-revert step (must make verify fail)");
  v->callback([&] {
    action = [] { return cmd_verify(v_sizes, v_trials, v_seed, v_fault); };
  });

  // demo-workpiece
  auto* w = app.add_subcommand("demo-workpiece",
                               "run the bundled workpiece-sorting scenario");
  static OracleFlags w_of;
  static std::uint64_t w_lag = 10'000'000;
  static std::string w_out = "workpiece-metrics.csv";
  add_oracle_flags(w, w_of);
  w->add_option("--lag-budget", w_lag,
                "stall budget (work units, ns when --timing wallclock)")
      ->capture_default_str();
  w->add_option("--out", w_out, "metrics CSV path")->capture_default_str();
  w->callback(
      [&] { action = [] { return cmd_demo_workpiece(w_of, w_lag, w_out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return action();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
