// Tick-based simulation driver: replays generated streams or explicit
// schedules against an oracle, records per-request stalls, and runs
// the period / type-mix / partition sweeps.
//
// Metrics CSV columns:
//   run_id, period_s, mcr_id, issue_tick, type, path_taken, verdict,
//   stall, stall_units, maintenance_active
// `stall` is nanoseconds (0 in deterministic timing), `stall_units`
// abstract work units. '#'-prefixed header lines carry the tool
// version and a config echo; the schema line is "# icd metrics v1".
// Summaries go to a separate CSV with one row per run.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "icd/model.hpp"
#include "icd/oracle.hpp"
#include "icd/scenario.hpp"

namespace icd {

struct StallRecord {
  std::uint64_t mcr_id = 0;
  std::int64_t issue_tick = 0;
  McrType type = McrType::a;
  DecisionPath path = DecisionPath::none;
  bool accepted = false;
  std::uint64_t stall_units = 0;
  std::uint64_t stall_ns = 0;
  bool maintenance_was_active = false;
};

struct MetricsReport {
  std::string run_id;
  double period_s = 0;
  TypeMix mix;                // echo
  std::size_t partitions = 0; // echo, 0 = per-model
  bool wallclock = false;
  std::vector<StallRecord> records;  // measured requests only

  // Aggregates, filled by finalize_report.
  std::uint64_t accumulated_stall_units = 0;
  std::uint64_t accumulated_stall_ns = 0;
  std::size_t count_a = 0, count_b = 0, count_c = 0;
  std::size_t accepts = 0, rejects = 0, fallbacks = 0;
  double fallback_pct = 0;
  bool saturated = false;  // every request took the fallback path
  // Stall distribution in the timing mode's unit (ns when wallclock,
  // work units otherwise).
  double stall_min = 0, stall_q1 = 0, stall_median = 0, stall_q3 = 0,
         stall_max = 0;
};

void finalize_report(MetricsReport& r);

// Drives a prepared stream through a fresh oracle. Deterministic
// timing grants cfg.unit_budget_per_tick work units per elapsed tick
// between requests; wallclock timing sleeps to each request's
// absolute issue instant while maintenance runs concurrently.
MetricsReport run_stream(const CompositeModel& model,
                         const std::vector<ModeChangeRequest>& stream,
                         const ScenarioConfig& cfg, const OracleConfig& ocfg,
                         std::string run_id);

// generate_mcr_stream + run_stream.
MetricsReport run_generated(const CompositeModel& model,
                            const ScenarioConfig& cfg,
                            const OracleConfig& ocfg, std::string run_id);

// Explicit schedule replay; safe_mode entries call the oracle's
// safe-mode fallback. Entries must be tick-ordered.
MetricsReport run_schedule(const CompositeModel& model,
                           const std::vector<ScheduleEntry>& schedule,
                           const ScenarioConfig& cfg, const OracleConfig& ocfg,
                           std::string run_id);

// Independent schedule replay against the brute-force checker;
// returns one verdict per entry.
std::vector<bool> replay_schedule_bruteforce(
    const CompositeModel& model, const std::vector<ScheduleEntry>& schedule);

struct PeriodSweep {
  std::vector<MetricsReport> runs;  // one per period, ascending
  // Largest period whose run was all-fallback.
  std::optional<double> saturation_period_s;
};
PeriodSweep sweep_period(const CompositeModel& model,
                         const ScenarioConfig& cfg, const OracleConfig& ocfg,
                         const std::vector<double>& periods_s,
                         const std::string& run_prefix);

// Simplex grid over (a,b,c) proportions: resolution 1 is the single
// even mix, resolution 2 the three corners, higher values refine.
std::vector<MetricsReport> sweep_type_mix(const CompositeModel& model,
                                          const ScenarioConfig& cfg,
                                          const OracleConfig& ocfg,
                                          std::size_t resolution,
                                          const std::string& run_prefix);

// One fixed stream (generated under the first count's partitioning)
// serviced under each partition count; reports reclassification and
// stalls per count.
std::vector<MetricsReport> sweep_partitions(const CompositeModel& model,
                                            const ScenarioConfig& cfg,
                                            const OracleConfig& ocfg,
                                            const std::vector<std::size_t>& counts,
                                            const std::string& run_prefix);

void write_metrics_csv(std::ostream& out,
                       const std::vector<MetricsReport>& runs,
                       const std::vector<std::string>& header_notes);
void write_summary_csv(std::ostream& out,
                       const std::vector<MetricsReport>& runs,
                       const std::vector<std::string>& header_notes);

}  // namespace icd
