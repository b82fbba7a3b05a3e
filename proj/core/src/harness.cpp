#include "icd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <thread>

#include "icd/bruteforce.hpp"
#include "icd/stats.hpp"

namespace icd {

namespace {

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::size_t partition_echo(const CompositeModel& model,
                           const OracleConfig& ocfg) {
  switch (ocfg.partition_scheme) {
    case OracleConfig::PartitionScheme::fixed_count:
      return ocfg.partition_count;
    case OracleConfig::PartitionScheme::grouped:
      return ocfg.partition_groups.size();
    case OracleConfig::PartitionScheme::per_model:
      return model.models().size();
  }
  return 0;
}

}  // namespace

void finalize_report(MetricsReport& r) {
  r.accumulated_stall_units = 0;
  r.accumulated_stall_ns = 0;
  r.count_a = r.count_b = r.count_c = 0;
  r.accepts = r.rejects = r.fallbacks = 0;
  std::vector<double> stalls;
  stalls.reserve(r.records.size());
  for (const StallRecord& rec : r.records) {
    r.accumulated_stall_units += rec.stall_units;
    r.accumulated_stall_ns += rec.stall_ns;
    switch (rec.type) {
      case McrType::a: ++r.count_a; break;
      case McrType::b: ++r.count_b; break;
      case McrType::c: ++r.count_c; break;
    }
    (rec.accepted ? r.accepts : r.rejects) += 1;
    if (rec.path == DecisionPath::gc_dfs_fallback) ++r.fallbacks;
    stalls.push_back(static_cast<double>(r.wallclock ? rec.stall_ns
                                                     : rec.stall_units));
  }
  const std::size_t n = r.records.size();
  r.fallback_pct = n == 0 ? 0.0
                          : 100.0 * static_cast<double>(r.fallbacks) /
                                static_cast<double>(n);
  r.saturated = n > 0 && r.fallbacks == n;
  std::sort(stalls.begin(), stalls.end());
  r.stall_min = quantile_sorted(stalls, 0.0);
  r.stall_q1 = quantile_sorted(stalls, 0.25);
  r.stall_median = quantile_sorted(stalls, 0.5);
  r.stall_q3 = quantile_sorted(stalls, 0.75);
  r.stall_max = quantile_sorted(stalls, 1.0);
  if (n == 0)
    r.stall_min = r.stall_q1 = r.stall_median = r.stall_q3 = r.stall_max = 0;
}

MetricsReport run_stream(const CompositeModel& model,
                         const std::vector<ModeChangeRequest>& stream,
                         const ScenarioConfig& cfg, const OracleConfig& ocfg,
                         std::string run_id) {
  Oracle oracle(model, ocfg);
  MetricsReport r;
  r.run_id = std::move(run_id);
  r.period_s = cfg.p_mcr_s;
  r.mix = cfg.mix;
  r.partitions = partition_echo(model, ocfg);
  r.wallclock = ocfg.timing == OracleConfig::Timing::wallclock;

  const auto t0 = std::chrono::steady_clock::now();
  std::int64_t last_tick = 0;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const ModeChangeRequest& mcr = stream[i];
    if (r.wallclock) {
      const auto target =
          t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double>(
                       static_cast<double>(mcr.issue_tick) * cfg.tick_s));
      // Coarse sleep, then spin the rest: sub-millisecond periods need
      // more precision than sleep_until delivers, and the spin keeps
      // the core from dropping into an idle state whose wake-up cost
      // would land in the next stall measurement.
      const auto spin_margin = std::chrono::milliseconds(2);
      if (std::chrono::steady_clock::now() + spin_margin < target)
        std::this_thread::sleep_until(target - spin_margin);
      while (std::chrono::steady_clock::now() < target) {
      }
    } else {
      const std::int64_t gap = mcr.issue_tick - last_tick;
      if (gap > 0 && cfg.unit_budget_per_tick > 0)
        oracle.run_maintenance_step(static_cast<std::uint64_t>(gap) *
                                    cfg.unit_budget_per_tick);
    }
    const McrDecision d = oracle.service_mcr(mcr);
    last_tick = mcr.issue_tick;
    if (mcr.warmup) {
      // Settle between the warm-up pair; otherwise the re-insert
      // cancels against the erase in the pending batch and measurement
      // would always start from an idle oracle.
      if (i + 1 < stream.size() && stream[i + 1].warmup)
        oracle.drain_maintenance();
      continue;
    }
    r.records.push_back({d.mcr_id, mcr.issue_tick, d.type, d.path, d.accepted,
                         d.stall_units, d.stall_ns,
                         d.maintenance_was_active});
  }
  finalize_report(r);
  return r;
}

MetricsReport run_generated(const CompositeModel& model,
                            const ScenarioConfig& cfg,
                            const OracleConfig& ocfg, std::string run_id) {
  const Partitioning parts = make_partitioning(model, ocfg);
  const auto stream = generate_mcr_stream(model, parts, cfg);
  return run_stream(model, stream, cfg, ocfg, std::move(run_id));
}

MetricsReport run_schedule(const CompositeModel& model,
                           const std::vector<ScheduleEntry>& schedule,
                           const ScenarioConfig& cfg, const OracleConfig& ocfg,
                           std::string run_id) {
  Oracle oracle(model, ocfg);
  MetricsReport r;
  r.run_id = std::move(run_id);
  r.period_s = 0;
  r.partitions = partition_echo(model, ocfg);
  r.wallclock = ocfg.timing == OracleConfig::Timing::wallclock;

  const auto t0 = std::chrono::steady_clock::now();
  std::int64_t last_tick = 0;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const ScheduleEntry& entry = schedule[i];
    if (r.wallclock) {
      const auto target =
          t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double>(
                       static_cast<double>(entry.tick) * cfg.tick_s));
      std::this_thread::sleep_until(target);
    } else {
      const std::int64_t gap = entry.tick - last_tick;
      if (gap > 0 && cfg.unit_budget_per_tick > 0)
        oracle.run_maintenance_step(static_cast<std::uint64_t>(gap) *
                                    cfg.unit_budget_per_tick);
    }
    McrDecision d;
    if (!entry.safe_mode.empty()) {
      d = oracle.safe_mode_fallback(entry.safe_mode, i + 1);
    } else {
      ModeChangeRequest mcr;
      mcr.id = i + 1;
      mcr.issue_tick = entry.tick;
      mcr.models = entry.models;
      mcr.ops = resolve_ops(model, entry);
      mcr.target_modes = entry.target_modes;
      d = oracle.service_mcr(mcr);
    }
    last_tick = entry.tick;
    r.records.push_back({d.mcr_id, entry.tick, d.type, d.path, d.accepted,
                         d.stall_units, d.stall_ns,
                         d.maintenance_was_active});
  }
  finalize_report(r);
  return r;
}

std::vector<bool> replay_schedule_bruteforce(
    const CompositeModel& model, const std::vector<ScheduleEntry>& schedule) {
  BruteForceChecker bf(model);
  std::vector<bool> verdicts;
  for (const ScheduleEntry& entry : schedule) {
    std::vector<EdgeOp> ops;
    if (!entry.safe_mode.empty()) {
      const std::size_t idx = model.model_index(entry.safe_mode);
      const std::string& safe = model.models()[idx].safe_mode;
      if (safe.empty())
        throw ModelError("model '" + entry.safe_mode +
                         "' declares no safe mode");
      const auto& target = model.mode_edges(idx, safe);
      std::vector<std::pair<PortId, PortId>> present;
      const auto [in_first, in_last] = model.input_range(idx);
      for (PortId u = in_first; u < in_last; ++u)
        for (PortId w : bf.graph().successors(u))
          if (!bf.graph().is_signal(u, w)) present.emplace_back(u, w);
      for (const auto& e : present)
        if (!std::binary_search(target.begin(), target.end(), e))
          ops.push_back(make_erase(e.first, e.second));
      for (const auto& e : target)
        if (!std::binary_search(present.begin(), present.end(), e))
          ops.push_back(make_insert(e.first, e.second));
    } else {
      ops = resolve_ops(model, entry);
    }
    verdicts.push_back(bf.apply(ops));
  }
  return verdicts;
}

PeriodSweep sweep_period(const CompositeModel& model,
                         const ScenarioConfig& cfg, const OracleConfig& ocfg,
                         const std::vector<double>& periods_s,
                         const std::string& run_prefix) {
  PeriodSweep sw;
  for (const double p : periods_s) {
    ScenarioConfig c = cfg;
    c.p_mcr_s = p;
    MetricsReport rep =
        run_generated(model, c, ocfg, run_prefix + "-p" + fmt_g(p));
    if (rep.saturated) sw.saturation_period_s = p;
    sw.runs.push_back(std::move(rep));
  }
  return sw;
}

std::vector<MetricsReport> sweep_type_mix(const CompositeModel& model,
                                          const ScenarioConfig& cfg,
                                          const OracleConfig& ocfg,
                                          std::size_t resolution,
                                          const std::string& run_prefix) {
  std::vector<MetricsReport> out;
  if (resolution <= 1) {
    ScenarioConfig c = cfg;
    c.mix = TypeMix{};
    out.push_back(run_generated(model, c, ocfg, run_prefix + "-mix-even"));
    return out;
  }
  const std::size_t n = resolution - 1;
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; i + j <= n; ++j) {
      const std::size_t k = n - i - j;
      ScenarioConfig c = cfg;
      c.mix.a = static_cast<double>(i) / static_cast<double>(n);
      c.mix.b = static_cast<double>(j) / static_cast<double>(n);
      c.mix.c = static_cast<double>(k) / static_cast<double>(n);
      const std::string id = run_prefix + "-mix" + std::to_string(i) + "-" +
                             std::to_string(j) + "-" + std::to_string(k);
      out.push_back(run_generated(model, c, ocfg, id));
    }
  }
  return out;
}

std::vector<MetricsReport> sweep_partitions(
    const CompositeModel& model, const ScenarioConfig& cfg,
    const OracleConfig& ocfg, const std::vector<std::size_t>& counts,
    const std::string& run_prefix) {
  std::vector<MetricsReport> out;
  if (counts.empty()) return out;
  OracleConfig base = ocfg;
  base.partition_scheme = OracleConfig::PartitionScheme::fixed_count;
  base.partition_count = counts.front();
  const Partitioning parts0 = make_partitioning(model, base);
  const auto stream = generate_mcr_stream(model, parts0, cfg);
  for (const std::size_t k : counts) {
    OracleConfig o = base;
    o.partition_count = k;
    out.push_back(run_stream(model, stream, cfg, o,
                             run_prefix + "-k" + std::to_string(k)));
  }
  return out;
}

namespace {

void csv_preamble(std::ostream& out, const char* schema,
                  const std::vector<MetricsReport>& runs,
                  const std::vector<std::string>& notes) {
  out << "# icd " << schema << " v1\n";
  out << "# tool " << kVersion << "\n";
  for (const std::string& note : notes) out << "# " << note << "\n";
  for (const MetricsReport& r : runs)
    out << "# run " << r.run_id << " period_s=" << fmt_g(r.period_s)
        << " mix=" << fmt_g(r.mix.a) << "/" << fmt_g(r.mix.b) << "/"
        << fmt_g(r.mix.c) << " partitions=" << r.partitions << " timing="
        << (r.wallclock ? "wallclock" : "deterministic") << "\n";
}

}  // namespace

void write_metrics_csv(std::ostream& out,
                       const std::vector<MetricsReport>& runs,
                       const std::vector<std::string>& header_notes) {
  csv_preamble(out, "metrics", runs, header_notes);
  out << "run_id,period_s,mcr_id,issue_tick,type,path_taken,verdict,stall,"
         "stall_units,maintenance_active\n";
  for (const MetricsReport& r : runs)
    for (const StallRecord& rec : r.records)
      out << r.run_id << "," << fmt_g(r.period_s) << "," << rec.mcr_id << ","
          << rec.issue_tick << "," << to_string(rec.type) << ","
          << to_string(rec.path) << ","
          << (rec.accepted ? "accept" : "reject") << "," << rec.stall_ns
          << "," << rec.stall_units << ","
          << (rec.maintenance_was_active ? 1 : 0) << "\n";
}

void write_summary_csv(std::ostream& out,
                       const std::vector<MetricsReport>& runs,
                       const std::vector<std::string>& header_notes) {
  csv_preamble(out, "summary", runs, header_notes);
  out << "run_id,period_s,mix_a,mix_b,mix_c,partitions,total,accepts,rejects,"
         "count_a,count_b,count_c,fallback_pct,accumulated_stall_ns,"
         "accumulated_stall_units,stall_min,stall_q1,stall_median,stall_q3,"
         "stall_max,saturated\n";
  for (const MetricsReport& r : runs)
    out << r.run_id << "," << fmt_g(r.period_s) << "," << fmt_g(r.mix.a) << ","
        << fmt_g(r.mix.b) << "," << fmt_g(r.mix.c) << "," << r.partitions
        << "," << r.records.size() << "," << r.accepts << "," << r.rejects
        << "," << r.count_a << "," << r.count_b << "," << r.count_c << ","
        << fmt_g(r.fallback_pct) << "," << r.accumulated_stall_ns << ","
        << r.accumulated_stall_units << "," << fmt_g(r.stall_min) << ","
        << fmt_g(r.stall_q1) << "," << fmt_g(r.stall_median) << ","
        << fmt_g(r.stall_q3) << "," << fmt_g(r.stall_max) << ","
        << (r.saturated ? 1 : 0) << "\n";
}

}  // namespace icd
