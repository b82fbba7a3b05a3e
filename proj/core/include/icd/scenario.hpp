// Request streams: random generation against a reference graph, and
// explicit schedules loaded from scenario files.
//
// Scenario file schema, exactly one of:
//   {"generator": {"seed":…, "p_mcr_s":…, "total":…,
//                  "mix":{"a":…,"b":…,"c":…}, "models_per_mcr":…,
//                  "edges_per_mcr":…, "cycle_free_only":…,
//                  "tick_s":…, "warmup":…, "unit_budget_per_tick":…}}
//   {"schedule": [{"tick":n, "models":[…],
//                  "ops":[["ins|del","model.in","model.out"],…],
//                  "target_modes":{"model":"mode",…}},
//                 {"tick":n, "safe_mode":"model"}, …]}
//
// The last three generator keys are optional (defaults below). A
// schedule entry either lists ops or names a safe_mode model, never
// both.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icd/model.hpp"
#include "icd/oracle.hpp"
#include "icd/partition.hpp"

namespace icd {

struct TypeMix {
  double a = 1.0 / 3;
  double b = 1.0 / 3;
  double c = 1.0 / 3;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  double p_mcr_s = 0.01;  // request period, seconds
  std::size_t total = 100;
  TypeMix mix;
  std::size_t models_per_mcr = 2;  // partitions a type-c request draws from
  std::size_t edges_per_mcr = 4;   // ops per type-b/c request
  bool cycle_free_only = true;
  double tick_s = 0.001;  // simulated tick period, seconds
  bool warmup = true;     // prepend two unrecorded net-zero requests
  // Deterministic timing: maintenance work units granted per elapsed
  // tick between requests.
  std::uint64_t unit_budget_per_tick = 5000;
};

// Throws ScenarioError on out-of-range fields.
void validate_scenario_config(const ScenarioConfig& cfg);

struct ScheduleOp {
  EdgeOp::Kind kind = EdgeOp::Kind::insert;
  std::string from;  // "model.in"
  std::string to;    // "model.out"
};

struct ScheduleEntry {
  std::int64_t tick = 0;
  std::vector<std::string> models;
  std::vector<ScheduleOp> ops;
  std::map<std::string, std::string> target_modes;
  std::string safe_mode;  // model id; non-empty selects the fallback form
};

struct ScenarioFile {
  std::optional<ScenarioConfig> generator;
  std::optional<std::vector<ScheduleEntry>> schedule;
};

ScenarioFile parse_scenario(const std::string& json_text);
ScenarioFile load_scenario(const std::filesystem::path& path);
std::string to_json_text(const ScenarioFile& s);
void save_scenario(const ScenarioFile& s, const std::filesystem::path& path);

// Resolves one schedule entry's ops to port ids (throws ScenarioError
// on unknown names or a safe_mode entry).
std::vector<EdgeOp> resolve_ops(const CompositeModel& model,
                                const ScheduleEntry& entry);

// Deterministic request stream. Maintains a plain reference graph (no
// closure); with cycle_free_only every request keeps it acyclic by
// drawing inserts consistent with a topological order of the initial
// graph. Type-b requests confine endpoints to one partition of
// `parts`; type-c requests draw from several. Issue ticks are spaced
// by p_mcr_s quantized to ticks. When cfg.warmup is set the stream
// starts with two warmup-flagged requests (delete then re-insert of
// an initial dependency edge untouched by the rest) so the first
// measured request does not see cold structures.
std::vector<ModeChangeRequest> generate_mcr_stream(const CompositeModel& model,
                                                   const Partitioning& parts,
                                                   const ScenarioConfig& cfg);

}  // namespace icd
