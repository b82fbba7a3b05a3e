// The online cycle-detection oracle.
//
// Offline it builds the composite graph, the path-count closure, and
// one reduced graph per partition. Online it answers mode-change
// requests: single-edge requests against the closure in O(1),
// single-partition insert-only requests by DFS on that partition's
// reduction, everything else by DFS on the composite graph. After an
// accepted request the closure and reductions are stale until a
// maintenance pass folds the pending edges in; while maintenance is
// running or pending every request is served from the composite graph
// alone, and an arriving request preempts the running pass (its
// partial work is discarded, the batch is re-queued).
//
// Deterministic timing advances maintenance only through
// run_maintenance_step and reports stalls in abstract work units;
// wallclock timing runs maintenance on a background thread and
// reports stalls in nanoseconds.
#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "icd/closure.hpp"
#include "icd/common.hpp"
#include "icd/graph.hpp"
#include "icd/model.hpp"
#include "icd/partition.hpp"
#include "icd/reduction.hpp"

namespace icd {

struct ModeChangeRequest {
  std::uint64_t id = 0;
  std::int64_t issue_tick = 0;
  // Requesting model ids (bookkeeping; may be empty for synthetic
  // streams).
  std::vector<std::string> models;
  std::vector<EdgeOp> ops;
  // Mode bookkeeping applied on accept: model id -> new mode name.
  std::map<std::string, std::string> target_modes;
  // Warm-up requests are serviced but excluded from metrics.
  bool warmup = false;
};

// a: single edge; b: all endpoints in one partition; c: spans
// partitions.
enum class McrType : std::uint8_t { a, b, c };

enum class DecisionPath : std::uint8_t {
  tc_query,         // closure lookup
  tr_dfs,           // DFS on one partition's reduction
  gc_dfs,           // DFS on the composite graph (designed type-c path)
  gc_dfs_fallback,  // DFS on the composite graph forced by staleness,
                    // preemption, or exact-mixed routing
  none,             // accepted without any search
};

const char* to_string(McrType t);
const char* to_string(DecisionPath p);

struct McrDecision {
  std::uint64_t mcr_id = 0;
  bool accepted = false;
  McrType type = McrType::a;
  DecisionPath path = DecisionPath::none;
  bool maintenance_was_active = false;
  std::uint64_t stall_units = 0;  // work units spent deciding
  std::uint64_t stall_ns = 0;     // wallclock mode only
  // Rejected type-b verdict that ignored the request's deletions and
  // may therefore be conservative (exact_mixed = false only).
  bool conservative_candidate = false;
};

struct OracleConfig {
  CountMode arithmetic = CountMode::exact;
  std::uint64_t modulus = kDefaultModulus;

  enum class PartitionScheme : std::uint8_t { per_model, fixed_count, grouped };
  PartitionScheme partition_scheme = PartitionScheme::per_model;
  std::size_t partition_count = 0;  // fixed_count only
  std::vector<std::vector<std::string>> partition_groups;  // grouped only

  // Pending batches larger than this trigger a from-scratch closure
  // rebuild instead of per-edge updates; 0 means |V_c|.
  std::uint64_t recompute_threshold = 0;

  // Route mixed insert+delete multi-edge requests to the composite
  // graph for an exact answer. When false they stay on the reduction
  // with deletions ignored, which can reject conservatively but never
  // accepts a cycle.
  bool exact_mixed = true;

  enum class Timing : std::uint8_t { deterministic, wallclock };
  Timing timing = Timing::deterministic;

  // Deliberate defect injection for testing the verifier; zero in
  // normal operation.
  std::uint32_t fault_mask = 0;
};

// Leaves rejected ops applied on the DFS paths.
inline constexpr std::uint32_t kFaultSkipRevert = 1u;

// The partitioning an oracle with this config will use.
Partitioning make_partitioning(const CompositeModel& model,
                               const OracleConfig& cfg);

struct MaintenanceStats {
  std::uint64_t jobs_started = 0;
  std::uint64_t jobs_completed = 0;
  std::uint64_t preemptions = 0;
  std::uint64_t incremental_edges = 0;  // edges folded in one at a time
  std::uint64_t recomputes = 0;         // threshold-triggered rebuilds
  std::uint64_t work_units = 0;         // completed maintenance work
  std::uint64_t conservative_rejects = 0;
};

class Oracle {
 public:
  explicit Oracle(const CompositeModel& model, OracleConfig cfg = {});
  ~Oracle();
  Oracle(const Oracle&) = delete;
  Oracle& operator=(const Oracle&) = delete;

  // Serves one request. Throws McrError on a malformed request
  // (empty, duplicate edge, wrong polarity, presence preconditions,
  // signal edges, unknown names) without touching any state or
  // recording a stall. Cycle-creating requests are not errors; they
  // come back with accepted = false and every structure intact.
  McrDecision service_mcr(const ModeChangeRequest& mcr);

  // Replaces the model's active dependency edges with its safe-mode
  // set, accepted without a search. Throws ModelError if the model
  // declares no safe mode. A no-op when already equal.
  McrDecision safe_mode_fallback(const std::string& model_id,
                                 std::uint64_t mcr_id = 0);

  // Classification under this oracle's partitioning.
  McrType classify(const ModeChangeRequest& mcr) const;

  // True while a maintenance pass is running or queued work exists;
  // decision paths needing the closure or reductions are unavailable.
  bool maintenance_active() const;

  // Deterministic timing only: advances maintenance by roughly
  // `unit_budget` work units (checkpoint granularity may overshoot).
  // Returns the units actually consumed, 0 when idle.
  std::uint64_t run_maintenance_step(std::uint64_t unit_budget);

  // Runs (deterministic) or waits (wallclock) until maintenance is
  // idle.
  void drain_maintenance();

  MaintenanceStats maintenance_stats() const;
  // Copy of the live composite graph alone; much cheaper than a full
  // state snapshot.
  CompositeGraph graph_copy() const;
  const OracleConfig& config() const { return cfg_; }
  const Partitioning& partitioning() const { return parts_; }
  const std::string& current_mode(const std::string& model_id) const;

  // Deep copy of the mutable state, for diagnostics and tests.
  struct StateSnapshot {
    CompositeGraph graph;
    PathCountClosure closure;
    std::vector<ReducedPartitionGraph> reductions;
    std::vector<EdgeOp> pending;  // job batch + queued ops, in order
    friend bool operator==(const StateSnapshot&, const StateSnapshot&) =
        default;
  };
  StateSnapshot state_snapshot() const;

 private:
  struct MaintenanceJob;

  void validate(const ModeChangeRequest& mcr) const;
  static bool job_step_once(MaintenanceJob& j, const Partitioning& parts);
  static std::unique_ptr<MaintenanceJob> build_job(std::vector<EdgeOp> batch,
                                                   const CompositeGraph& graph,
                                                   const PathCountClosure& closure,
                                                   std::uint64_t threshold);
  void preempt_locked();
  void schedule_locked();
  void enqueue_pending_locked(const std::vector<EdgeOp>& ops);
  void commit_job_locked(MaintenanceJob& job);
  bool stale_locked() const;
  std::uint64_t threshold() const;
  void worker_loop(std::stop_token st);

  const CompositeModel& model_;
  OracleConfig cfg_;
  Partitioning parts_;

  mutable std::mutex mu_;
  std::condition_variable_any cv_;  // stop_token-aware waits

  CompositeGraph graph_;
  PathCountClosure closure_;
  std::vector<ReducedPartitionGraph> reductions_;
  std::map<std::string, std::string> current_modes_;

  std::vector<EdgeOp> pending_;
  std::unique_ptr<MaintenanceJob> job_;  // deterministic timing
  MaintenanceStats stats_;

  // Wallclock-mode worker state: one persistent thread; bumping the
  // serial makes it drop the job it holds at the next checkpoint.
  bool running_ = false;
  std::atomic<std::uint64_t> serial_{0};
  std::vector<EdgeOp> active_batch_;
  std::unique_ptr<MaintenanceJob> queued_job_;
  std::jthread worker_;  // last member, first to join
};

}  // namespace icd
