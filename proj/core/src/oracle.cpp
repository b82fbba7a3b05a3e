#include "icd/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <set>

namespace icd {

const char* to_string(McrType t) {
  switch (t) {
    case McrType::a: return "a";
    case McrType::b: return "b";
    case McrType::c: return "c";
  }
  return "?";
}

const char* to_string(DecisionPath p) {
  switch (p) {
    case DecisionPath::tc_query: return "tc-query";
    case DecisionPath::tr_dfs: return "tr-dfs";
    case DecisionPath::gc_dfs: return "gc-dfs";
    case DecisionPath::gc_dfs_fallback: return "gc-dfs-fallback";
    case DecisionPath::none: return "none";
  }
  return "?";
}

// Preemptible maintenance pass. Works on private copies; the live
// structures are replaced only at completion, so an abandoned job
// leaves no trace.
struct Oracle::MaintenanceJob {
  enum class Phase : std::uint8_t { apply_edges, recompute, rebuild, done };

  std::vector<EdgeOp> batch;
  bool recompute_path = false;
  Phase phase = Phase::apply_edges;
  PathCountClosure closure;
  CompositeGraph graph;  // snapshot, recompute path only
  std::vector<PortId> topo;
  std::size_t cursor = 0;
  std::vector<ReducedPartitionGraph> reductions;
  WorkCounter work;
};

// One checkpoint-sized slice of maintenance: a single edge fold, one
// closure row, or one partition rebuild. Returns true once the job is
// complete.
bool Oracle::job_step_once(MaintenanceJob& j, const Partitioning& parts) {
  using Phase = MaintenanceJob::Phase;
  for (;;) {
    switch (j.phase) {
      case Phase::apply_edges: {
        if (j.cursor >= j.batch.size()) {
          j.phase = Phase::rebuild;
          j.cursor = 0;
          continue;
        }
        const EdgeOp& op = j.batch[j.cursor++];
        if (op.kind == EdgeOp::Kind::insert)
          j.closure.insert_edge(op.from, op.to, &j.work);
        else
          j.closure.erase_edge(op.from, op.to, &j.work);
        return false;
      }
      case Phase::recompute: {
        if (j.cursor >= j.topo.size()) {
          j.phase = Phase::rebuild;
          j.cursor = 0;
          continue;
        }
        const PortId v = j.topo[j.topo.size() - 1 - j.cursor];
        ++j.cursor;
        j.closure.recompute_vertex(j.graph, v, &j.work);
        return false;
      }
      case Phase::rebuild: {
        if (j.cursor >= parts.num_parts()) {
          j.phase = Phase::done;
          return true;
        }
        j.reductions.push_back(
            build_partition_reduction(j.closure, parts, j.cursor++, &j.work));
        return false;
      }
      case Phase::done:
        return true;
    }
  }
}

Partitioning make_partitioning(const CompositeModel& model,
                               const OracleConfig& cfg) {
  switch (cfg.partition_scheme) {
    case OracleConfig::PartitionScheme::per_model:
      return per_model_partitioning(model);
    case OracleConfig::PartitionScheme::fixed_count:
      return fixed_count_partitioning(model, cfg.partition_count);
    case OracleConfig::PartitionScheme::grouped:
      return grouped_partitioning(model, cfg.partition_groups);
  }
  throw Error("unknown partition scheme");
}

Oracle::Oracle(const CompositeModel& model, OracleConfig cfg)
    : model_(model), cfg_(std::move(cfg)) {
  parts_ = make_partitioning(model_, cfg_);
  graph_ = build_composite_graph(model_);
  closure_ =
      PathCountClosure::from_graph(graph_, cfg_.arithmetic, cfg_.modulus);
  reductions_ = update_tr(closure_, parts_);
  for (const ComponentModel& m : model_.models())
    current_modes_.emplace(m.id, m.initial_mode);
}

Oracle::~Oracle() {
  {
    std::lock_guard lk(mu_);
    serial_.fetch_add(1, std::memory_order_relaxed);
    running_ = false;
    queued_job_.reset();
  }
  if (worker_.joinable()) {
    worker_.request_stop();
    cv_.notify_all();
  }
  worker_ = {};  // joins
}

bool Oracle::stale_locked() const { return running_ || job_ || !pending_.empty(); }

bool Oracle::maintenance_active() const {
  std::lock_guard lk(mu_);
  return stale_locked();
}

std::uint64_t Oracle::threshold() const {
  return cfg_.recompute_threshold != 0 ? cfg_.recompute_threshold
                                       : graph_.size();
}

const std::string& Oracle::current_mode(const std::string& model_id) const {
  std::lock_guard lk(mu_);
  auto it = current_modes_.find(model_id);
  if (it == current_modes_.end())
    throw ModelError("unknown model '" + model_id + "'");
  return it->second;
}

void Oracle::validate(const ModeChangeRequest& mcr) const {
  if (mcr.ops.empty()) throw McrError("request has no edge operations");
  std::set<std::pair<PortId, PortId>> seen;
  for (const EdgeOp& op : mcr.ops) {
    if (op.from >= model_.num_ports() || op.to >= model_.num_ports())
      throw McrError("request references a port out of range");
    if (op.from == op.to) throw McrError("request contains a self loop");
    if (!model_.is_input(op.from))
      throw McrError("dependency source '" + model_.port_name(op.from) +
                     "' is not an input");
    if (model_.is_input(op.to))
      throw McrError("dependency target '" + model_.port_name(op.to) +
                     "' is not an output");
    if (!model_.relaxed() &&
        model_.port_model(op.from) != model_.port_model(op.to))
      throw McrError("dependency '" + model_.port_name(op.from) + "' -> '" +
                     model_.port_name(op.to) +
                     "' crosses models in a strict composite");
    if (graph_.is_signal(op.from, op.to))
      throw McrError("request touches a signal edge");
    if (!seen.emplace(op.from, op.to).second)
      throw McrError("request lists edge '" + model_.port_name(op.from) +
                     "' -> '" + model_.port_name(op.to) + "' twice");
    if (op.kind == EdgeOp::Kind::insert) {
      if (graph_.has_edge(op.from, op.to))
        throw McrError("insert of already-present edge '" +
                       model_.port_name(op.from) + "' -> '" +
                       model_.port_name(op.to) + "'");
    } else {
      if (!graph_.has_edge(op.from, op.to))
        throw McrError("delete of absent edge '" + model_.port_name(op.from) +
                       "' -> '" + model_.port_name(op.to) + "'");
    }
  }
  for (const auto& [id, mode] : mcr.target_modes) {
    try {
      model_.mode_edges(model_.model_index(id), mode);  // names must resolve
    } catch (const ModelError& e) {
      throw McrError(e.what());
    }
  }
}

McrType Oracle::classify(const ModeChangeRequest& mcr) const {
  if (mcr.ops.empty()) throw McrError("request has no edge operations");
  if (mcr.ops.size() == 1) return McrType::a;
  const std::uint32_t part = parts_.part_of(mcr.ops[0].from);
  for (const EdgeOp& op : mcr.ops)
    if (parts_.part_of(op.from) != part || parts_.part_of(op.to) != part)
      return McrType::c;
  return McrType::b;
}

void Oracle::enqueue_pending_locked(const std::vector<EdgeOp>& ops) {
  for (const EdgeOp& op : ops) {
    const EdgeOp inverse{op.kind == EdgeOp::Kind::insert
                             ? EdgeOp::Kind::erase
                             : EdgeOp::Kind::insert,
                         op.from, op.to};
    auto it = std::find(pending_.begin(), pending_.end(), inverse);
    if (it != pending_.end())
      pending_.erase(it);  // the pair cancels out
    else
      pending_.push_back(op);
  }
}

void Oracle::preempt_locked() {
  if (cfg_.timing == OracleConfig::Timing::wallclock) {
    if (!running_) return;
    serial_.fetch_add(1, std::memory_order_relaxed);
    running_ = false;
    ++stats_.preemptions;
    pending_.insert(pending_.begin(), active_batch_.begin(),
                    active_batch_.end());
    active_batch_.clear();
    queued_job_.reset();  // in case the worker never picked it up
  } else {
    if (!job_) return;
    ++stats_.preemptions;
    pending_.insert(pending_.begin(), job_->batch.begin(), job_->batch.end());
    job_.reset();
  }
}

std::unique_ptr<Oracle::MaintenanceJob> Oracle::build_job(
    std::vector<EdgeOp> batch, const CompositeGraph& graph,
    const PathCountClosure& closure, std::uint64_t threshold) {
  auto job = std::make_unique<MaintenanceJob>();
  job->batch = std::move(batch);
  job->recompute_path = job->batch.size() > threshold;
  const std::size_t n = graph.size();
  job->work.charge(n * n / 64 + 1);  // snapshot cost
  if (job->recompute_path) {
    job->graph = graph;
    auto order = topological_order(graph);
    if (!order) throw Error("maintenance: graph is cyclic");
    job->topo = std::move(*order);
    job->closure = PathCountClosure(n, closure.mode(), closure.modulus());
    job->closure.begin_recompute(&job->work);
    job->phase = MaintenanceJob::Phase::recompute;
  } else {
    job->closure = closure;
    job->phase = MaintenanceJob::Phase::apply_edges;
  }
  return job;
}

void Oracle::commit_job_locked(MaintenanceJob& job) {
  closure_ = std::move(job.closure);
  reductions_ = std::move(job.reductions);
  ++stats_.jobs_completed;
  stats_.work_units += job.work.units();
  if (job.recompute_path)
    ++stats_.recomputes;
  else
    stats_.incremental_edges += job.batch.size();
}

void Oracle::schedule_locked() {
  if (pending_.empty()) return;
  if (cfg_.timing == OracleConfig::Timing::deterministic) {
    if (job_) return;
    job_ = build_job(std::move(pending_), graph_, closure_, threshold());
    pending_.clear();
    ++stats_.jobs_started;
  } else {
    if (running_) return;
    auto job = build_job(std::move(pending_), graph_, closure_, threshold());
    pending_.clear();
    active_batch_ = job->batch;
    queued_job_ = std::move(job);
    running_ = true;
    ++stats_.jobs_started;
    if (!worker_.joinable())
      worker_ = std::jthread([this](std::stop_token st) { worker_loop(st); });
    cv_.notify_all();
  }
}

void Oracle::worker_loop(std::stop_token st) {
  std::unique_lock lk(mu_);
  for (;;) {
    if (!cv_.wait(lk, st, [&] { return queued_job_ != nullptr; })) return;
    auto job = std::move(queued_job_);
    const std::uint64_t my_serial = serial_.load(std::memory_order_relaxed);
    lk.unlock();
    bool done = false;
    while (!done && !st.stop_requested() &&
           serial_.load(std::memory_order_relaxed) == my_serial)
      done = job_step_once(*job, parts_);
    lk.lock();
    if (done && serial_.load(std::memory_order_relaxed) == my_serial &&
        running_) {
      commit_job_locked(*job);
      running_ = false;
      active_batch_.clear();
      cv_.notify_all();
    }
    // A preempted job is simply dropped; its batch was already merged
    // back into the pending queue.
  }
}

std::uint64_t Oracle::run_maintenance_step(std::uint64_t unit_budget) {
  std::lock_guard lk(mu_);
  if (cfg_.timing != OracleConfig::Timing::deterministic)
    throw Error("run_maintenance_step requires deterministic timing");
  if (!job_) {
    if (pending_.empty()) return 0;
    schedule_locked();
  }
  const std::uint64_t start = job_->work.units();
  bool done = false;
  while (!done && job_->work.units() - start < unit_budget)
    done = job_step_once(*job_, parts_);
  const std::uint64_t consumed = job_->work.units() - start;
  if (done) {
    commit_job_locked(*job_);
    job_.reset();
    cv_.notify_all();
  }
  return consumed;
}

void Oracle::drain_maintenance() {
  if (cfg_.timing == OracleConfig::Timing::deterministic) {
    while (maintenance_active())
      run_maintenance_step(std::numeric_limits<std::uint64_t>::max());
  } else {
    std::unique_lock lk(mu_);
    cv_.wait(lk, [&] { return !running_ && pending_.empty(); });
  }
}

MaintenanceStats Oracle::maintenance_stats() const {
  std::lock_guard lk(mu_);
  return stats_;
}

CompositeGraph Oracle::graph_copy() const {
  std::lock_guard lk(mu_);
  return graph_;
}

McrDecision Oracle::service_mcr(const ModeChangeRequest& mcr) {
  const bool wall = cfg_.timing == OracleConfig::Timing::wallclock;
  const auto t0 = wall ? std::chrono::steady_clock::now()
                       : std::chrono::steady_clock::time_point{};
  std::lock_guard lk(mu_);
  validate(mcr);

  WorkCounter wc;
  const bool was_active = stale_locked();
  preempt_locked();

  McrDecision d;
  d.mcr_id = mcr.id;
  d.maintenance_was_active = was_active;
  d.type = classify(mcr);

  bool has_insert = false;
  bool has_erase = false;
  for (const EdgeOp& op : mcr.ops)
    (op.kind == EdgeOp::Kind::insert ? has_insert : has_erase) = true;

  // DFS verdict on the live composite graph, reverting on rejection.
  auto dfs_verdict = [&]() -> bool {
    apply_edge_ops(graph_, mcr.ops);
    wc.charge(mcr.ops.size());
    const bool cyclic = dfs_has_cycle(graph_, &wc);
    if (cyclic && !(cfg_.fault_mask & kFaultSkipRevert)) {
      const auto inv = inverted(mcr.ops);
      apply_edge_ops(graph_, inv);
      wc.charge(inv.size());
    }
    return !cyclic;
  };

  if (was_active) {
    // Stale structures force the composite-graph route for every
    // request, delete-only ones included.
    d.accepted = dfs_verdict();
    d.path = DecisionPath::gc_dfs_fallback;
  } else if (!has_insert) {
    // Deleting edges can only remove paths; accept without a search.
    apply_edge_ops(graph_, mcr.ops);
    wc.charge(mcr.ops.size());
    d.accepted = true;
    d.path = DecisionPath::none;
  } else {
    switch (d.type) {
      case McrType::a: {
        const EdgeOp& op = mcr.ops.front();
        const bool cyclic = closure_.would_close_cycle(op.from, op.to, &wc);
        if (!cyclic) {
          graph_.add_edge(op.from, op.to);
          wc.charge(1);
        }
        d.accepted = !cyclic;
        d.path = DecisionPath::tc_query;
        break;
      }
      case McrType::b: {
        const bool mixed = has_erase;
        if (mixed && cfg_.exact_mixed) {
          // Deletions cannot be folded into a reduction soundly; take
          // the exact composite-graph route instead.
          d.accepted = dfs_verdict();
          d.path = DecisionPath::gc_dfs_fallback;
        } else {
          const std::uint32_t part = parts_.part_of(mcr.ops.front().from);
          std::vector<std::pair<PortId, PortId>> staged;
          for (const EdgeOp& op : mcr.ops)
            if (op.kind == EdgeOp::Kind::insert)
              staged.emplace_back(op.from, op.to);
          ReducedPartitionGraph& red = reductions_[part];
          red.stage_insertions(staged);
          wc.charge(staged.size());
          const bool cyclic = red.has_cycle(&wc);
          if (cyclic) {
            red.discard_staged();
            d.accepted = false;
            d.conservative_candidate = mixed;
            if (mixed) ++stats_.conservative_rejects;
          } else {
            red.commit_staged();
            apply_edge_ops(graph_, mcr.ops);
            wc.charge(mcr.ops.size());
            d.accepted = true;
          }
          d.path = DecisionPath::tr_dfs;
        }
        break;
      }
      case McrType::c: {
        d.accepted = dfs_verdict();
        d.path = DecisionPath::gc_dfs;
        break;
      }
    }
  }

  d.stall_units = wc.units();
  if (wall)
    d.stall_ns = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now() - t0)
            .count());

  if (d.accepted) {
    enqueue_pending_locked(mcr.ops);
    for (const auto& [id, mode] : mcr.target_modes) current_modes_[id] = mode;
  }
  schedule_locked();
  return d;
}

McrDecision Oracle::safe_mode_fallback(const std::string& model_id,
                                       std::uint64_t mcr_id) {
  const bool wall = cfg_.timing == OracleConfig::Timing::wallclock;
  const auto t0 = wall ? std::chrono::steady_clock::now()
                       : std::chrono::steady_clock::time_point{};
  std::lock_guard lk(mu_);
  const std::size_t idx = model_.model_index(model_id);
  const std::string& safe = model_.models()[idx].safe_mode;
  if (safe.empty())
    throw ModelError("model '" + model_id + "' declares no safe mode");

  // Active dependency edges owned by this model (source input is
  // one of its ports), straight from the composite graph.
  std::vector<std::pair<PortId, PortId>> present;
  const auto [in_first, in_last] = model_.input_range(idx);
  for (PortId u = in_first; u < in_last; ++u)
    for (PortId w : graph_.successors(u))
      if (!graph_.is_signal(u, w)) present.emplace_back(u, w);
  std::vector<std::pair<PortId, PortId>> target = model_.mode_edges(idx, safe);

  std::vector<EdgeOp> ops;
  for (const auto& e : present)
    if (!std::binary_search(target.begin(), target.end(), e))
      ops.push_back(make_erase(e.first, e.second));
  for (const auto& e : target)
    if (!std::binary_search(present.begin(), present.end(), e))
      ops.push_back(make_insert(e.first, e.second));

  McrDecision d;
  d.mcr_id = mcr_id;
  d.accepted = true;
  d.path = DecisionPath::none;
  d.maintenance_was_active = stale_locked();
  if (!ops.empty()) {
    preempt_locked();
    WorkCounter wc;
    apply_edge_ops(graph_, ops);
    wc.charge(ops.size());
    d.stall_units = wc.units();
    ModeChangeRequest synth;
    synth.ops = ops;
    d.type = classify(synth);
    enqueue_pending_locked(ops);
    schedule_locked();
  }
  current_modes_[model_id] = safe;
  if (wall)
    d.stall_ns = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now() - t0)
            .count());
  return d;
}

Oracle::StateSnapshot Oracle::state_snapshot() const {
  std::lock_guard lk(mu_);
  StateSnapshot s{graph_, closure_, reductions_, {}};
  if (cfg_.timing == OracleConfig::Timing::deterministic) {
    if (job_)
      s.pending.insert(s.pending.end(), job_->batch.begin(),
                       job_->batch.end());
  } else if (running_) {
    s.pending.insert(s.pending.end(), active_batch_.begin(),
                     active_batch_.end());
  }
  s.pending.insert(s.pending.end(), pending_.begin(), pending_.end());
  return s;
}

}  // namespace icd
