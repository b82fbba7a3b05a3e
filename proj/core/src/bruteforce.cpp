#include "icd/bruteforce.hpp"

namespace icd {

BruteForceChecker::BruteForceChecker(const CompositeModel& model)
    : graph_(build_composite_graph(model)) {}

bool BruteForceChecker::would_accept(const std::vector<EdgeOp>& ops) const {
  CompositeGraph probe = graph_;
  apply_edge_ops(probe, ops);
  return !dfs_has_cycle(probe);
}

bool BruteForceChecker::apply(const std::vector<EdgeOp>& ops) {
  apply_edge_ops(graph_, ops);
  if (!dfs_has_cycle(graph_)) return true;
  apply_edge_ops(graph_, inverted(ops));
  return false;
}

DifferentialResult run_differential(const CompositeModel& model,
                                    const std::vector<ModeChangeRequest>& stream,
                                    const OracleConfig& cfg,
                                    std::uint64_t maintenance_budget) {
  Oracle oracle(model, cfg);
  BruteForceChecker reference(model);
  DifferentialResult r;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const ModeChangeRequest& mcr = stream[i];
    const McrDecision d = oracle.service_mcr(mcr);
    const bool expected = reference.apply(mcr.ops);
    if (d.accepted != expected) {
      r.ok = false;
      r.failed_index = i;
      r.failed_mcr = mcr.id;
      r.detail = std::string("verdict mismatch: oracle ") +
                 (d.accepted ? "accepted" : "rejected") + " via " +
                 to_string(d.path) + ", reference " +
                 (expected ? "accepted" : "rejected");
      return r;
    }
    if (oracle.graph_copy() != reference.graph()) {
      r.ok = false;
      r.failed_index = i;
      r.failed_mcr = mcr.id;
      r.detail = "composite graph diverged from the reference after this "
                 "request";
      return r;
    }
    if (cfg.timing == OracleConfig::Timing::deterministic &&
        maintenance_budget > 0)
      oracle.run_maintenance_step(maintenance_budget);
  }
  return r;
}

}  // namespace icd
