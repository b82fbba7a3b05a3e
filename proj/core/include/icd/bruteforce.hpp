// Independent reference for request verdicts: keep a plain composite
// graph, apply the ops, run a fresh DFS, revert on rejection. Shares
// no code with the closure or the reductions, so agreement between
// the two is meaningful evidence.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "icd/graph.hpp"
#include "icd/model.hpp"
#include "icd/oracle.hpp"

namespace icd {

class BruteForceChecker {
 public:
  explicit BruteForceChecker(const CompositeModel& model);

  // Verdict without mutating the state.
  bool would_accept(const std::vector<EdgeOp>& ops) const;
  // Applies on accept, reverts on reject; returns the verdict.
  bool apply(const std::vector<EdgeOp>& ops);

  const CompositeGraph& graph() const { return graph_; }

 private:
  CompositeGraph graph_;
};

struct DifferentialResult {
  bool ok = true;
  std::size_t failed_index = 0;  // position in the stream
  std::uint64_t failed_mcr = 0;  // request id
  std::string detail;
};

// Runs the oracle and the reference checker over the same stream and
// compares verdict for verdict, plus the composite graph after every
// request. With deterministic timing, `maintenance_budget` work units
// are granted between requests (0 starves maintenance so every later
// request is served stale; a huge budget drains it so none are).
DifferentialResult run_differential(const CompositeModel& model,
                                    const std::vector<ModeChangeRequest>& stream,
                                    const OracleConfig& cfg,
                                    std::uint64_t maintenance_budget);

}  // namespace icd
