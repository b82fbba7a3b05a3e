// Per-partition transitive reductions of the composite reachability
// relation, the small graphs that answer single-partition requests.
//
// A rebuild reads the partition-restricted reachability out of the
// path-count closure as an irreflexive boolean matrix B, forms the
// boolean product C = B * B (pairs connected through an intermediate
// vertex), and keeps exactly the edges in B but not in C. That is the
// unique transitive reduction of the restricted DAG relation, so the
// reduced graph preserves within-partition reachability with the
// fewest possible edges.
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "icd/closure.hpp"
#include "icd/common.hpp"
#include "icd/partition.hpp"

namespace icd {

class ReducedPartitionGraph {
 public:
  ReducedPartitionGraph() = default;

  std::size_t partition_index() const { return part_; }
  std::size_t size() const { return verts_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<PortId>& vertices() const { return verts_; }

  bool contains(PortId global) const;
  // pre: both ports inside this partition.
  bool has_base_edge(PortId from, PortId to) const;

  // Overlays candidate insertions without touching the base edges.
  // pre: no staged edges outstanding; endpoints inside the partition.
  void stage_insertions(std::span<const std::pair<PortId, PortId>> edges);
  void discard_staged();
  // Merges the staged edges into the base graph.
  void commit_staged();
  bool has_staged() const { return !overlay_.empty(); }

  // DFS over base plus staged edges.
  bool has_cycle(WorkCounter* wc = nullptr) const;
  // Reachability over base plus staged edges. pre: both inside.
  bool reachable(PortId from, PortId to, WorkCounter* wc = nullptr) const;

  friend bool operator==(const ReducedPartitionGraph&,
                         const ReducedPartitionGraph&) = default;

  friend ReducedPartitionGraph build_partition_reduction(
      const PathCountClosure& closure, const Partitioning& parts,
      std::size_t part, WorkCounter* wc);

 private:
  std::uint32_t local(PortId global) const;
  bool row_bit(const std::vector<std::uint64_t>& rows, std::uint32_t u,
               std::uint32_t v) const {
    return (rows[u * words_ + (v >> 6)] >> (v & 63)) & 1u;
  }

  std::size_t part_ = 0;
  std::vector<PortId> verts_;         // global ids, ascending
  std::vector<std::int64_t> local_;   // global -> local, -1 outside
  std::size_t words_ = 0;             // bitset words per row
  std::vector<std::uint64_t> base_;   // size() * words_ bits
  std::size_t edge_count_ = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> overlay_;
  std::vector<std::vector<std::uint32_t>> overlay_adj_;
};

// Rebuilds the reduction of one partition from the closure.
// pre: closure and partitioning cover the same vertex set, and the
// underlying graph is acyclic.
ReducedPartitionGraph build_partition_reduction(const PathCountClosure& closure,
                                                const Partitioning& parts,
                                                std::size_t part,
                                                WorkCounter* wc = nullptr);

// Rebuilds the reductions of all partitions.
std::vector<ReducedPartitionGraph> update_tr(const PathCountClosure& closure,
                                             const Partitioning& parts,
                                             WorkCounter* wc = nullptr);

}  // namespace icd
