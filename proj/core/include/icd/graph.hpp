// Composite dependency graph over ports, plus the plain-DFS primitives
// every faster structure in this library is checked against.
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "icd/common.hpp"

namespace icd {

// One edge mutation of the active dependency set.
struct EdgeOp {
  enum class Kind : std::uint8_t { insert, erase };
  Kind kind = Kind::insert;
  PortId from = kNoPort;
  PortId to = kNoPort;

  friend bool operator==(const EdgeOp&, const EdgeOp&) = default;
};

inline EdgeOp make_insert(PortId from, PortId to) {
  return EdgeOp{EdgeOp::Kind::insert, from, to};
}
inline EdgeOp make_erase(PortId from, PortId to) {
  return EdgeOp{EdgeOp::Kind::erase, from, to};
}

// Directed graph over a fixed vertex set. Adjacency lists are kept
// sorted so the structure is a pure function of the edge set: applying
// an op sequence followed by its reversed inverse restores the graph
// bit for bit, and DFS visit order is deterministic.
//
// Edges tagged as signals at build time are immutable afterwards;
// apply_edge_ops refuses to touch them.
class CompositeGraph {
 public:
  CompositeGraph() = default;
  explicit CompositeGraph(std::size_t num_vertices);

  std::size_t size() const { return out_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  bool has_edge(PortId from, PortId to) const;
  bool is_signal(PortId from, PortId to) const;

  // pre: from != to, edge absent.
  void add_edge(PortId from, PortId to, bool signal = false);
  // pre: edge present and not a signal (build-time callers may not
  // remove signals either; the tag is permanent).
  void remove_edge(PortId from, PortId to);

  const std::vector<PortId>& successors(PortId v) const { return out_[v]; }
  const std::vector<PortId>& predecessors(PortId v) const { return in_[v]; }

  friend bool operator==(const CompositeGraph&, const CompositeGraph&) = default;

 private:
  void bounds_check(PortId from, PortId to) const;
  std::size_t bit_index(PortId from, PortId to) const {
    return static_cast<std::size_t>(from) * out_.size() + to;
  }

  std::vector<std::vector<PortId>> out_;
  std::vector<std::vector<PortId>> in_;
  std::vector<std::uint64_t> present_;
  std::vector<std::uint64_t> signal_;
  std::size_t edge_count_ = 0;
};

// Applies ops in order. Throws EdgeOpError (with the offending index)
// on a precondition violation: inserting a present edge, erasing an
// absent one, self loops, out-of-range ports, or touching a signal
// edge. On throw the graph is left as it was before the call.
void apply_edge_ops(CompositeGraph& g, std::span<const EdgeOp> ops);

// Reversed inverse of `ops`; applying ops then inverted(ops) is a
// no-op on any graph the original sequence was valid for.
std::vector<EdgeOp> inverted(std::span<const EdgeOp> ops);

// Iterative three-color DFS.
bool dfs_has_cycle(const CompositeGraph& g, WorkCounter* wc = nullptr);

// As above but reports one directed cycle as a vertex sequence
// (v0, v1, ..., vk) with edges v0->v1->...->vk->v0.
std::optional<std::vector<PortId>> find_cycle(const CompositeGraph& g);

// True iff a directed path from `from` to `to` exists. A vertex does
// not reach itself unless it lies on a cycle.
bool reachable_dfs(const CompositeGraph& g, PortId from, PortId to,
                   WorkCounter* wc = nullptr);

// Kahn topological order; nullopt iff the graph has a cycle.
// Independent of the DFS above (queue-based, in-degree driven).
std::optional<std::vector<PortId>> topological_order(const CompositeGraph& g);

// Counts distinct directed paths from `from` to `to` by explicit
// enumeration; the reference oracle for the path-count closure.
// count(u, u) == 1 (the empty path). pre: acyclic graph; enumeration
// cost grows with the count itself, so keep |V| at toy scale (~20).
BigCount count_paths_bruteforce(const CompositeGraph& g, PortId from, PortId to);

}  // namespace icd
