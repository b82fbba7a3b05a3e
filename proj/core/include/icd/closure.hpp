// Dynamic transitive closure kept as a dense matrix of path counts.
//
// A[u][v] holds the number of distinct directed paths u -> v, with
// A[v][v] = 1 for the empty path. Reachability is the nonzero pattern,
// and a candidate edge (x, y) closes a cycle exactly when y already
// reaches x, so both queries are O(1) lookups between rebuilds.
//
// Single-edge updates sweep the closure-level predecessor set of x
// against the successor set of y, adding or subtracting
// A[u][x] * A[y][v] per affected pair. The x column and y row are
// snapshotted before the sweep so every product reads pre-update
// values.
#pragma once

#include <cstdint>
#include <vector>

#include "icd/common.hpp"
#include "icd/graph.hpp"

namespace icd {

// 2^61 - 1, the largest Mersenne prime below 64 bits.
inline constexpr std::uint64_t kDefaultModulus = (1ull << 61) - 1;

enum class CountMode : std::uint8_t {
  exact,    // arbitrary-precision counts
  modular,  // counts mod a fixed odd prime; a true count can read as
            // zero only with probability ~1/modulus per entry
};

class PathCountClosure {
 public:
  PathCountClosure() = default;

  // Closure of the edgeless graph on `num_vertices` vertices.
  explicit PathCountClosure(std::size_t num_vertices,
                            CountMode mode = CountMode::exact,
                            std::uint64_t modulus = kDefaultModulus);

  static PathCountClosure from_graph(const CompositeGraph& g,
                                     CountMode mode = CountMode::exact,
                                     std::uint64_t modulus = kDefaultModulus,
                                     WorkCounter* wc = nullptr);

  // Rebuilds from scratch by a reverse-topological sweep of `g`.
  // pre: g acyclic and of matching size.
  void recompute(const CompositeGraph& g, WorkCounter* wc = nullptr);

  // Chunked rebuild for preemptible maintenance: zero everything,
  // then feed vertices in reverse topological order; each call
  // finalizes one row from its successors' already-final rows.
  void begin_recompute(WorkCounter* wc = nullptr);
  void recompute_vertex(const CompositeGraph& g, PortId v,
                        WorkCounter* wc = nullptr);

  // Folds the insertion of edge (x, y) into the counts.
  // pre: x != y, would_close_cycle(x, y) is false, and the edge has
  // not already been folded in.
  void insert_edge(PortId x, PortId y, WorkCounter* wc = nullptr);

  // Inverse of insert_edge. pre: the edge is currently folded in.
  void erase_edge(PortId x, PortId y, WorkCounter* wc = nullptr);

  // True iff a directed path from u to v exists. pre: u != v.
  bool reachable(PortId u, PortId v, WorkCounter* wc = nullptr) const;

  // True iff inserting (x, y) would create a directed cycle.
  // pre: x != y.
  bool would_close_cycle(PortId x, PortId y, WorkCounter* wc = nullptr) const;

  // Raw count. In modular mode this is the residue.
  BigCount count(PortId u, PortId v) const;

  std::size_t size() const { return n_; }
  CountMode mode() const { return mode_; }
  std::uint64_t modulus() const { return modulus_; }

  // Entry-wise comparison; modes must match for equality.
  friend bool operator==(const PathCountClosure&, const PathCountClosure&);

 private:
  template <typename Ring>
  void recompute_vertex_impl(const CompositeGraph& g, PortId v,
                             std::vector<typename Ring::Value>& a,
                             const Ring& ring, WorkCounter* wc);
  template <typename Ring>
  void update_impl(PortId x, PortId y, bool insert,
                   std::vector<typename Ring::Value>& a, const Ring& ring,
                   WorkCounter* wc);

  std::size_t idx(PortId u, PortId v) const { return u * n_ + v; }

  std::size_t n_ = 0;
  CountMode mode_ = CountMode::exact;
  std::uint64_t modulus_ = kDefaultModulus;
  std::vector<BigCount> exact_;
  std::vector<std::uint64_t> mod_;
};

}  // namespace icd
