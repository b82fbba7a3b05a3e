#include "icd/graph.hpp"

#include <algorithm>
#include <deque>

namespace icd {

CompositeGraph::CompositeGraph(std::size_t num_vertices)
    : out_(num_vertices),
      in_(num_vertices),
      present_((num_vertices * num_vertices + 63) / 64, 0),
      signal_((num_vertices * num_vertices + 63) / 64, 0) {}

void CompositeGraph::bounds_check(PortId from, PortId to) const {
  if (from >= size() || to >= size())
    throw EdgeOpError("edge endpoint out of range", -1);
}

bool CompositeGraph::has_edge(PortId from, PortId to) const {
  bounds_check(from, to);
  const std::size_t b = bit_index(from, to);
  return (present_[b >> 6] >> (b & 63)) & 1u;
}

bool CompositeGraph::is_signal(PortId from, PortId to) const {
  bounds_check(from, to);
  const std::size_t b = bit_index(from, to);
  return (signal_[b >> 6] >> (b & 63)) & 1u;
}

void CompositeGraph::add_edge(PortId from, PortId to, bool signal) {
  bounds_check(from, to);
  if (from == to) throw EdgeOpError("self loop", -1);
  if (has_edge(from, to)) throw EdgeOpError("edge already present", -1);
  auto& succ = out_[from];
  succ.insert(std::lower_bound(succ.begin(), succ.end(), to), to);
  auto& pred = in_[to];
  pred.insert(std::lower_bound(pred.begin(), pred.end(), from), from);
  const std::size_t b = bit_index(from, to);
  present_[b >> 6] |= 1ull << (b & 63);
  if (signal) signal_[b >> 6] |= 1ull << (b & 63);
  ++edge_count_;
}

void CompositeGraph::remove_edge(PortId from, PortId to) {
  if (!has_edge(from, to)) throw EdgeOpError("edge not present", -1);
  if (is_signal(from, to)) throw EdgeOpError("signal edges are immutable", -1);
  auto& succ = out_[from];
  succ.erase(std::lower_bound(succ.begin(), succ.end(), to));
  auto& pred = in_[to];
  pred.erase(std::lower_bound(pred.begin(), pred.end(), from));
  const std::size_t b = bit_index(from, to);
  present_[b >> 6] &= ~(1ull << (b & 63));
  --edge_count_;
}

void apply_edge_ops(CompositeGraph& g, std::span<const EdgeOp> ops) {
  std::size_t done = 0;
  try {
    for (; done < ops.size(); ++done) {
      const EdgeOp& op = ops[done];
      if (op.from >= g.size() || op.to >= g.size())
        throw EdgeOpError("edge endpoint out of range", done);
      if (op.from == op.to) throw EdgeOpError("self loop", done);
      if (g.is_signal(op.from, op.to))
        throw EdgeOpError("signal edges are immutable", done);
      if (op.kind == EdgeOp::Kind::insert) {
        if (g.has_edge(op.from, op.to))
          throw EdgeOpError("insert of a present edge", done);
        g.add_edge(op.from, op.to);
      } else {
        if (!g.has_edge(op.from, op.to))
          throw EdgeOpError("erase of an absent edge", done);
        g.remove_edge(op.from, op.to);
      }
    }
  } catch (const EdgeOpError& e) {
    // Roll back the ops that did apply, then rethrow with the index.
    for (std::size_t i = done; i-- > 0;) {
      const EdgeOp& op = ops[i];
      if (op.kind == EdgeOp::Kind::insert)
        g.remove_edge(op.from, op.to);
      else
        g.add_edge(op.from, op.to);
    }
    if (e.op_index >= 0) throw;
    throw EdgeOpError(e.what(), static_cast<long>(done));
  }
}

std::vector<EdgeOp> inverted(std::span<const EdgeOp> ops) {
  std::vector<EdgeOp> inv;
  inv.reserve(ops.size());
  for (std::size_t i = ops.size(); i-- > 0;) {
    const EdgeOp& op = ops[i];
    inv.push_back(op.kind == EdgeOp::Kind::insert ? make_erase(op.from, op.to)
                                                  : make_insert(op.from, op.to));
  }
  return inv;
}

namespace {

enum class Color : std::uint8_t { white, gray, black };

}  // namespace

bool dfs_has_cycle(const CompositeGraph& g, WorkCounter* wc) {
  const std::size_t n = g.size();
  std::vector<Color> color(n, Color::white);
  // Stack frames carry the next successor index to resume at.
  std::vector<std::pair<PortId, std::size_t>> stack;
  for (PortId root = 0; root < n; ++root) {
    if (color[root] != Color::white) continue;
    stack.emplace_back(root, 0);
    color[root] = Color::gray;
    if (wc) wc->charge(1);
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      const auto& succ = g.successors(v);
      if (next < succ.size()) {
        const PortId w = succ[next++];
        if (wc) wc->charge(1);
        if (color[w] == Color::gray) return true;
        if (color[w] == Color::white) {
          color[w] = Color::gray;
          if (wc) wc->charge(1);
          stack.emplace_back(w, 0);
        }
      } else {
        color[v] = Color::black;
        stack.pop_back();
      }
    }
  }
  return false;
}

std::optional<std::vector<PortId>> find_cycle(const CompositeGraph& g) {
  const std::size_t n = g.size();
  std::vector<Color> color(n, Color::white);
  std::vector<std::pair<PortId, std::size_t>> stack;
  for (PortId root = 0; root < n; ++root) {
    if (color[root] != Color::white) continue;
    stack.emplace_back(root, 0);
    color[root] = Color::gray;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      const auto& succ = g.successors(v);
      if (next < succ.size()) {
        const PortId w = succ[next++];
        if (color[w] == Color::gray) {
          // The gray path from w to v on the stack closes the cycle.
          std::vector<PortId> cycle;
          auto it = stack.begin();
          while (it->first != w) ++it;
          for (; it != stack.end(); ++it) cycle.push_back(it->first);
          return cycle;
        }
        if (color[w] == Color::white) {
          color[w] = Color::gray;
          stack.emplace_back(w, 0);
        }
      } else {
        color[v] = Color::black;
        stack.pop_back();
      }
    }
  }
  return std::nullopt;
}

bool reachable_dfs(const CompositeGraph& g, PortId from, PortId to,
                   WorkCounter* wc) {
  const std::size_t n = g.size();
  if (from >= n || to >= n) throw EdgeOpError("vertex out of range", -1);
  std::vector<bool> seen(n, false);
  std::vector<PortId> stack{from};
  // `from` itself only counts as reached through a real edge back
  // into it, so it is not pre-marked as the target.
  seen[from] = true;
  while (!stack.empty()) {
    const PortId v = stack.back();
    stack.pop_back();
    if (wc) wc->charge(1);
    for (PortId w : g.successors(v)) {
      if (wc) wc->charge(1);
      if (w == to) return true;
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return false;
}

std::optional<std::vector<PortId>> topological_order(const CompositeGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::size_t> indeg(n, 0);
  for (PortId v = 0; v < n; ++v) indeg[v] = g.predecessors(v).size();
  std::deque<PortId> ready;
  for (PortId v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push_back(v);
  std::vector<PortId> order;
  order.reserve(n);
  while (!ready.empty()) {
    const PortId v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (PortId w : g.successors(v))
      if (--indeg[w] == 0) ready.push_back(w);
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

namespace {

BigCount count_paths_rec(const CompositeGraph& g, PortId v, PortId to) {
  if (v == to) return 1;
  BigCount total = 0;
  for (PortId w : g.successors(v)) total += count_paths_rec(g, w, to);
  return total;
}

}  // namespace

BigCount count_paths_bruteforce(const CompositeGraph& g, PortId from,
                                PortId to) {
  if (from >= g.size() || to >= g.size())
    throw EdgeOpError("vertex out of range", -1);
  if (dfs_has_cycle(g)) throw Error("count_paths_bruteforce: graph is cyclic");
  return count_paths_rec(g, from, to);
}

}  // namespace icd
