#include "icd/reduction.hpp"

#include <algorithm>
#include <bit>

namespace icd {

namespace {

// Next set bit at position >= from in a bitset row, or size on miss.
std::size_t next_set_bit(const std::uint64_t* row, std::size_t size,
                         std::size_t from) {
  if (from >= size) return size;
  std::size_t word = from >> 6;
  std::uint64_t cur = row[word] & (~0ull << (from & 63));
  const std::size_t words = (size + 63) / 64;
  while (true) {
    if (cur != 0) {
      const std::size_t bit = (word << 6) + std::countr_zero(cur);
      return bit < size ? bit : size;
    }
    if (++word >= words) return size;
    cur = row[word];
  }
}

}  // namespace

bool ReducedPartitionGraph::contains(PortId global) const {
  return global < local_.size() && local_[global] >= 0;
}

std::uint32_t ReducedPartitionGraph::local(PortId global) const {
  if (!contains(global))
    throw Error("port outside this partition");
  return static_cast<std::uint32_t>(local_[global]);
}

bool ReducedPartitionGraph::has_base_edge(PortId from, PortId to) const {
  return row_bit(base_, local(from), local(to));
}

void ReducedPartitionGraph::stage_insertions(
    std::span<const std::pair<PortId, PortId>> edges) {
  if (!overlay_.empty())
    throw Error("staged insertions already outstanding");
  overlay_adj_.assign(size(), {});
  overlay_.reserve(edges.size());
  for (const auto& [from, to] : edges) {
    const std::uint32_t u = local(from);
    const std::uint32_t v = local(to);
    overlay_.emplace_back(u, v);
    overlay_adj_[u].push_back(v);
  }
}

void ReducedPartitionGraph::discard_staged() {
  overlay_.clear();
  overlay_adj_.clear();
}

void ReducedPartitionGraph::commit_staged() {
  for (const auto& [u, v] : overlay_) {
    if (!row_bit(base_, u, v)) {
      base_[u * words_ + (v >> 6)] |= 1ull << (v & 63);
      ++edge_count_;
    }
  }
  discard_staged();
}

bool ReducedPartitionGraph::has_cycle(WorkCounter* wc) const {
  const std::size_t s = size();
  enum : std::uint8_t { white, gray, black };
  std::vector<std::uint8_t> color(s, white);
  // Frame: vertex, next base bit to scan, next overlay index.
  struct Frame {
    std::uint32_t v;
    std::size_t bit;
    std::size_t ov;
  };
  std::vector<Frame> stack;
  for (std::uint32_t root = 0; root < s; ++root) {
    if (color[root] != white) continue;
    color[root] = gray;
    stack.push_back({root, 0, 0});
    if (wc) wc->charge(1);
    while (!stack.empty()) {
      Frame& f = stack.back();
      std::uint32_t w = 0;
      bool have = false;
      const std::size_t bit = next_set_bit(&base_[f.v * words_], s, f.bit);
      if (bit < s) {
        w = static_cast<std::uint32_t>(bit);
        f.bit = bit + 1;
        have = true;
      } else if (!overlay_adj_.empty() && f.ov < overlay_adj_[f.v].size()) {
        w = overlay_adj_[f.v][f.ov++];
        have = true;
      }
      if (have) {
        if (wc) wc->charge(1);
        if (color[w] == gray) return true;
        if (color[w] == white) {
          color[w] = gray;
          stack.push_back({w, 0, 0});
          if (wc) wc->charge(1);
        }
      } else {
        color[f.v] = black;
        stack.pop_back();
      }
    }
  }
  return false;
}

bool ReducedPartitionGraph::reachable(PortId from, PortId to,
                                      WorkCounter* wc) const {
  const std::uint32_t src = local(from);
  const std::uint32_t dst = local(to);
  const std::size_t s = size();
  std::vector<bool> seen(s, false);
  std::vector<std::uint32_t> stack{src};
  seen[src] = true;
  while (!stack.empty()) {
    const std::uint32_t v = stack.back();
    stack.pop_back();
    if (wc) wc->charge(1);
    for (std::size_t bit = next_set_bit(&base_[v * words_], s, 0); bit < s;
         bit = next_set_bit(&base_[v * words_], s, bit + 1)) {
      if (wc) wc->charge(1);
      if (bit == dst) return true;
      if (!seen[bit]) {
        seen[bit] = true;
        stack.push_back(static_cast<std::uint32_t>(bit));
      }
    }
    if (!overlay_adj_.empty()) {
      for (std::uint32_t w : overlay_adj_[v]) {
        if (wc) wc->charge(1);
        if (w == dst) return true;
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
  }
  return false;
}

ReducedPartitionGraph build_partition_reduction(const PathCountClosure& closure,
                                                const Partitioning& parts,
                                                std::size_t part,
                                                WorkCounter* wc) {
  if (closure.size() != parts.num_ports())
    throw Error("reduction: closure and partitioning sizes differ");
  ReducedPartitionGraph r;
  r.part_ = part;
  r.verts_ = parts.members(part);
  std::sort(r.verts_.begin(), r.verts_.end());
  r.local_.assign(closure.size(), -1);
  for (std::size_t i = 0; i < r.verts_.size(); ++i)
    r.local_[r.verts_[i]] = static_cast<std::int64_t>(i);
  const std::size_t s = r.verts_.size();
  r.words_ = (s + 63) / 64;

  // B: irreflexive within-partition reachability from the closure.
  std::vector<std::uint64_t> b(s * r.words_, 0);
  for (std::size_t u = 0; u < s; ++u)
    for (std::size_t v = 0; v < s; ++v)
      if (u != v && closure.reachable(r.verts_[u], r.verts_[v]))
        b[u * r.words_ + (v >> 6)] |= 1ull << (v & 63);
  if (wc) wc->charge(s * s);

  // C = B * B: pairs with an intermediate vertex between them.
  std::vector<std::uint64_t> c(s * r.words_, 0);
  for (std::size_t u = 0; u < s; ++u) {
    const std::uint64_t* row = &b[u * r.words_];
    for (std::size_t v = next_set_bit(row, s, 0); v < s;
         v = next_set_bit(row, s, v + 1)) {
      const std::uint64_t* via = &b[v * r.words_];
      std::uint64_t* dst = &c[u * r.words_];
      for (std::size_t w = 0; w < r.words_; ++w) dst[w] |= via[w];
      if (wc) wc->charge(r.words_);
    }
  }

  // Keep edges reachable but not through anything: B and not C.
  r.base_.assign(s * r.words_, 0);
  r.edge_count_ = 0;
  for (std::size_t w = 0; w < s * r.words_; ++w) {
    r.base_[w] = b[w] & ~c[w];
    r.edge_count_ += static_cast<std::size_t>(std::popcount(r.base_[w]));
  }
  if (wc) wc->charge(s * r.words_);
  return r;
}

std::vector<ReducedPartitionGraph> update_tr(const PathCountClosure& closure,
                                             const Partitioning& parts,
                                             WorkCounter* wc) {
  std::vector<ReducedPartitionGraph> out;
  out.reserve(parts.num_parts());
  for (std::size_t p = 0; p < parts.num_parts(); ++p)
    out.push_back(build_partition_reduction(closure, parts, p, wc));
  return out;
}

}  // namespace icd
