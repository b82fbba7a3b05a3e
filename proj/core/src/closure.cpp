#include "icd/closure.hpp"

#include <utility>

namespace icd {

namespace {

struct ExactRing {
  using Value = BigCount;
  static Value zero() { return 0; }
  static Value one() { return 1; }
  static bool is_zero(const Value& v) { return v == 0; }
  static void add(Value& a, const Value& b) { a += b; }
  static void sub(Value& a, const Value& b) { a -= b; }
  static Value mul(const Value& a, const Value& b) { return a * b; }
};

struct ModRing {
  using Value = std::uint64_t;
  std::uint64_t p;
  static Value zero() { return 0; }
  static Value one() { return 1; }
  static bool is_zero(Value v) { return v == 0; }
  void add(Value& a, Value b) const {
    a += b;
    if (a >= p) a -= p;
  }
  void sub(Value& a, Value b) const { a = a >= b ? a - b : a + p - b; }
  Value mul(Value a, Value b) const {
    return static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(a) * b % p);
  }
};

}  // namespace

PathCountClosure::PathCountClosure(std::size_t num_vertices, CountMode mode,
                                   std::uint64_t modulus)
    : n_(num_vertices), mode_(mode), modulus_(modulus) {
  if (mode_ == CountMode::modular) {
    if (modulus_ < 2 || modulus_ % 2 == 0)
      throw Error("modulus must be an odd prime");
    mod_.assign(n_ * n_, 0);
    for (std::size_t v = 0; v < n_; ++v) mod_[idx(v, v)] = 1;
  } else {
    exact_.assign(n_ * n_, BigCount(0));
    for (std::size_t v = 0; v < n_; ++v) exact_[idx(v, v)] = 1;
  }
}

PathCountClosure PathCountClosure::from_graph(const CompositeGraph& g,
                                              CountMode mode,
                                              std::uint64_t modulus,
                                              WorkCounter* wc) {
  PathCountClosure c(g.size(), mode, modulus);
  c.recompute(g, wc);
  return c;
}

template <typename Ring>
void PathCountClosure::recompute_vertex_impl(
    const CompositeGraph& g, PortId v, std::vector<typename Ring::Value>& a,
    const Ring& ring, WorkCounter* wc) {
  // paths(v, t) = [v == t] + sum over successors w of paths(w, t);
  // valid while vertices arrive in reverse topological order, so
  // every successor row is final before it is consumed.
  a[idx(v, v)] = ring.one();
  for (PortId w : g.successors(v)) {
    const std::size_t src = idx(w, 0);
    const std::size_t dst = idx(v, 0);
    for (std::size_t t = 0; t < n_; ++t) ring.add(a[dst + t], a[src + t]);
    if (wc) wc->charge(n_);
  }
}

template <typename Ring>
void PathCountClosure::update_impl(PortId x, PortId y, bool insert,
                                   std::vector<typename Ring::Value>& a,
                                   const Ring& ring, WorkCounter* wc) {
  using Value = typename Ring::Value;
  // Pre-update snapshots of column x (paths into x) and row y (paths
  // out of y), kept sparse. The diagonal entries put x and y
  // themselves into their own sets.
  std::vector<std::pair<PortId, Value>> into_x;
  std::vector<std::pair<PortId, Value>> from_y;
  for (std::size_t u = 0; u < n_; ++u) {
    const Value& c = a[idx(static_cast<PortId>(u), x)];
    if (!ring.is_zero(c)) into_x.emplace_back(static_cast<PortId>(u), c);
  }
  for (std::size_t v = 0; v < n_; ++v) {
    const Value& c = a[idx(y, static_cast<PortId>(v))];
    if (!ring.is_zero(c)) from_y.emplace_back(static_cast<PortId>(v), c);
  }
  if (wc) wc->charge(2 * n_);
  for (const auto& [u, cu] : into_x) {
    const std::size_t row = idx(u, 0);
    for (const auto& [v, cv] : from_y) {
      const Value prod = ring.mul(cu, cv);
      if (insert)
        ring.add(a[row + v], prod);
      else
        ring.sub(a[row + v], prod);
    }
    if (wc) wc->charge(from_y.size());
  }
}

void PathCountClosure::recompute(const CompositeGraph& g, WorkCounter* wc) {
  if (g.size() != n_) throw Error("recompute: size mismatch");
  auto order = topological_order(g);
  if (!order) throw Error("recompute: graph is cyclic");
  begin_recompute(wc);
  for (std::size_t i = n_; i-- > 0;) recompute_vertex(g, (*order)[i], wc);
}

void PathCountClosure::begin_recompute(WorkCounter* wc) {
  if (mode_ == CountMode::modular)
    mod_.assign(n_ * n_, 0);
  else
    exact_.assign(n_ * n_, BigCount(0));
  if (wc) wc->charge(n_);
}

void PathCountClosure::recompute_vertex(const CompositeGraph& g, PortId v,
                                        WorkCounter* wc) {
  if (g.size() != n_ || v >= n_) throw Error("recompute_vertex: bad input");
  if (mode_ == CountMode::modular) {
    ModRing ring{modulus_};
    recompute_vertex_impl(g, v, mod_, ring, wc);
  } else {
    ExactRing ring;
    recompute_vertex_impl(g, v, exact_, ring, wc);
  }
}

void PathCountClosure::insert_edge(PortId x, PortId y, WorkCounter* wc) {
  if (x >= n_ || y >= n_ || x == y) throw Error("insert_edge: bad endpoints");
  if (mode_ == CountMode::modular) {
    ModRing ring{modulus_};
    update_impl(x, y, true, mod_, ring, wc);
  } else {
    ExactRing ring;
    update_impl(x, y, true, exact_, ring, wc);
  }
}

void PathCountClosure::erase_edge(PortId x, PortId y, WorkCounter* wc) {
  if (x >= n_ || y >= n_ || x == y) throw Error("erase_edge: bad endpoints");
  if (mode_ == CountMode::modular) {
    ModRing ring{modulus_};
    update_impl(x, y, false, mod_, ring, wc);
  } else {
    ExactRing ring;
    update_impl(x, y, false, exact_, ring, wc);
  }
}

bool PathCountClosure::reachable(PortId u, PortId v, WorkCounter* wc) const {
  if (u >= n_ || v >= n_) throw Error("reachable: vertex out of range");
  if (u == v) throw Error("reachable: self query is undefined");
  if (wc) wc->charge(1);
  return mode_ == CountMode::modular ? mod_[idx(u, v)] != 0
                                     : exact_[idx(u, v)] != 0;
}

bool PathCountClosure::would_close_cycle(PortId x, PortId y,
                                         WorkCounter* wc) const {
  if (x >= n_ || y >= n_) throw Error("would_close_cycle: vertex out of range");
  if (x == y) return true;
  return reachable(y, x, wc);
}

BigCount PathCountClosure::count(PortId u, PortId v) const {
  if (u >= n_ || v >= n_) throw Error("count: vertex out of range");
  return mode_ == CountMode::modular ? BigCount(mod_[idx(u, v)])
                                     : exact_[idx(u, v)];
}

bool operator==(const PathCountClosure& a, const PathCountClosure& b) {
  return a.n_ == b.n_ && a.mode_ == b.mode_ && a.modulus_ == b.modulus_ &&
         a.exact_ == b.exact_ && a.mod_ == b.mod_;
}

}  // namespace icd
