// Reference implementations the library is tested against. Everything
// here is written the slow obvious way and shares no code with the
// structures under test.
#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "icd/common.hpp"
#include "icd/graph.hpp"
#include "icd/model.hpp"
#include "icd/rng.hpp"

namespace icdtest {

// Floyd-Warshall reachability (no self-reach unless on a cycle).
inline std::vector<std::vector<bool>> floyd_reach(const icd::CompositeGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (std::size_t u = 0; u < n; ++u)
    for (icd::PortId v : g.successors(static_cast<icd::PortId>(u)))
      r[u][v] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = true;
  return r;
}

inline bool floyd_has_cycle(const icd::CompositeGraph& g) {
  const auto r = floyd_reach(g);
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r[i][i]) return true;
  return false;
}

// Path counts from powers of the adjacency matrix:
// sum over k of A^k[u][v], with A^0 = I.
inline icd::BigCount matpow_count(const icd::CompositeGraph& g, icd::PortId u,
                                  icd::PortId v) {
  const std::size_t n = g.size();
  std::vector<icd::BigCount> adj(n * n), power(n * n), total(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    power[a * n + a] = 1;
    total[a * n + a] = 1;
    for (icd::PortId b : g.successors(static_cast<icd::PortId>(a)))
      adj[a * n + b] = 1;
  }
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<icd::BigCount> next(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t m = 0; m < n; ++m)
        if (power[i * n + m] != 0)
          for (std::size_t j = 0; j < n; ++j)
            next[i * n + j] += power[i * n + m] * adj[m * n + j];
    power = std::move(next);
    for (std::size_t a = 0; a < n * n; ++a) total[a] += power[a];
  }
  return total[static_cast<std::size_t>(u) * n + v];
}

// Random digraph, cycles allowed.
inline icd::CompositeGraph random_digraph(std::mt19937_64& rng, std::size_t n,
                                          std::size_t edges) {
  icd::CompositeGraph g(n);
  for (std::size_t e = 0; e < edges; ++e) {
    const auto u = static_cast<icd::PortId>(icd::uniform_below(rng, n));
    const auto v = static_cast<icd::PortId>(icd::uniform_below(rng, n));
    if (u != v && !g.has_edge(u, v)) g.add_edge(u, v);
  }
  return g;
}

// Random DAG: edges point up a hidden shuffled order.
inline icd::CompositeGraph random_dag(std::mt19937_64& rng, std::size_t n,
                                      std::size_t edges) {
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[i] = i;
  icd::shuffle_vec(rng, rank);
  icd::CompositeGraph g(n);
  for (std::size_t e = 0; e < edges; ++e) {
    auto u = static_cast<icd::PortId>(icd::uniform_below(rng, n));
    auto v = static_cast<icd::PortId>(icd::uniform_below(rng, n));
    if (u == v) continue;
    if (rank[u] > rank[v]) std::swap(u, v);
    if (!g.has_edge(u, v)) g.add_edge(u, v);
  }
  return g;
}

// Two-port components wired i -> o in mode "on" (edge live) and "off"
// (empty), plus an empty "safe". Signals chain o of one model to i of
// the next. With close_ring the last output feeds back to m0.i and the
// last model starts "off", so switching it on would close the loop.
inline icd::CompositeModel chain_model(std::size_t k, bool close_ring = false) {
  std::vector<icd::ComponentModel> models;
  for (std::size_t m = 0; m < k; ++m) {
    icd::ComponentModel c;
    c.id = "m" + std::to_string(m);
    c.inputs = {"i"};
    c.outputs = {"o"};
    c.modes["on"] = {{"i", "o"}};
    c.modes["off"] = {};
    c.modes["safe"] = {};
    c.initial_mode = (close_ring && m == k - 1) ? "off" : "on";
    c.safe_mode = "safe";
    models.push_back(std::move(c));
  }
  std::vector<std::pair<std::string, std::string>> signals;
  for (std::size_t m = 0; m + 1 < k; ++m)
    signals.push_back({"m" + std::to_string(m) + ".o",
                       "m" + std::to_string(m + 1) + ".i"});
  if (close_ring && k > 1)
    signals.push_back({"m" + std::to_string(k - 1) + ".o", "m0.i"});
  return icd::CompositeModel(std::move(models), std::move(signals));
}

}  // namespace icdtest
