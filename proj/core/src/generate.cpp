#include "icd/generate.hpp"

#include <algorithm>

#include "icd/rng.hpp"

namespace icd {

CompositeModel generate_random_dag(const GeneratorParams& p) {
  if (p.ports == 0) return CompositeModel({}, {});
  if (p.models == 0) throw Error("generator: zero models with nonzero ports");
  if (p.ports % (2 * p.models) != 0)
    throw Error("generator: ports must split evenly into inputs and outputs "
                "per model");
  const std::size_t V = p.ports;
  const std::size_t half = V / 2;
  const std::uint64_t candidates =
      static_cast<std::uint64_t>(half) * static_cast<std::uint64_t>(half);
  if (p.target_edges > candidates)
    throw Error("generator: target_edges exceeds candidate pair count");

  const std::size_t per_model = V / p.models;  // even
  const std::size_t q = per_model / 2;         // inputs (= outputs) per model

  std::mt19937_64 rng(p.seed);

  // Hidden topological rank over all ports.
  std::vector<std::uint32_t> order(V);
  for (std::size_t i = 0; i < V; ++i) order[i] = static_cast<std::uint32_t>(i);
  shuffle_vec(rng, order);
  std::vector<std::uint32_t> rank(V);
  for (std::size_t i = 0; i < V; ++i) rank[order[i]] = static_cast<std::uint32_t>(i);

  // Global ids follow the file layout the constructor will assign:
  // model k holds inputs [k*per_model, k*per_model+q) and outputs
  // [k*per_model+q, (k+1)*per_model).
  auto model_of = [&](std::size_t v) { return v / per_model; };
  auto is_input = [&](std::size_t v) { return v % per_model < q; };
  auto local_name = [&](std::size_t v) {
    const std::size_t r = v % per_model;
    return is_input(v) ? "i" + std::to_string(r)
                       : "o" + std::to_string(r - q);
  };
  auto qualified = [&](std::size_t v) {
    return "m" + std::to_string(model_of(v)) + "." + local_name(v);
  };

  std::vector<std::vector<std::pair<std::string, std::string>>> deps(p.models);
  std::vector<std::pair<std::string, std::string>> signals;

  for (std::size_t u = 0; u < V; ++u) {
    if (!is_input(u)) continue;
    for (std::size_t w = 0; w < V; ++w) {
      if (is_input(w)) continue;
      if (!chance(rng, p.target_edges, candidates)) continue;
      if (rank[u] < rank[w])
        deps[model_of(u)].emplace_back(local_name(u), qualified(w));
      else
        signals.emplace_back(qualified(w), qualified(u));
    }
  }

  std::vector<ComponentModel> models(p.models);
  for (std::size_t k = 0; k < p.models; ++k) {
    ComponentModel& m = models[k];
    m.id = "m" + std::to_string(k);
    for (std::size_t r = 0; r < q; ++r) {
      m.inputs.push_back("i" + std::to_string(r));
      m.outputs.push_back("o" + std::to_string(r));
    }
    auto& base = deps[k];
    std::vector<std::pair<std::string, std::string>> alt1, alt2;
    for (std::size_t i = 0; i < base.size(); ++i)
      (i % 2 == 0 ? alt1 : alt2).push_back(base[i]);
    m.modes.emplace("base", std::move(base));
    m.modes.emplace("alt1", std::move(alt1));
    m.modes.emplace("alt2", std::move(alt2));
    m.modes.emplace("safe", std::vector<std::pair<std::string, std::string>>{});
    m.initial_mode = "base";
    m.safe_mode = "safe";
  }

  return CompositeModel(std::move(models), std::move(signals), true);
}

}  // namespace icd
