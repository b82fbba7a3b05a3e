#include "icd/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "icd/rng.hpp"

namespace icd {

using nlohmann::json;

void validate_scenario_config(const ScenarioConfig& cfg) {
  const double sum = cfg.mix.a + cfg.mix.b + cfg.mix.c;
  if (cfg.mix.a < 0 || cfg.mix.b < 0 || cfg.mix.c < 0)
    throw ScenarioError("type mix proportions must be non-negative");
  if (std::abs(sum - 1.0) > 1e-9)
    throw ScenarioError("type mix proportions must sum to 1");
  if (cfg.edges_per_mcr < 1)
    throw ScenarioError("edges_per_mcr must be at least 1");
  if (cfg.edges_per_mcr < 2 && (cfg.mix.b > 0 || cfg.mix.c > 0))
    throw ScenarioError(
        "type-b/c requests need edges_per_mcr >= 2 (a single edge is type a)");
  if (cfg.p_mcr_s < 0) throw ScenarioError("p_mcr_s must be non-negative");
  if (cfg.tick_s <= 0) throw ScenarioError("tick_s must be positive");
  if (cfg.models_per_mcr < 1)
    throw ScenarioError("models_per_mcr must be at least 1");
}

namespace {

[[noreturn]] void bad(const std::string& what) { throw ScenarioError(what); }

ScenarioConfig parse_generator(const json& g) {
  ScenarioConfig cfg;
  if (!g.is_object()) bad("\"generator\" must be an object");
  for (auto& [key, val] : g.items()) {
    if (key == "seed") {
      if (!val.is_number_unsigned()) bad("generator.seed must be unsigned");
      cfg.seed = val.get<std::uint64_t>();
    } else if (key == "p_mcr_s") {
      if (!val.is_number()) bad("generator.p_mcr_s must be a number");
      cfg.p_mcr_s = val.get<double>();
    } else if (key == "total") {
      if (!val.is_number_unsigned()) bad("generator.total must be unsigned");
      cfg.total = val.get<std::size_t>();
    } else if (key == "mix") {
      if (!val.is_object()) bad("generator.mix must be an object");
      cfg.mix.a = val.value("a", 0.0);
      cfg.mix.b = val.value("b", 0.0);
      cfg.mix.c = val.value("c", 0.0);
    } else if (key == "models_per_mcr") {
      cfg.models_per_mcr = val.get<std::size_t>();
    } else if (key == "edges_per_mcr") {
      cfg.edges_per_mcr = val.get<std::size_t>();
    } else if (key == "cycle_free_only") {
      if (!val.is_boolean()) bad("generator.cycle_free_only must be a bool");
      cfg.cycle_free_only = val.get<bool>();
    } else if (key == "tick_s") {
      cfg.tick_s = val.get<double>();
    } else if (key == "warmup") {
      cfg.warmup = val.get<bool>();
    } else if (key == "unit_budget_per_tick") {
      cfg.unit_budget_per_tick = val.get<std::uint64_t>();
    } else {
      bad("unknown generator field \"" + key + "\"");
    }
  }
  validate_scenario_config(cfg);
  return cfg;
}

std::vector<ScheduleEntry> parse_schedule(const json& s) {
  if (!s.is_array()) bad("\"schedule\" must be an array");
  std::vector<ScheduleEntry> entries;
  for (const json& e : s) {
    if (!e.is_object()) bad("schedule entries must be objects");
    ScheduleEntry entry;
    if (!e.contains("tick") || !e["tick"].is_number_integer())
      bad("schedule entry needs an integer \"tick\"");
    entry.tick = e["tick"].get<std::int64_t>();
    const bool has_safe = e.contains("safe_mode");
    const bool has_ops = e.contains("ops");
    if (has_safe == has_ops)
      bad("schedule entry needs exactly one of \"ops\" and \"safe_mode\"");
    if (has_safe) {
      if (!e["safe_mode"].is_string())
        bad("schedule entry safe_mode must be a model id string");
      entry.safe_mode = e["safe_mode"].get<std::string>();
    } else {
      if (!e["ops"].is_array()) bad("schedule entry ops must be an array");
      for (const json& op : e["ops"]) {
        if (!op.is_array() || op.size() != 3 || !op[0].is_string() ||
            !op[1].is_string() || !op[2].is_string())
          bad("schedule op must be [\"ins|del\",\"from\",\"to\"]");
        ScheduleOp so;
        const std::string kind = op[0].get<std::string>();
        if (kind == "ins")
          so.kind = EdgeOp::Kind::insert;
        else if (kind == "del")
          so.kind = EdgeOp::Kind::erase;
        else
          bad("schedule op kind must be \"ins\" or \"del\", got \"" + kind +
              "\"");
        so.from = op[1].get<std::string>();
        so.to = op[2].get<std::string>();
        entry.ops.push_back(std::move(so));
      }
    }
    if (e.contains("models")) {
      if (!e["models"].is_array()) bad("schedule entry models must be an array");
      for (const json& m : e["models"])
        entry.models.push_back(m.get<std::string>());
    }
    if (e.contains("target_modes")) {
      if (!e["target_modes"].is_object())
        bad("schedule entry target_modes must be an object");
      for (auto& [id, mode] : e["target_modes"].items())
        entry.target_modes.emplace(id, mode.get<std::string>());
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace

ScenarioFile parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    bad(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) bad("scenario root must be an object");
  ScenarioFile s;
  if (j.contains("generator") == j.contains("schedule"))
    bad("scenario needs exactly one of \"generator\" and \"schedule\"");
  if (j.contains("generator")) s.generator = parse_generator(j["generator"]);
  if (j.contains("schedule")) s.schedule = parse_schedule(j["schedule"]);
  return s;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string to_json_text(const ScenarioFile& s) {
  json j = json::object();
  if (s.generator) {
    const ScenarioConfig& c = *s.generator;
    j["generator"] = {
        {"seed", c.seed},
        {"p_mcr_s", c.p_mcr_s},
        {"total", c.total},
        {"mix", {{"a", c.mix.a}, {"b", c.mix.b}, {"c", c.mix.c}}},
        {"models_per_mcr", c.models_per_mcr},
        {"edges_per_mcr", c.edges_per_mcr},
        {"cycle_free_only", c.cycle_free_only},
        {"tick_s", c.tick_s},
        {"warmup", c.warmup},
        {"unit_budget_per_tick", c.unit_budget_per_tick},
    };
  }
  if (s.schedule) {
    json arr = json::array();
    for (const ScheduleEntry& e : *s.schedule) {
      json je = json::object();
      je["tick"] = e.tick;
      if (!e.safe_mode.empty()) {
        je["safe_mode"] = e.safe_mode;
      } else {
        json ops = json::array();
        for (const ScheduleOp& op : e.ops)
          ops.push_back(json::array(
              {op.kind == EdgeOp::Kind::insert ? "ins" : "del", op.from,
               op.to}));
        je["ops"] = std::move(ops);
      }
      if (!e.models.empty()) je["models"] = e.models;
      if (!e.target_modes.empty()) je["target_modes"] = e.target_modes;
      arr.push_back(std::move(je));
    }
    j["schedule"] = std::move(arr);
  }
  return j.dump(2) + "\n";
}

void save_scenario(const ScenarioFile& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) bad("cannot write scenario file " + path.string());
  out << to_json_text(s);
}

std::vector<EdgeOp> resolve_ops(const CompositeModel& model,
                                const ScheduleEntry& entry) {
  if (!entry.safe_mode.empty())
    bad("safe_mode entries carry no ops to resolve");
  std::vector<EdgeOp> ops;
  try {
    for (const ScheduleOp& op : entry.ops) {
      const PortId from = model.port(op.from);
      const PortId to = model.port(op.to);
      ops.push_back(op.kind == EdgeOp::Kind::insert ? make_insert(from, to)
                                                    : make_erase(from, to));
    }
  } catch (const ModelError& e) {
    bad(e.what());
  }
  return ops;
}

namespace {

// Candidate machinery for the random stream. All draws go through the
// shared rng in a fixed order, so streams are reproducible.
struct StreamBuilder {
  const CompositeModel& model;
  const Partitioning& parts;
  const ScenarioConfig& cfg;
  std::mt19937_64 rng;
  CompositeGraph graph;  // reference, tracks accepted requests
  std::vector<std::uint32_t> rank;
  std::vector<std::vector<PortId>> part_inputs, part_outputs;

  StreamBuilder(const CompositeModel& m, const Partitioning& p,
                const ScenarioConfig& c)
      : model(m), parts(p), cfg(c), rng(c.seed),
        graph(build_composite_graph(m)) {
    auto order = topological_order(graph);
    if (!order) throw ScenarioError("initial composite graph is cyclic");
    rank.resize(graph.size());
    for (std::size_t i = 0; i < order->size(); ++i)
      rank[(*order)[i]] = static_cast<std::uint32_t>(i);
    part_inputs.resize(parts.num_parts());
    part_outputs.resize(parts.num_parts());
    for (PortId v = 0; v < graph.size(); ++v)
      (model.is_input(v) ? part_inputs : part_outputs)[parts.part_of(v)]
          .push_back(v);
  }

  bool insert_ok(PortId u, PortId w,
                 const std::set<std::pair<PortId, PortId>>& used) const {
    if (graph.has_edge(u, w)) return false;
    if (used.count({u, w})) return false;
    if (cfg.cycle_free_only && rank[u] >= rank[w]) return false;
    return true;
  }

  std::vector<std::pair<PortId, PortId>> partition_candidates(
      std::uint32_t p, const std::set<std::pair<PortId, PortId>>& used) const {
    std::vector<std::pair<PortId, PortId>> out;
    for (PortId u : part_inputs[p])
      for (PortId w : part_outputs[p])
        if (insert_ok(u, w, used)) out.emplace_back(u, w);
    return out;
  }

  std::vector<std::pair<PortId, PortId>> global_candidates(
      const std::set<std::pair<PortId, PortId>>& used) const {
    std::vector<std::pair<PortId, PortId>> out;
    for (PortId u = 0; u < graph.size(); ++u) {
      if (!model.is_input(u)) continue;
      for (PortId w = 0; w < graph.size(); ++w)
        if (!model.is_input(w) && insert_ok(u, w, used)) out.emplace_back(u, w);
    }
    return out;
  }

  // Present dependency (non-signal) edges, in adjacency order.
  std::vector<std::pair<PortId, PortId>> erasable_edges() const {
    std::vector<std::pair<PortId, PortId>> out;
    for (PortId u = 0; u < graph.size(); ++u) {
      if (!model.is_input(u)) continue;
      for (PortId w : graph.successors(u))
        if (!graph.is_signal(u, w)) out.emplace_back(u, w);
    }
    return out;
  }

  std::vector<EdgeOp> make_type_a() {
    std::set<std::pair<PortId, PortId>> used;
    const auto erasable = erasable_edges();
    if (!erasable.empty() && chance(rng, 1, 2)) {
      const auto& e = erasable[uniform_below(rng, erasable.size())];
      return {make_erase(e.first, e.second)};
    }
    const auto cand = global_candidates(used);
    if (!cand.empty()) {
      const auto& e = cand[uniform_below(rng, cand.size())];
      return {make_insert(e.first, e.second)};
    }
    if (erasable.empty())
      throw ScenarioError("type-a request infeasible: nothing to insert or "
                          "delete");
    const auto& e = erasable[uniform_below(rng, erasable.size())];
    return {make_erase(e.first, e.second)};
  }

  std::vector<EdgeOp> make_type_b() {
    std::set<std::pair<PortId, PortId>> used;
    std::vector<std::uint32_t> order(parts.num_parts());
    for (std::uint32_t p = 0; p < parts.num_parts(); ++p) order[p] = p;
    shuffle_vec(rng, order);
    for (std::uint32_t p : order) {
      auto cand = partition_candidates(p, used);
      if (cand.size() < cfg.edges_per_mcr) continue;
      shuffle_vec(rng, cand);
      cand.resize(cfg.edges_per_mcr);
      std::sort(cand.begin(), cand.end());
      std::vector<EdgeOp> ops;
      for (const auto& e : cand) ops.push_back(make_insert(e.first, e.second));
      return ops;
    }
    throw ScenarioError(
        "type-b request infeasible: no partition has enough insert "
        "candidates");
  }

  std::vector<EdgeOp> make_type_c() {
    if (parts.num_parts() < 2)
      throw ScenarioError("type-c requests need at least 2 partitions");
    std::set<std::pair<PortId, PortId>> used;
    const std::size_t spread =
        std::clamp<std::size_t>(cfg.models_per_mcr, 2, parts.num_parts());
    std::vector<std::uint32_t> order(parts.num_parts());
    for (std::uint32_t p = 0; p < parts.num_parts(); ++p) order[p] = p;
    shuffle_vec(rng, order);

    std::vector<std::pair<PortId, PortId>> picked;
    std::set<std::uint32_t> touched;
    std::size_t slot = 0;
    while (picked.size() < cfg.edges_per_mcr) {
      // Round-robin over the first `spread` partitions, falling through
      // to the rest when one runs dry.  While only one partition has been
      // touched, a fall-through prefers an untouched partition so the
      // request spans two of them whenever that is still possible.
      std::optional<std::uint32_t> first_nonempty, first_new;
      for (std::size_t off = 0; off < order.size(); ++off) {
        const std::uint32_t p = order[(slot % spread + off) % order.size()];
        if (partition_candidates(p, used).empty()) continue;
        if (!first_nonempty) first_nonempty = p;
        if (!touched.count(p)) {
          first_new = p;
          break;
        }
      }
      if (!first_nonempty)
        throw ScenarioError(
            "type-c request infeasible: insert candidates exhausted");
      const std::uint32_t p =
          (touched.size() == 1 && first_new) ? *first_new : *first_nonempty;
      auto cand = partition_candidates(p, used);
      const auto& e = cand[uniform_below(rng, cand.size())];
      picked.push_back(e);
      used.insert(e);
      touched.insert(p);
      ++slot;
    }
    if (touched.size() < 2)
      throw ScenarioError(
          "type-c request infeasible: could not span two partitions");
    std::sort(picked.begin(), picked.end());
    std::vector<EdgeOp> ops;
    for (const auto& e : picked) ops.push_back(make_insert(e.first, e.second));
    return ops;
  }

  // Applies an accepted request to the reference graph; under
  // cycle_free_only everything is accepted by construction, otherwise
  // a DFS decides like the oracle will.
  void account(const std::vector<EdgeOp>& ops) {
    apply_edge_ops(graph, ops);
    if (!cfg.cycle_free_only && dfs_has_cycle(graph))
      apply_edge_ops(graph, inverted(ops));
  }
};

}  // namespace

std::vector<ModeChangeRequest> generate_mcr_stream(const CompositeModel& model,
                                                   const Partitioning& parts,
                                                   const ScenarioConfig& cfg) {
  validate_scenario_config(cfg);
  if (cfg.total == 0) return {};
  StreamBuilder b(model, parts, cfg);

  // Exact type counts by largest remainder, then a shuffled sequence.
  const double want[3] = {cfg.mix.a * cfg.total, cfg.mix.b * cfg.total,
                          cfg.mix.c * cfg.total};
  std::size_t count[3];
  for (int t = 0; t < 3; ++t) count[t] = static_cast<std::size_t>(want[t]);
  std::size_t assigned = count[0] + count[1] + count[2];
  while (assigned < cfg.total) {
    int best = 0;
    double best_frac = -1;
    for (int t = 0; t < 3; ++t) {
      const double frac = want[t] - static_cast<double>(count[t]);
      if (frac > best_frac + 1e-12) {
        best_frac = frac;
        best = t;
      }
    }
    ++count[best];
    ++assigned;
  }
  std::vector<McrType> seq;
  for (int t = 0; t < 3; ++t)
    seq.insert(seq.end(), count[t], static_cast<McrType>(t));
  shuffle_vec(b.rng, seq);

  const std::int64_t interval =
      cfg.p_mcr_s <= 0
          ? 0
          : std::max<std::int64_t>(
                1, static_cast<std::int64_t>(std::llround(cfg.p_mcr_s /
                                                          cfg.tick_s)));

  std::vector<ModeChangeRequest> stream;
  for (std::size_t i = 0; i < cfg.total; ++i) {
    ModeChangeRequest mcr;
    mcr.id = i + 1;
    mcr.issue_tick = static_cast<std::int64_t>(i + 1) * interval;
    switch (seq[i]) {
      case McrType::a: mcr.ops = b.make_type_a(); break;
      case McrType::b: mcr.ops = b.make_type_b(); break;
      case McrType::c: mcr.ops = b.make_type_c(); break;
    }
    std::set<std::string> ids;
    for (const EdgeOp& op : mcr.ops)
      ids.insert(model.models()[model.port_model(op.from)].id);
    mcr.models.assign(ids.begin(), ids.end());
    b.account(mcr.ops);
    stream.push_back(std::move(mcr));
  }

  if (cfg.warmup) {
    std::set<std::pair<PortId, PortId>> touched;
    for (const ModeChangeRequest& mcr : stream)
      for (const EdgeOp& op : mcr.ops) touched.emplace(op.from, op.to);
    const CompositeGraph initial = build_composite_graph(model);
    // Several edges, so the re-inserted batch survives a few erases
    // before the pending queue could run empty.
    std::vector<std::pair<PortId, PortId>> picks;
    for (PortId u = 0; u < initial.size() && picks.size() < 8; ++u) {
      if (!model.is_input(u)) continue;
      for (PortId w : initial.successors(u))
        if (!initial.is_signal(u, w) && !touched.count({u, w})) {
          picks.emplace_back(u, w);
          break;
        }
    }
    if (!picks.empty()) {
      ModeChangeRequest wu1, wu2;
      wu1.warmup = wu2.warmup = true;
      std::set<std::string> ids;
      for (const auto& [u, w] : picks) {
        wu1.ops.push_back(make_erase(u, w));
        wu2.ops.push_back(make_insert(u, w));
        ids.insert(model.models()[model.port_model(u)].id);
      }
      wu1.models.assign(ids.begin(), ids.end());
      wu2.models = wu1.models;
      stream.insert(stream.begin(), {std::move(wu1), std::move(wu2)});
    }
  }
  return stream;
}

}  // namespace icd
