#include "icd/model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace icd {

using nlohmann::json;

namespace {

void check_identifier(const std::string& s, const char* what) {
  if (s.empty()) throw ModelError(std::string(what) + " name is empty");
  if (s.find('.') != std::string::npos)
    throw ModelError(std::string(what) + " name '" + s +
                     "' must not contain '.'");
}

}  // namespace

CompositeModel::CompositeModel(
    std::vector<ComponentModel> models,
    std::vector<std::pair<std::string, std::string>> signals, bool relaxed)
    : models_(std::move(models)),
      signals_(std::move(signals)),
      relaxed_(relaxed) {
  index_ports();
  resolve_modes();
  validate();
}

void CompositeModel::index_ports() {
  for (std::size_t i = 0; i < models_.size(); ++i) {
    const ComponentModel& m = models_[i];
    check_identifier(m.id, "model");
    if (!model_by_id_.emplace(m.id, i).second)
      throw ModelError("duplicate model id '" + m.id + "'");
    model_port_base_.push_back(static_cast<PortId>(port_names_.size()));
    std::set<std::string> seen;
    auto add_port = [&](const std::string& name, bool input) {
      check_identifier(name, "port");
      if (!seen.insert(name).second)
        throw ModelError("model '" + m.id + "' declares port '" + name +
                         "' twice");
      const std::string qualified = m.id + "." + name;
      port_by_name_.emplace(qualified, static_cast<PortId>(port_names_.size()));
      port_names_.push_back(qualified);
      port_model_.push_back(static_cast<std::uint32_t>(i));
      is_input_.push_back(input);
    };
    for (const std::string& p : m.inputs) add_port(p, true);
    for (const std::string& p : m.outputs) add_port(p, false);
  }
}

void CompositeModel::resolve_modes() {
  resolved_modes_.resize(models_.size());
  for (std::size_t i = 0; i < models_.size(); ++i) {
    const ComponentModel& m = models_[i];
    if (m.modes.empty())
      throw ModelError("model '" + m.id + "' declares no modes");
    if (!m.modes.count(m.initial_mode))
      throw ModelError("model '" + m.id + "': initial_mode '" +
                       m.initial_mode + "' is not among its modes");
    if (!m.safe_mode.empty() && !m.modes.count(m.safe_mode))
      throw ModelError("model '" + m.id + "': safe_mode '" + m.safe_mode +
                       "' is not among its modes");
    auto resolve = [&](const std::string& name) -> PortId {
      const std::string qualified =
          name.find('.') != std::string::npos ? name : m.id + "." + name;
      auto it = port_by_name_.find(qualified);
      if (it == port_by_name_.end())
        throw ModelError("model '" + m.id + "' references unknown port '" +
                         name + "'");
      return it->second;
    };
    for (const auto& [mode_name, edges] : m.modes) {
      std::vector<std::pair<PortId, PortId>> resolved;
      resolved.reserve(edges.size());
      for (const auto& [from_name, to_name] : edges) {
        const PortId from = resolve(from_name);
        const PortId to = resolve(to_name);
        if (!is_input_[from])
          throw ModelError("model '" + m.id + "' mode '" + mode_name +
                           "': dependency source '" + port_names_[from] +
                           "' is not an input");
        if (is_input_[to])
          throw ModelError("model '" + m.id + "' mode '" + mode_name +
                           "': dependency target '" + port_names_[to] +
                           "' is not an output");
        if (!relaxed_ &&
            (port_model_[from] != i || port_model_[to] != i))
          throw ModelError("model '" + m.id + "' mode '" + mode_name +
                           "': dependencies must connect the model's own "
                           "ports ('" +
                           port_names_[from] + "' -> '" + port_names_[to] +
                           "')");
        resolved.emplace_back(from, to);
      }
      std::sort(resolved.begin(), resolved.end());
      if (std::adjacent_find(resolved.begin(), resolved.end()) !=
          resolved.end())
        throw ModelError("model '" + m.id + "' mode '" + mode_name +
                         "' lists a dependency twice");
      resolved_modes_[i].emplace(mode_name, std::move(resolved));
    }
  }
}

void CompositeModel::validate() {
  std::vector<bool> has_writer(num_ports(), false);
  std::set<std::pair<PortId, PortId>> seen_signals;
  for (const auto& [from_name, to_name] : signals_) {
    const PortId from = port(from_name);
    const PortId to = port(to_name);
    if (is_input_[from])
      throw ModelError("signal source '" + from_name + "' is not an output");
    if (!is_input_[to])
      throw ModelError("signal target '" + to_name + "' is not an input");
    if (!seen_signals.emplace(from, to).second)
      throw ModelError("duplicate signal '" + from_name + "' -> '" + to_name +
                       "'");
    if (!relaxed_ && has_writer[to])
      throw ModelError("input '" + to_name + "' has more than one signal "
                       "writer");
    has_writer[to] = true;
  }

  auto check_acyclic = [&](const std::map<std::string, std::string>* overrides,
                           const std::string& what) {
    const CompositeGraph g = build_composite_graph(*this, overrides);
    if (auto cycle = find_cycle(g)) {
      std::ostringstream msg;
      msg << what << " is cyclic:";
      for (PortId v : *cycle) msg << " " << port_names_[v];
      throw ModelError(msg.str());
    }
  };
  check_acyclic(nullptr, "initial configuration");

  // Safe modes must stay acyclic against everyone else's initial
  // mode, and in the all-safe configuration.
  std::map<std::string, std::string> all_safe;
  for (const ComponentModel& m : models_) {
    if (m.safe_mode.empty()) continue;
    std::map<std::string, std::string> one{{m.id, m.safe_mode}};
    check_acyclic(&one, "safe mode of model '" + m.id + "'");
    all_safe.emplace(m.id, m.safe_mode);
  }
  if (!all_safe.empty())
    check_acyclic(&all_safe, "all-safe configuration");
}

PortId CompositeModel::port(const std::string& qualified) const {
  auto it = port_by_name_.find(qualified);
  if (it == port_by_name_.end())
    throw ModelError("unknown port '" + qualified + "'");
  return it->second;
}

std::optional<PortId> CompositeModel::try_port(
    const std::string& qualified) const {
  auto it = port_by_name_.find(qualified);
  if (it == port_by_name_.end()) return std::nullopt;
  return it->second;
}

std::size_t CompositeModel::model_index(const std::string& id) const {
  auto it = model_by_id_.find(id);
  if (it == model_by_id_.end())
    throw ModelError("unknown model '" + id + "'");
  return it->second;
}

std::pair<PortId, PortId> CompositeModel::input_range(
    std::size_t model_idx) const {
  const PortId base = model_port_base_[model_idx];
  return {base,
          base + static_cast<PortId>(models_[model_idx].inputs.size())};
}

std::pair<PortId, PortId> CompositeModel::output_range(
    std::size_t model_idx) const {
  const PortId base = model_port_base_[model_idx] +
                      static_cast<PortId>(models_[model_idx].inputs.size());
  return {base,
          base + static_cast<PortId>(models_[model_idx].outputs.size())};
}

const std::vector<std::pair<PortId, PortId>>& CompositeModel::mode_edges(
    std::size_t model_idx, const std::string& mode) const {
  const auto& modes = resolved_modes_[model_idx];
  auto it = modes.find(mode);
  if (it == modes.end())
    throw ModelError("model '" + models_[model_idx].id +
                     "' has no mode '" + mode + "'");
  return it->second;
}

namespace {

const json& expect(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end())
    throw ModelError(ctx + ": missing key '" + key + "'");
  return *it;
}

std::string as_string(const json& j, const std::string& ctx) {
  if (!j.is_string()) throw ModelError(ctx + ": expected a string");
  return j.get<std::string>();
}

std::vector<std::string> as_string_array(const json& j,
                                         const std::string& ctx) {
  if (!j.is_array()) throw ModelError(ctx + ": expected an array");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(as_string(e, ctx));
  return out;
}

std::pair<std::string, std::string> as_edge(const json& j,
                                            const std::string& ctx) {
  if (!j.is_array() || j.size() != 2)
    throw ModelError(ctx + ": expected a two-element [from, to] pair");
  return {as_string(j[0], ctx), as_string(j[1], ctx)};
}

}  // namespace

CompositeModel parse_composite(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ModelError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ModelError("model file: expected a JSON object");

  bool relaxed = false;
  if (auto it = j.find("structure"); it != j.end()) {
    const std::string s = as_string(*it, "structure");
    if (s == "relaxed")
      relaxed = true;
    else if (s != "strict")
      throw ModelError("structure must be 'strict' or 'relaxed'");
  }

  std::vector<ComponentModel> models;
  const json& jmodels = expect(j, "models", "model file");
  if (!jmodels.is_array()) throw ModelError("models: expected an array");
  for (const auto& jm : jmodels) {
    if (!jm.is_object()) throw ModelError("models: expected objects");
    ComponentModel m;
    m.id = as_string(expect(jm, "id", "model"), "model id");
    m.inputs = as_string_array(expect(jm, "inputs", "model '" + m.id + "'"),
                               "model '" + m.id + "' inputs");
    m.outputs = as_string_array(expect(jm, "outputs", "model '" + m.id + "'"),
                                "model '" + m.id + "' outputs");
    const json& jmodes = expect(jm, "modes", "model '" + m.id + "'");
    if (!jmodes.is_object())
      throw ModelError("model '" + m.id + "': modes must be an object");
    for (const auto& [mode_name, jedges] : jmodes.items()) {
      if (!jedges.is_array())
        throw ModelError("model '" + m.id + "' mode '" + mode_name +
                         "': expected an edge array");
      std::vector<std::pair<std::string, std::string>> edges;
      for (const auto& je : jedges)
        edges.push_back(as_edge(je, "model '" + m.id + "' mode '" +
                                        mode_name + "'"));
      m.modes.emplace(mode_name, std::move(edges));
    }
    m.initial_mode = as_string(expect(jm, "initial_mode", "model '" + m.id + "'"),
                               "model '" + m.id + "' initial_mode");
    if (auto it = jm.find("safe_mode"); it != jm.end())
      m.safe_mode = as_string(*it, "model '" + m.id + "' safe_mode");
    models.push_back(std::move(m));
  }

  std::vector<std::pair<std::string, std::string>> signals;
  if (auto it = j.find("signals"); it != j.end()) {
    if (!it->is_array()) throw ModelError("signals: expected an array");
    for (const auto& js : *it) signals.push_back(as_edge(js, "signals"));
  }

  return CompositeModel(std::move(models), std::move(signals), relaxed);
}

CompositeModel load_composite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_composite(buf.str());
}

std::string to_json_text(const CompositeModel& m) {
  json j;
  json jmodels = json::array();
  for (const ComponentModel& cm : m.models()) {
    json jm;
    jm["id"] = cm.id;
    jm["inputs"] = cm.inputs;
    jm["outputs"] = cm.outputs;
    json jmodes;
    for (const auto& [name, edges] : cm.modes) {
      auto sorted = edges;
      std::sort(sorted.begin(), sorted.end());
      json jedges = json::array();
      for (const auto& [from, to] : sorted)
        jedges.push_back(json::array({from, to}));
      jmodes[name] = std::move(jedges);
    }
    jm["modes"] = std::move(jmodes);
    jm["initial_mode"] = cm.initial_mode;
    if (!cm.safe_mode.empty()) jm["safe_mode"] = cm.safe_mode;
    jmodels.push_back(std::move(jm));
  }
  j["models"] = std::move(jmodels);
  auto signals = m.signals();
  std::sort(signals.begin(), signals.end());
  json jsignals = json::array();
  for (const auto& [from, to] : signals)
    jsignals.push_back(json::array({from, to}));
  j["signals"] = std::move(jsignals);
  if (m.relaxed()) j["structure"] = "relaxed";
  return j.dump(2) + "\n";
}

void save_composite(const CompositeModel& m,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ModelError("cannot write model file '" + path.string() + "'");
  out << to_json_text(m);
}

CompositeGraph build_composite_graph(
    const CompositeModel& m,
    const std::map<std::string, std::string>* mode_overrides) {
  CompositeGraph g(m.num_ports());
  if (mode_overrides)
    for (const auto& [id, mode] : *mode_overrides)
      m.mode_edges(m.model_index(id), mode);  // validate names up front
  for (const auto& [from_name, to_name] : m.signals()) {
    const PortId from = m.port(from_name);
    const PortId to = m.port(to_name);
    if (g.has_edge(from, to))
      throw ModelError("duplicate signal '" + from_name + "' -> '" + to_name +
                       "'");
    g.add_edge(from, to, true);
  }
  for (std::size_t i = 0; i < m.models().size(); ++i) {
    const ComponentModel& cm = m.models()[i];
    const std::string* mode = &cm.initial_mode;
    if (mode_overrides) {
      auto it = mode_overrides->find(cm.id);
      if (it != mode_overrides->end()) mode = &it->second;
    }
    for (const auto& [from, to] : m.mode_edges(i, *mode)) {
      if (g.has_edge(from, to))
        throw ModelError("model '" + cm.id + "' mode '" + *mode +
                         "': dependency '" + m.port_name(from) + "' -> '" +
                         m.port_name(to) + "' duplicates an existing edge");
      g.add_edge(from, to, false);
    }
  }
  return g;
}

Partitioning per_model_partitioning(const CompositeModel& m) {
  return make_per_model_partitioning(m.port_models(), m.models().size());
}

Partitioning fixed_count_partitioning(const CompositeModel& m, std::size_t k) {
  return make_fixed_count_partitioning(m.port_models(), m.models().size(), k);
}

Partitioning grouped_partitioning(
    const CompositeModel& m,
    const std::vector<std::vector<std::string>>& groups_by_id) {
  std::vector<std::vector<std::uint32_t>> groups;
  groups.reserve(groups_by_id.size());
  for (const auto& ids : groups_by_id) {
    std::vector<std::uint32_t> g;
    g.reserve(ids.size());
    for (const std::string& id : ids)
      g.push_back(static_cast<std::uint32_t>(m.model_index(id)));
    groups.push_back(std::move(g));
  }
  return make_grouped_partitioning(m.port_models(), m.models().size(), groups);
}

}  // namespace icd
