// Component-based composite models: ports, mode-dependent dependency
// sets, signal wiring, JSON load/save, and graph construction.
//
// File schema (strict by default):
//   {
//     "models": [{"id": "...", "inputs": [...], "outputs": [...],
//                 "modes": {"name": [["in","out"], ...], ...},
//                 "initial_mode": "...", "safe_mode": "..."}, ...],
//     "signals": [["model.out", "model.in"], ...],
//     "structure": "relaxed"            // optional
//   }
//
// Mode edges name the model's own ports; "model.port" qualified names
// are accepted too. Strict files require every dependency to connect
// a model's own input to its own output and every input to have at
// most one signal writer. Files marked "relaxed" (used for generated
// benchmark graphs) may fan several signals into one input and point
// dependencies at other models' outputs.
//
// Ports get dense PortIds in file order: models in order, each
// model's inputs before its outputs.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "icd/common.hpp"
#include "icd/graph.hpp"
#include "icd/partition.hpp"

namespace icd {

struct ComponentModel {
  std::string id;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  // mode name -> dependency edges (input name, output name).
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> modes;
  std::string initial_mode;
  std::string safe_mode;  // empty = no safe mode declared
};

class CompositeModel {
 public:
  CompositeModel() = default;
  // Validates everything up front; throws ModelError with an
  // actionable message (unknown ports, duplicate signal writers,
  // cyclic initial configuration, cyclic safe-mode combination, ...).
  CompositeModel(std::vector<ComponentModel> models,
                 std::vector<std::pair<std::string, std::string>> signals,
                 bool relaxed = false);

  const std::vector<ComponentModel>& models() const { return models_; }
  const std::vector<std::pair<std::string, std::string>>& signals() const {
    return signals_;
  }
  bool relaxed() const { return relaxed_; }

  std::size_t num_ports() const { return port_names_.size(); }
  const std::string& port_name(PortId v) const { return port_names_[v]; }
  // "model.port" -> PortId; throws ModelError on unknown names.
  PortId port(const std::string& qualified) const;
  std::optional<PortId> try_port(const std::string& qualified) const;

  std::uint32_t port_model(PortId v) const { return port_model_[v]; }
  bool is_input(PortId v) const { return is_input_[v]; }
  const std::vector<std::uint32_t>& port_models() const { return port_model_; }

  std::size_t model_index(const std::string& id) const;
  // Input/output PortId ranges of one model, [first, last).
  std::pair<PortId, PortId> input_range(std::size_t model_idx) const;
  std::pair<PortId, PortId> output_range(std::size_t model_idx) const;

  // Resolved, sorted dependency edges of one mode.
  const std::vector<std::pair<PortId, PortId>>& mode_edges(
      std::size_t model_idx, const std::string& mode) const;

 private:
  void index_ports();
  void resolve_modes();
  void validate();

  std::vector<ComponentModel> models_;
  std::vector<std::pair<std::string, std::string>> signals_;
  bool relaxed_ = false;

  std::vector<std::string> port_names_;
  std::vector<std::uint32_t> port_model_;
  std::vector<bool> is_input_;
  std::map<std::string, PortId> port_by_name_;
  std::map<std::string, std::size_t> model_by_id_;
  std::vector<PortId> model_port_base_;  // first PortId of each model
  std::vector<std::map<std::string, std::vector<std::pair<PortId, PortId>>>>
      resolved_modes_;
};

CompositeModel parse_composite(const std::string& json_text);
CompositeModel load_composite(const std::filesystem::path& path);
// Canonical serialization: sorted keys, sorted edge lists, 2-space
// indent, trailing newline. Same model -> same bytes.
std::string to_json_text(const CompositeModel& m);
void save_composite(const CompositeModel& m, const std::filesystem::path& path);

// Active dependency graph: all signal edges plus each model's current
// mode's dependency edges. `mode_overrides` replaces the initial mode
// for the named models.
CompositeGraph build_composite_graph(
    const CompositeModel& m,
    const std::map<std::string, std::string>* mode_overrides = nullptr);

Partitioning per_model_partitioning(const CompositeModel& m);
Partitioning fixed_count_partitioning(const CompositeModel& m, std::size_t k);
Partitioning grouped_partitioning(
    const CompositeModel& m,
    const std::vector<std::vector<std::string>>& groups_by_id);

}  // namespace icd
