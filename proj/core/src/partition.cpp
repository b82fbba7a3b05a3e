#include "icd/partition.hpp"

namespace icd {

Partitioning::Partitioning(std::vector<std::uint32_t> part_of,
                           std::size_t num_parts)
    : part_of_(std::move(part_of)), members_(num_parts) {
  for (std::size_t v = 0; v < part_of_.size(); ++v) {
    if (part_of_[v] >= num_parts)
      throw Error("partition index out of range");
    members_[part_of_[v]].push_back(static_cast<PortId>(v));
  }
}

Partitioning make_per_model_partitioning(
    const std::vector<std::uint32_t>& port_model, std::size_t num_models) {
  return Partitioning(port_model, num_models);
}

Partitioning make_fixed_count_partitioning(
    const std::vector<std::uint32_t>& port_model, std::size_t num_models,
    std::size_t k) {
  if (k == 0) throw Error("partition count must be positive");
  if (k > num_models && !(num_models == 0 && k == 1))
    throw Error("more partitions than models");
  std::vector<std::uint32_t> part_of(port_model.size());
  for (std::size_t v = 0; v < port_model.size(); ++v)
    part_of[v] = static_cast<std::uint32_t>(
        static_cast<std::size_t>(port_model[v]) * k / num_models);
  return Partitioning(std::move(part_of), k);
}

Partitioning make_grouped_partitioning(
    const std::vector<std::uint32_t>& port_model, std::size_t num_models,
    const std::vector<std::vector<std::uint32_t>>& model_groups) {
  constexpr std::uint32_t kUnassigned = 0xffffffffu;
  std::vector<std::uint32_t> group_of(num_models, kUnassigned);
  for (std::size_t g = 0; g < model_groups.size(); ++g) {
    for (std::uint32_t m : model_groups[g]) {
      if (m >= num_models) throw Error("grouping names an unknown model");
      if (group_of[m] != kUnassigned)
        throw Error("grouping lists a model twice");
      group_of[m] = static_cast<std::uint32_t>(g);
    }
  }
  for (std::size_t m = 0; m < num_models; ++m)
    if (group_of[m] == kUnassigned)
      throw Error("grouping misses a model");
  std::vector<std::uint32_t> part_of(port_model.size());
  for (std::size_t v = 0; v < port_model.size(); ++v)
    part_of[v] = group_of[port_model[v]];
  return Partitioning(std::move(part_of), model_groups.size());
}

}  // namespace icd
