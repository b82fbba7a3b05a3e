// Port partitionings used to split the composite into per-partition
// reduced graphs.
#pragma once

#include <cstdint>
#include <vector>

#include "icd/common.hpp"

namespace icd {

// Disjoint, covering assignment of every port to one partition, with
// O(1) port -> partition lookup. Whole models are never split: the
// factories assign ports by their owning model.
class Partitioning {
 public:
  Partitioning() = default;
  // part_of[v] = partition index of port v; indices must be dense in
  // [0, num_parts).
  Partitioning(std::vector<std::uint32_t> part_of, std::size_t num_parts);

  std::size_t num_parts() const { return members_.size(); }
  std::size_t num_ports() const { return part_of_.size(); }
  std::uint32_t part_of(PortId v) const { return part_of_[v]; }
  const std::vector<PortId>& members(std::size_t part) const {
    return members_[part];
  }

  friend bool operator==(const Partitioning&, const Partitioning&) = default;

 private:
  std::vector<std::uint32_t> part_of_;
  std::vector<std::vector<PortId>> members_;
};

// One partition per model.
Partitioning make_per_model_partitioning(
    const std::vector<std::uint32_t>& port_model, std::size_t num_models);

// `k` partitions of whole models, contiguous model ranges of near-even
// size. Groupings for divisors of num_models nest (10 -> 5 -> 2 -> 1),
// which the partition sweeps rely on. pre: 1 <= k <= num_models.
Partitioning make_fixed_count_partitioning(
    const std::vector<std::uint32_t>& port_model, std::size_t num_models,
    std::size_t k);

// Explicit model groups. Every model must appear in exactly one group.
Partitioning make_grouped_partitioning(
    const std::vector<std::uint32_t>& port_model, std::size_t num_models,
    const std::vector<std::vector<std::uint32_t>>& model_groups);

}  // namespace icd
