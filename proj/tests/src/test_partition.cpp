#include <doctest.h>

#include <set>

#include "icd/partition.hpp"

using namespace icd;

namespace {

std::vector<std::uint32_t> even_port_model(std::size_t models,
                                           std::size_t ports_per_model) {
  std::vector<std::uint32_t> pm;
  for (std::size_t m = 0; m < models; ++m)
    for (std::size_t p = 0; p < ports_per_model; ++p)
      pm.push_back(static_cast<std::uint32_t>(m));
  return pm;
}

}  // namespace

TEST_CASE("per-model partitioning mirrors port ownership") {
  const auto pm = even_port_model(4, 3);
  const Partitioning parts = make_per_model_partitioning(pm, 4);
  CHECK(parts.num_parts() == 4);
  CHECK(parts.num_ports() == 12);
  for (PortId v = 0; v < 12; ++v) CHECK(parts.part_of(v) == pm[v]);
  std::set<PortId> seen;
  for (std::size_t p = 0; p < parts.num_parts(); ++p) {
    const auto& mem = parts.members(p);
    CHECK(std::is_sorted(mem.begin(), mem.end()));
    for (PortId v : mem) {
      CHECK(parts.part_of(v) == p);
      CHECK(seen.insert(v).second);
    }
  }
  CHECK(seen.size() == 12);
}

TEST_CASE("fixed-count partitioning keeps whole models and stays even") {
  const auto pm = even_port_model(10, 4);
  for (std::size_t k : {1u, 2u, 3u, 5u, 7u, 10u}) {
    const Partitioning parts = make_fixed_count_partitioning(pm, 10, k);
    CHECK(parts.num_parts() == k);
    // whole models: both ports of a model share a partition
    for (PortId v = 0; v < 40; ++v)
      CHECK(parts.part_of(v) == parts.part_of((v / 4) * 4));
    std::vector<std::size_t> sizes(k, 0);
    for (PortId v = 0; v < 40; ++v) ++sizes[parts.part_of(v)];
    const auto [mn, mx] = std::minmax_element(sizes.begin(), sizes.end());
    CHECK(*mx - *mn <= 4);
  }
}

TEST_CASE("fixed counts along a divisor chain nest") {
  const auto pm = even_port_model(12, 4);
  const std::size_t chain[] = {12, 6, 3, 1};
  for (std::size_t i = 0; i + 1 < 4; ++i) {
    const Partitioning fine = make_fixed_count_partitioning(pm, 12, chain[i]);
    const Partitioning coarse =
        make_fixed_count_partitioning(pm, 12, chain[i + 1]);
    // refinement: same fine part implies same coarse part
    std::vector<std::int64_t> image(chain[i], -1);
    for (PortId v = 0; v < 48; ++v) {
      const auto f = fine.part_of(v);
      const auto c = coarse.part_of(v);
      if (image[f] < 0) image[f] = c;
      CHECK(image[f] == c);
    }
  }
}

TEST_CASE("fixed-count bounds") {
  const auto pm = even_port_model(3, 2);
  CHECK_THROWS_AS(make_fixed_count_partitioning(pm, 3, 0), Error);
  CHECK_THROWS_AS(make_fixed_count_partitioning(pm, 3, 4), Error);
}

TEST_CASE("grouped partitioning follows the given groups") {
  const auto pm = even_port_model(4, 2);
  const Partitioning parts =
      make_grouped_partitioning(pm, 4, {{0, 2}, {1}, {3}});
  CHECK(parts.num_parts() == 3);
  CHECK(parts.part_of(0) == parts.part_of(4));
  CHECK(parts.part_of(0) != parts.part_of(2));
  CHECK(parts.part_of(2) != parts.part_of(6));
}

TEST_CASE("grouped partitioning rejects bad groupings") {
  const auto pm = even_port_model(3, 2);
  CHECK_THROWS_AS(make_grouped_partitioning(pm, 3, {{0, 1}}), Error);
  CHECK_THROWS_AS(make_grouped_partitioning(pm, 3, {{0, 1}, {1, 2}}), Error);
  CHECK_THROWS_AS(make_grouped_partitioning(pm, 3, {{0, 1}, {5}}), Error);
}

TEST_CASE("partition indices must stay in range") {
  CHECK_THROWS_AS(Partitioning({0, 3}, 3), Error);
  const Partitioning sparse({0, 2}, 3);  // empty middle partition is fine
  CHECK(sparse.num_parts() == 3);
  CHECK(sparse.members(1).empty());
}
