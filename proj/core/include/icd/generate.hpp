// Random composite models for benchmarks.
//
// Ports are split evenly into inputs and outputs and dealt out to
// `models` components. A hidden random topological order fixes edge
// directions: every (input, output) pair is a candidate for exactly
// one edge, pointing forward in that order, and each candidate is
// kept with probability target_edges / candidates. Forward
// input->output candidates become dependency edges in the source
// model's "base" mode; forward output->input candidates become
// signal wires. The result is acyclic by construction and carries
// the "relaxed" structure marker (signals may fan in, dependencies
// may target other models' outputs).
//
// Every model also gets thinned-out "alt1"/"alt2" modes and an empty
// "safe" mode.
#pragma once

#include <cstdint>

#include "icd/model.hpp"

namespace icd {

struct GeneratorParams {
  std::size_t ports = 0;   // total port count, divisible by 2 * models
  std::size_t models = 1;  // component count
  std::uint64_t target_edges = 0;  // expected number of edges
  std::uint64_t seed = 0;
};

CompositeModel generate_random_dag(const GeneratorParams& p);

}  // namespace icd
