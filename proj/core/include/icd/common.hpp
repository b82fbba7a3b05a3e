// Shared basic types for the instantaneous-cycle-detection library.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace icd {

// Dense vertex index of a port in the composite graph.
using PortId = std::uint32_t;

constexpr PortId kNoPort = 0xffffffffu;

// Exact path counts grow past any fixed width on dense graphs.
using BigCount = boost::multiprecision::cpp_int;

inline constexpr char kVersion[] = "0.1.0";

// Base class for all domain errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unloadable composite model.
class ModelError : public Error {
 public:
  using Error::Error;
};

// Edge operation that violates its precondition (duplicate insert,
// delete of an absent edge, signal edge touched, ...). `op_index` is
// the offending position within the submitted batch, or -1.
class EdgeOpError : public Error {
 public:
  EdgeOpError(const std::string& what, long index)
      : Error(what), op_index(index) {}
  long op_index = -1;
};

// Mode-change request rejected at validation, before any search runs.
class McrError : public Error {
 public:
  using Error::Error;
};

// Workload/scenario configuration that cannot be satisfied.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

// Abstract work-unit meter. Deterministic runs report stalls and
// maintenance progress in these units instead of wallclock time:
// one unit per edge scanned or vertex visited in a DFS, per
// multiply-accumulate in a closure sweep, per word operation in a
// reduction rebuild.
class WorkCounter {
 public:
  void charge(std::uint64_t units) { units_ += units; }
  std::uint64_t units() const { return units_; }
  void reset() { units_ = 0; }

 private:
  std::uint64_t units_ = 0;
};

}  // namespace icd
