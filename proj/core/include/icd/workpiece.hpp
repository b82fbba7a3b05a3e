// Bundled workpiece-sorting demonstration: twelve controller/ejector
// station pairs on a conveyor, chained by a token ring. Controllers
// run their ejectors through idle -> push -> pull -> idle; a full bin
// makes an ejector couple Push to EjStart (rejected while its
// controller is mid-push) and makes a controller pass the token
// through, which closes the ring once all twelve try it.
#pragma once

#include <vector>

#include "icd/model.hpp"
#include "icd/scenario.hpp"

namespace icd {

CompositeModel build_workpiece_model();

// Bundled schedule: 36 normal mode switches, a bin-full rejection
// with its safe-mode fallback, and the token-ring closure with a
// delete-only fallback.
std::vector<ScheduleEntry> workpiece_schedule();

// Expected verdict per schedule entry.
std::vector<bool> workpiece_expected_verdicts();

}  // namespace icd
