#pragma once

#include <vector>

#include "driftmon/core.hpp"

namespace driftmon {

// Known-drift mode: every operational contract against every event, role
// filter first. Output ordered by contract evidence position, then event
// input order.
std::vector<Violation> validate_known(const std::vector<ContractRecord>& contracts,
                                      const std::vector<DriftEvent>& drifts);

// Skill-level aggregation: flagged iff at least one violation.
bool flag_skill(const std::vector<Violation>& violations);

}  // namespace driftmon
