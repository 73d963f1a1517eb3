#include "driftmon/drift_validator.hpp"

#include <algorithm>

#include "driftmon/matcher.hpp"

namespace driftmon {

std::vector<Violation> validate_known(const std::vector<ContractRecord>& contracts,
                                      const std::vector<DriftEvent>& drifts) {
    std::vector<std::size_t> order(contracts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return contracts[a].evidence.span.start < contracts[b].evidence.span.start;
    });

    std::vector<Violation> out;
    for (std::size_t idx : order) {
        const ContractRecord& c = contracts[idx];
        if (c.role != Role::OPERATIONAL) continue;
        for (const DriftEvent& d : drifts) {
            MatchResult r = match(c, d);
            if (!r.matched) continue;
            std::string why = "contract '" + c.value + "' matches drift old value '" +
                              d.old_value + "' at level " + to_string(*r.level);
            out.push_back(make_known_violation(c, d, *r.level, why));
        }
    }
    return out;
}

bool flag_skill(const std::vector<Violation>& violations) { return !violations.empty(); }

}  // namespace driftmon
