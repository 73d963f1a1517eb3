#pragma once

#include <optional>
#include <string>
#include <vector>

#include "driftmon/core.hpp"

namespace driftmon {

struct NormalizedValue {
    std::string canonical;
    std::vector<std::string> tokens;  // meaningful tokens, in order of appearance
    std::string head;                 // first identifier token, empty if none
};

struct MatchResult {
    bool matched = false;
    std::optional<MatchLevel> level;
    std::vector<std::string> shared_tokens;
};

// Type-aware canonicalization + tokenization. Throws EMPTY_VALUE on "".
NormalizedValue normalize(ContractType ct, const std::string& value);

// Role gate, type gate, then EXACT / TOK2 / TYPED1 in that order.
MatchResult match(const ContractRecord& c, const DriftEvent& d);

// True for types where bare version tokens carry signal (DEPENDENCY,
// CONTAINER_IMAGE, CI_ACTION, TOOL_AVAILABILITY).
bool version_bearing(ContractType ct);

}  // namespace driftmon
