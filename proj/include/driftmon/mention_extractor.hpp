#pragma once

#include <string>
#include <vector>

#include "driftmon/core.hpp"

namespace driftmon {

enum class ExtractMode { BASE7, FULL15 };

// Scan a skill document for environmental mentions. Mentions come back sorted
// by start byte; overlapping hits from different families are all kept.
std::vector<Mention> extract_mentions(const SkillDocument& doc, ExtractMode mode);

// Innermost markdown context for a byte range. Throws SPAN_OUT_OF_RANGE.
ContextKind classify_context(const SkillDocument& doc, const Span& span);

}  // namespace driftmon
