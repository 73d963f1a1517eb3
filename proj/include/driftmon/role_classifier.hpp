#pragma once

#include <memory>
#include <vector>

#include "driftmon/config.hpp"
#include "driftmon/core.hpp"
#include "driftmon/mention_extractor.hpp"

namespace driftmon {

// Second pass over a document: role-bearing contracts from implicit
// assumptions. The default implementation extracts nothing; an LLM-backed one
// can be plugged in without touching the pipeline.
class SemanticExtractor {
  public:
    virtual ~SemanticExtractor() = default;
    virtual std::vector<ContractRecord> extract(const SkillDocument& doc) const = 0;
};

class NoopSemanticExtractor final : public SemanticExtractor {
  public:
    std::vector<ContractRecord> extract(const SkillDocument&) const override { return {}; }
};

ContractType contract_type_for(PatternFamily family);

Role assign_role(const SkillDocument& doc, const Mention& mention);
Role assign_role(const SkillDocument& doc, const Mention& mention,
                 const ClassifierSettings& settings);

// Merge mention-derived and semantic records, dedupe on (type, normalized
// value) with role promotion, sort by evidence position.
std::vector<ContractRecord> form_contracts(const SkillDocument& doc,
                                           const std::vector<Mention>& mentions,
                                           const std::vector<ContractRecord>& semantic,
                                           const ClassifierSettings& settings = {});

// extract_mentions + semantic pass + form_contracts in one call.
std::vector<ContractRecord> build_contracts(const SkillDocument& doc, ExtractMode mode,
                                            const SemanticExtractor& semantic,
                                            const ClassifierSettings& settings = {});

}  // namespace driftmon
