#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "driftmon/config.hpp"
#include "driftmon/core.hpp"
#include "driftmon/mention_extractor.hpp"
#include "driftmon/stats.hpp"

namespace driftmon {

struct SplitCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;
};

struct Metrics {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;
    // 0/0 reads as 1.0 for precision and recall (an abstaining monitor raises
    // no false alerts), 0.0 for fpr.
    double precision = 1.0;
    double recall = 1.0;
    double fpr = 0.0;
    stats::Interval precision_ci;
    stats::Interval recall_ci;
    stats::Interval fpr_ci;
    std::map<std::string, SplitCounts> per_split;
    std::map<std::string, SplitCounts> per_drift_type;
};

struct CaseResult {
    std::string case_id;
    Split split = Split::IDENTITY;
    bool label = false;
    bool predicted = false;
    std::size_t violation_count = 0;
    std::optional<DriftType> drift_type;
    std::string error;  // non-empty when the pipeline raised; counted as negative
};

struct PipelineConfig {
    ExtractMode mode = ExtractMode::FULL15;
    ClassifierSettings classifier;
    std::uint32_t bootstrap_resamples = 1000;
    double confidence = 0.95;
    std::uint64_t seed = 0;
};

// corpus.json: array of cases; skill either inline (text) or {"path": ...}
// relative to the corpus file. Schema errors carry the case_id.
std::vector<BenchCase> load_corpus(const std::string& path);

// Full pipeline per case, aggregation sorted by case_id. Optional per-case log.
Metrics run_detection(const std::vector<BenchCase>& cases, const PipelineConfig& config,
                      std::vector<CaseResult>* log = nullptr);

// Summary recomputed from a per-case log; run_detection routes through this,
// so the two always agree.
Metrics metrics_from_results(std::vector<CaseResult> results, const PipelineConfig& config);

// Seeded surface edits (section reorder, heading normalization, list-marker
// swap, whitespace cleanup, fence-language toggle); mention multiset is
// verified unchanged. Errors: TOO_FEW_SECTIONS, MENTION_MISMATCH.
BenchCase gen_formatting_negative(const SkillDocument& skill, std::uint64_t seed);

// One of: bump an incidental-only version, alias an incidental URL, append a
// commentary sentence citing a different version. The case carries a tempting
// DriftEvent and label=false. Errors: NO_ELIGIBLE_MENTION.
BenchCase gen_semantic_negative(const SkillDocument& skill, std::uint64_t seed);

// Purely syntactic: pair mentions across two documents by (family, head
// token), emit an event per changed value.
std::vector<DriftEvent> derive_events_from_diff(const SkillDocument& old_doc,
                                                const SkillDocument& new_doc);

Json to_json(const Metrics& m);
Json to_json(const stats::Interval& iv);
Json to_json(const CaseResult& r);

}  // namespace driftmon
