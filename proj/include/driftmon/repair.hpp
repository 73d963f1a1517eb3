#pragma once

#include <optional>
#include <string>
#include <vector>

#include "driftmon/core.hpp"

namespace driftmon {

struct RepairItem {
    ContractRecord contract;
    Evidence evidence;
    std::string old_value;
    std::optional<std::string> new_value;
    std::string category_instructions;
};

struct RepairSpec {
    std::string skill_text;
    std::vector<RepairItem> items;
    std::vector<double> generation_temperatures = {0.0, 0.2};
};

class RepairGenerator {
  public:
    virtual ~RepairGenerator() = default;
    virtual std::string generate(const RepairSpec& spec, double temperature) const = 0;
};

// Default generator: global old_value -> new_value substitution, all
// occurrences, for every item that carries a new value. Temperature is
// accepted for interface parity and ignored.
class SubstitutionRepairGenerator final : public RepairGenerator {
  public:
    std::string generate(const RepairSpec& spec, double temperature) const override;
};

enum class VerifierKind { LITERAL, TYPE_AWARE };

struct DriftCheck {
    DriftEvent drift;
    bool new_present = false;
    bool old_absent = false;
};

struct VerifierResult {
    bool passed = false;
    std::vector<DriftCheck> per_drift;
    VerifierKind verifier = VerifierKind::LITERAL;
};

// One item per violation; instructions keyed on drift type. Contracts are the
// skill's extracted records, used to resolve violation contract ids.
RepairSpec build_repair_spec(const SkillDocument& skill, const std::vector<Violation>& violations,
                             const std::vector<ContractRecord>& contracts);

// Byte-level containment: each drift's new value present (vacuous when
// absent), old value gone.
VerifierResult verify_literal(const std::string& repaired, const std::vector<DriftEvent>& drifts);

// Same, except VERSION_BUMP / DEPENDENCY_UPDATE new values also accept any
// constraint on the same package whose satisfied set contains the new version.
VerifierResult verify_type_aware(const std::string& repaired,
                                 const std::vector<DriftEvent>& drifts);

enum class RepairStatus { REPAIRED, FAILED };

struct RepairOutcome {
    RepairStatus outcome = RepairStatus::FAILED;
    std::optional<std::string> final_text;
    int attempts = 0;
    std::vector<std::string> attempt_errors;
};

RepairOutcome run_repair_loop(const SkillDocument& skill, const std::vector<Violation>& violations,
                              const std::vector<ContractRecord>& contracts,
                              const RepairGenerator& gen, VerifierKind verifier);

const std::string& category_instruction(DriftType dt);

Json to_json(const VerifierResult& r);

}  // namespace driftmon
