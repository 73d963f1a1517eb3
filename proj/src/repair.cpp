#include "driftmon/repair.hpp"

#include <algorithm>
#include <cctype>
#include <iostream>
#include <map>

#include "driftmon/version_constraint.hpp"

namespace driftmon {

namespace {

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
    if (from.empty()) return text;
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

bool contains(const std::string& hay, const std::string& needle) {
    return !needle.empty() && hay.find(needle) != std::string::npos;
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

// All constraint expressions over `name` appearing in text, e.g.
// "requests>=2.31,<3" or "left-pad@^1.3.0".
std::vector<ConstraintExpr> constraints_on(const std::string& text, const std::string& name) {
    std::vector<ConstraintExpr> found;
    if (name.empty()) return found;
    std::size_t pos = 0;
    while ((pos = text.find(name, pos)) != std::string::npos) {
        std::size_t start = pos;
        pos += name.size();
        if (start > 0 && (ident_char(text[start - 1]) || text[start - 1] == '@' ||
                          text[start - 1] == '/')) {
            continue;
        }
        // Greedily take the operator/version tail: ops, version chars, commas,
        // spaces between clauses or around an op.
        std::size_t i = start + name.size();
        std::size_t end = i;
        bool saw_op = false;
        bool in_version = false;
        auto op_char = [](char c) { return std::string("=<>!~^@").find(c) != std::string::npos; };
        auto ver_char = [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '*' ||
                   c == '+' || c == '-';
        };
        while (end < text.size()) {
            char c = text[end];
            if (op_char(c)) {
                saw_op = true;
                in_version = false;
                ++end;
            } else if (ver_char(c)) {
                if (!saw_op) break;
                in_version = true;
                ++end;
            } else if (c == ',' || c == ' ') {
                std::size_t probe = end;
                while (probe < text.size() && (text[probe] == ',' || text[probe] == ' ')) ++probe;
                if (probe < text.size() && op_char(text[probe])) {
                    end = probe;  // next clause
                } else if (probe < text.size() && saw_op && !in_version && c == ' ' &&
                           ver_char(text[probe])) {
                    end = probe;  // space between op and version
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        if (!saw_op || end == i) continue;
        auto expr = parse_constraint(text.substr(start, end - start));
        if (expr && expr->name == name) found.push_back(*expr);
    }
    return found;
}

}  // namespace

const std::string& category_instruction(DriftType dt) {
    static const std::map<DriftType, std::string> table = {
        {DriftType::URL_CHANGE,
         "point the reference at the new URL and remove the stale host or path"},
        {DriftType::VERSION_BUMP,
         "replace the pinned version with the new release everywhere it appears"},
        {DriftType::CONFIG_CHANGE,
         "replace the configuration value and keep surrounding examples consistent"},
        {DriftType::API_MIGRATION,
         "migrate the call to the new endpoint shape and adjust parameters and examples"},
        {DriftType::DEPRECATION, "remove or replace the deprecated reference"},
        {DriftType::SCHEMA_CHANGE,
         "update field names and response-shape assumptions to the new schema"},
        {DriftType::AUTH_CHANGE,
         "update the authentication flow, headers, and credential references"},
        {DriftType::DEPENDENCY_UPDATE,
         "update the pinned constraint and cascade any import or lockfile references"},
    };
    return table.at(dt);
}

RepairSpec build_repair_spec(const SkillDocument& skill, const std::vector<Violation>& violations,
                             const std::vector<ContractRecord>& contracts) {
    if (violations.empty()) throw Error("EMPTY_VIOLATIONS", "nothing to repair");

    std::map<std::string, const ContractRecord*> by_id;
    for (const auto& c : contracts) by_id[c.id] = &c;

    RepairSpec spec;
    spec.skill_text = skill.text;
    for (const auto& v : violations) {
        auto it = by_id.find(v.contract_id);
        if (it == by_id.end()) {
            throw Error("CONTRACT_NOT_FOUND",
                        "violation references unknown contract " + v.contract_id);
        }
        RepairItem item;
        item.contract = *it->second;
        item.evidence = it->second->evidence;
        if (v.drift) {
            item.old_value = v.drift->old_value;
            item.new_value = v.drift->new_value;
            item.category_instructions = category_instruction(v.drift->drift_type);
        } else {
            // Live evidence has no old/new pair; the contract's own value is
            // what needs replacing.
            item.old_value = it->second->value;
            item.category_instructions =
                "verify the reference against its live source and update or remove it";
        }
        spec.items.push_back(std::move(item));
    }
    return spec;
}

std::string SubstitutionRepairGenerator::generate(const RepairSpec& spec,
                                                  double temperature) const {
    (void)temperature;
    std::string text = spec.skill_text;
    for (const auto& item : spec.items) {
        if (item.new_value && !item.old_value.empty()) {
            text = replace_all(text, item.old_value, *item.new_value);
        }
    }
    return text;
}

VerifierResult verify_literal(const std::string& repaired, const std::vector<DriftEvent>& drifts) {
    VerifierResult r;
    r.verifier = VerifierKind::LITERAL;
    r.passed = true;
    for (const auto& d : drifts) {
        DriftCheck check;
        check.drift = d;
        check.new_present = !d.new_value || contains(repaired, *d.new_value);
        check.old_absent = !contains(repaired, d.old_value);
        r.passed = r.passed && check.new_present && check.old_absent;
        r.per_drift.push_back(std::move(check));
    }
    return r;
}

VerifierResult verify_type_aware(const std::string& repaired,
                                 const std::vector<DriftEvent>& drifts) {
    VerifierResult r = verify_literal(repaired, drifts);
    r.verifier = VerifierKind::TYPE_AWARE;
    for (auto& check : r.per_drift) {
        const DriftEvent& d = check.drift;
        if (check.new_present) continue;
        if (d.drift_type != DriftType::VERSION_BUMP &&
            d.drift_type != DriftType::DEPENDENCY_UPDATE)
            continue;
        if (!d.new_value) continue;
        auto want = parse_constraint(*d.new_value);
        if (!want || want->clauses.empty()) {
            std::cerr << "driftmon: UNPARSEABLE_CONSTRAINT for '" << *d.new_value
                      << "', keeping literal verdict\n";
            continue;
        }
        const std::string& new_version = want->clauses.front().version;
        for (const auto& expr : constraints_on(repaired, want->name)) {
            if (satisfies(new_version, expr)) {
                check.new_present = true;
                break;
            }
        }
    }
    r.passed = std::all_of(r.per_drift.begin(), r.per_drift.end(), [](const DriftCheck& c) {
        return c.new_present && c.old_absent;
    });
    return r;
}

RepairOutcome run_repair_loop(const SkillDocument& skill, const std::vector<Violation>& violations,
                              const std::vector<ContractRecord>& contracts,
                              const RepairGenerator& gen, VerifierKind verifier) {
    RepairSpec spec = build_repair_spec(skill, violations, contracts);

    std::vector<DriftEvent> drifts;
    for (const auto& v : violations) {
        if (!v.drift) continue;
        if (std::find(drifts.begin(), drifts.end(), *v.drift) == drifts.end()) {
            drifts.push_back(*v.drift);
        }
    }

    RepairOutcome out;
    for (double temp : spec.generation_temperatures) {
        ++out.attempts;
        std::string candidate;
        try {
            candidate = gen.generate(spec, temp);
        } catch (const std::exception& e) {
            out.attempt_errors.push_back(e.what());
            continue;
        }
        VerifierResult vr = verifier == VerifierKind::LITERAL
                                ? verify_literal(candidate, drifts)
                                : verify_type_aware(candidate, drifts);
        if (vr.passed) {
            out.outcome = RepairStatus::REPAIRED;
            out.final_text = std::move(candidate);
            return out;
        }
    }
    out.outcome = RepairStatus::FAILED;
    return out;
}

Json to_json(const VerifierResult& r) {
    Json j;
    j["verifier"] = r.verifier == VerifierKind::LITERAL ? "LITERAL" : "TYPE_AWARE";
    j["passed"] = r.passed;
    j["per_drift"] = Json::array();
    for (const auto& c : r.per_drift) {
        Json entry;
        entry["drift"] = to_json(c.drift);
        entry["new_present"] = c.new_present;
        entry["old_absent"] = c.old_absent;
        j["per_drift"].push_back(entry);
    }
    return j;
}

}  // namespace driftmon
