#include "driftmon/core.hpp"

#include <array>

namespace driftmon {

namespace {

template <typename E>
E parse_enum(const std::string& s, const std::vector<std::pair<E, const char*>>& table,
             const char* error_code, const char* what) {
    for (const auto& [v, name] : table) {
        if (s == name) return v;
    }
    throw Error(error_code, std::string(what) + " \"" + s + "\"");
}

template <typename E>
std::string enum_name(E v, const std::vector<std::pair<E, const char*>>& table) {
    for (const auto& [e, name] : table) {
        if (e == v) return name;
    }
    throw Error("INTERNAL", "unmapped enum value");
}

const std::vector<std::pair<ContextKind, const char*>>& context_table() {
    static const std::vector<std::pair<ContextKind, const char*>> t = {
        {ContextKind::CODE_FENCE, "CODE_FENCE"},   {ContextKind::INLINE_CODE, "INLINE_CODE"},
        {ContextKind::PROSE, "PROSE"},             {ContextKind::COMMENT, "COMMENT"},
        {ContextKind::BADGE_OR_IMAGE, "BADGE_OR_IMAGE"}, {ContextKind::LINK_LABEL, "LINK_LABEL"},
        {ContextKind::HEADING, "HEADING"},
    };
    return t;
}

const std::vector<std::pair<PatternFamily, const char*>>& family_table() {
    static const std::vector<std::pair<PatternFamily, const char*>> t = {
        {PatternFamily::URL, "URL"},
        {PatternFamily::VERSION_CONSTRAINT, "VERSION_CONSTRAINT"},
        {PatternFamily::IMPORT, "IMPORT"},
        {PatternFamily::API_PATH, "API_PATH"},
        {PatternFamily::AUTH_PATTERN, "AUTH_PATTERN"},
        {PatternFamily::DOCKER_IMAGE, "DOCKER_IMAGE"},
        {PatternFamily::GITHUB_ACTION, "GITHUB_ACTION"},
        {PatternFamily::ENV_VAR, "ENV_VAR"},
        {PatternFamily::CLOUD_REGION, "CLOUD_REGION"},
        {PatternFamily::CLI_FLAG, "CLI_FLAG"},
        {PatternFamily::CONFIG_FILENAME, "CONFIG_FILENAME"},
        {PatternFamily::NPM_AT_VERSION, "NPM_AT_VERSION"},
        {PatternFamily::GIT_BRANCH, "GIT_BRANCH"},
        {PatternFamily::DOCKER_IMAGE_TAGGED, "DOCKER_IMAGE_TAGGED"},
        {PatternFamily::BARE_SEMVER, "BARE_SEMVER"},
    };
    return t;
}

const std::vector<std::pair<ContractType, const char*>>& contract_type_table() {
    static const std::vector<std::pair<ContractType, const char*>> t = {
        {ContractType::DEPENDENCY, "DEPENDENCY"},
        {ContractType::SERVICE_URL, "SERVICE_URL"},
        {ContractType::API_ENDPOINT, "API_ENDPOINT"},
        {ContractType::CONFIGURATION, "CONFIGURATION"},
        {ContractType::SCHEMA_FIELD, "SCHEMA_FIELD"},
        {ContractType::AUTHENTICATION, "AUTHENTICATION"},
        {ContractType::ENV_VARIABLE, "ENV_VARIABLE"},
        {ContractType::CONTAINER_IMAGE, "CONTAINER_IMAGE"},
        {ContractType::CI_ACTION, "CI_ACTION"},
        {ContractType::CLOUD_RESOURCE, "CLOUD_RESOURCE"},
        {ContractType::CLI_INTERFACE, "CLI_INTERFACE"},
        {ContractType::TOOL_AVAILABILITY, "TOOL_AVAILABILITY"},
    };
    return t;
}

const std::vector<std::pair<Role, const char*>>& role_table() {
    static const std::vector<std::pair<Role, const char*>> t = {
        {Role::OPERATIONAL, "OPERATIONAL"},
        {Role::INCIDENTAL, "INCIDENTAL"},
    };
    return t;
}

const std::vector<std::pair<ContractOrigin, const char*>>& origin_table() {
    static const std::vector<std::pair<ContractOrigin, const char*>> t = {
        {ContractOrigin::REGEX, "REGEX"},
        {ContractOrigin::SEMANTIC, "SEMANTIC"},
        {ContractOrigin::MERGED, "MERGED"},
    };
    return t;
}

const std::vector<std::pair<DriftType, const char*>>& drift_type_table() {
    static const std::vector<std::pair<DriftType, const char*>> t = {
        {DriftType::URL_CHANGE, "URL_CHANGE"},
        {DriftType::VERSION_BUMP, "VERSION_BUMP"},
        {DriftType::CONFIG_CHANGE, "CONFIG_CHANGE"},
        {DriftType::API_MIGRATION, "API_MIGRATION"},
        {DriftType::DEPRECATION, "DEPRECATION"},
        {DriftType::SCHEMA_CHANGE, "SCHEMA_CHANGE"},
        {DriftType::AUTH_CHANGE, "AUTH_CHANGE"},
        {DriftType::DEPENDENCY_UPDATE, "DEPENDENCY_UPDATE"},
    };
    return t;
}

const std::vector<std::pair<EvidenceKind, const char*>>& evidence_kind_table() {
    static const std::vector<std::pair<EvidenceKind, const char*>> t = {
        {EvidenceKind::KNOWN_DRIFT, "KNOWN_DRIFT"},
        {EvidenceKind::LIVE_URL, "LIVE_URL"},
        {EvidenceKind::LIVE_REGISTRY, "LIVE_REGISTRY"},
    };
    return t;
}

const std::vector<std::pair<MatchLevel, const char*>>& match_level_table() {
    static const std::vector<std::pair<MatchLevel, const char*>> t = {
        {MatchLevel::EXACT, "EXACT"},
        {MatchLevel::TOK2, "TOK2"},
        {MatchLevel::TYPED1, "TYPED1"},
        {MatchLevel::LIVE_HARD, "LIVE_HARD"},
    };
    return t;
}

const std::vector<std::pair<RegistryVerdict, const char*>>& verdict_table() {
    static const std::vector<std::pair<RegistryVerdict, const char*>> t = {
        {RegistryVerdict::NOT_FOUND, "NOT_FOUND"},
        {RegistryVerdict::VERSION_ABSENT, "VERSION_ABSENT"},
        {RegistryVerdict::YANKED_OR_DEPRECATED, "YANKED_OR_DEPRECATED"},
        {RegistryVerdict::OK, "OK"},
    };
    return t;
}

const std::vector<std::pair<LiveEvidence::Kind, const char*>>& live_kind_table() {
    static const std::vector<std::pair<LiveEvidence::Kind, const char*>> t = {
        {LiveEvidence::Kind::URL_STATUS, "URL_STATUS"},
        {LiveEvidence::Kind::REGISTRY_LOOKUP, "REGISTRY_LOOKUP"},
    };
    return t;
}

const std::vector<std::pair<Split, const char*>>& split_table() {
    static const std::vector<std::pair<Split, const char*>> t = {
        {Split::CONTROLLED_DRIFT, "CONTROLLED_DRIFT"},
        {Split::REAL_WORLD_DRIFT, "REAL_WORLD_DRIFT"},
        {Split::IDENTITY, "IDENTITY"},
        {Split::FORMATTING_NEG, "FORMATTING_NEG"},
        {Split::SEMANTIC_NEG, "SEMANTIC_NEG"},
    };
    return t;
}

const Json& require_field(const Json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) {
        throw Error("MISSING_FIELD", field);
    }
    return *it;
}

std::string require_string(const Json& j, const char* field) {
    const Json& v = require_field(j, field);
    if (!v.is_string()) throw Error("MISSING_FIELD", std::string(field) + " must be a string");
    return v.get<std::string>();
}

}  // namespace

std::string to_string(ContextKind v) { return enum_name(v, context_table()); }
std::string to_string(PatternFamily v) { return enum_name(v, family_table()); }
std::string to_string(ContractType v) { return enum_name(v, contract_type_table()); }
std::string to_string(Role v) { return enum_name(v, role_table()); }
std::string to_string(ContractOrigin v) { return enum_name(v, origin_table()); }
std::string to_string(DriftType v) { return enum_name(v, drift_type_table()); }
std::string to_string(EvidenceKind v) { return enum_name(v, evidence_kind_table()); }
std::string to_string(MatchLevel v) { return enum_name(v, match_level_table()); }
std::string to_string(RegistryVerdict v) { return enum_name(v, verdict_table()); }
std::string to_string(LiveEvidence::Kind v) { return enum_name(v, live_kind_table()); }
std::string to_string(Split v) { return enum_name(v, split_table()); }

ContextKind context_kind_from_string(const std::string& s) {
    return parse_enum(s, context_table(), "UNKNOWN_CONTEXT_KIND", "unknown context kind");
}
PatternFamily pattern_family_from_string(const std::string& s) {
    return parse_enum(s, family_table(), "UNKNOWN_PATTERN_FAMILY", "unknown pattern family");
}
ContractType contract_type_from_string(const std::string& s) {
    return parse_enum(s, contract_type_table(), "UNKNOWN_CONTRACT_TYPE", "unknown contract type");
}
Role role_from_string(const std::string& s) {
    return parse_enum(s, role_table(), "UNKNOWN_ROLE", "unknown role");
}
ContractOrigin contract_origin_from_string(const std::string& s) {
    return parse_enum(s, origin_table(), "UNKNOWN_ORIGIN", "unknown contract origin");
}
DriftType drift_type_from_string(const std::string& s) {
    return parse_enum(s, drift_type_table(), "UNKNOWN_DRIFT_TYPE", "unknown drift type");
}
EvidenceKind evidence_kind_from_string(const std::string& s) {
    return parse_enum(s, evidence_kind_table(), "UNKNOWN_EVIDENCE_KIND", "unknown evidence kind");
}
MatchLevel match_level_from_string(const std::string& s) {
    return parse_enum(s, match_level_table(), "UNKNOWN_MATCH_LEVEL", "unknown match level");
}
RegistryVerdict registry_verdict_from_string(const std::string& s) {
    return parse_enum(s, verdict_table(), "UNKNOWN_REGISTRY_VERDICT", "unknown registry verdict");
}
Split split_from_string(const std::string& s) {
    return parse_enum(s, split_table(), "UNKNOWN_SPLIT", "unknown split");
}

bool compatible(ContractType ct, DriftType dt) {
    using C = ContractType;
    using D = DriftType;
    switch (ct) {
        case C::DEPENDENCY:
            return dt == D::VERSION_BUMP || dt == D::DEPENDENCY_UPDATE || dt == D::DEPRECATION;
        case C::SERVICE_URL:
            return dt == D::URL_CHANGE || dt == D::DEPRECATION;
        case C::API_ENDPOINT:
            return dt == D::URL_CHANGE || dt == D::API_MIGRATION || dt == D::DEPRECATION ||
                   dt == D::SCHEMA_CHANGE;
        case C::CONFIGURATION:
            return dt == D::CONFIG_CHANGE || dt == D::DEPRECATION;
        case C::SCHEMA_FIELD:
            return dt == D::SCHEMA_CHANGE || dt == D::API_MIGRATION;
        case C::AUTHENTICATION:
            return dt == D::AUTH_CHANGE || dt == D::API_MIGRATION;
        case C::ENV_VARIABLE:
            return dt == D::CONFIG_CHANGE || dt == D::AUTH_CHANGE;
        case C::CONTAINER_IMAGE:
            return dt == D::VERSION_BUMP || dt == D::DEPENDENCY_UPDATE || dt == D::DEPRECATION;
        case C::CI_ACTION:
            return dt == D::VERSION_BUMP || dt == D::DEPENDENCY_UPDATE || dt == D::DEPRECATION;
        case C::CLOUD_RESOURCE:
            return dt == D::CONFIG_CHANGE || dt == D::URL_CHANGE;
        case C::CLI_INTERFACE:
            return dt == D::DEPRECATION || dt == D::API_MIGRATION || dt == D::CONFIG_CHANGE;
        case C::TOOL_AVAILABILITY:
            return dt == D::DEPRECATION || dt == D::VERSION_BUMP;
    }
    return false;
}

Violation make_known_violation(const ContractRecord& contract, const DriftEvent& drift,
                               MatchLevel level, std::string explanation) {
    if (contract.role != Role::OPERATIONAL) {
        throw Error("INCIDENTAL_VIOLATION", "violation references contract " + contract.id +
                                                " with role INCIDENTAL");
    }
    Violation v;
    v.contract_id = contract.id;
    v.evidence_kind = EvidenceKind::KNOWN_DRIFT;
    v.drift = drift;
    v.match_level = level;
    v.explanation = std::move(explanation);
    return v;
}

Violation make_live_violation(const ContractRecord& contract, const LiveEvidence& evidence,
                              std::string explanation) {
    if (contract.role != Role::OPERATIONAL) {
        throw Error("INCIDENTAL_VIOLATION", "violation references contract " + contract.id +
                                                " with role INCIDENTAL");
    }
    Violation v;
    v.contract_id = contract.id;
    v.evidence_kind = evidence.kind == LiveEvidence::Kind::URL_STATUS ? EvidenceKind::LIVE_URL
                                                                      : EvidenceKind::LIVE_REGISTRY;
    v.live_evidence = evidence;
    v.match_level = MatchLevel::LIVE_HARD;
    v.explanation = std::move(explanation);
    return v;
}

Json to_json(const Span& v) {
    Json j;
    j["start"] = v.start;
    j["end"] = v.end;
    return j;
}

Json to_json(const Mention& v) {
    Json j;
    j["family"] = to_string(v.family);
    j["raw"] = v.raw;
    j["value"] = v.value;
    j["span"] = to_json(v.span);
    j["line"] = v.line;
    j["context"] = to_string(v.context);
    return j;
}

Json to_json(const ContractRecord& v) {
    Json j;
    j["id"] = v.id;
    j["contract_type"] = to_string(v.contract_type);
    j["role"] = to_string(v.role);
    j["value"] = v.value;
    j["evidence"] = Json{{"start", v.evidence.span.start},
                         {"end", v.evidence.span.end},
                         {"text", v.evidence.text}};
    j["origin"] = to_string(v.origin);
    j["skill_id"] = v.skill_id;
    return j;
}

Json to_json(const DriftEvent& v) {
    Json j;
    j["drift_type"] = to_string(v.drift_type);
    j["old_value"] = v.old_value;
    if (v.new_value) j["new_value"] = *v.new_value;
    j["source"] = v.source;
    if (v.observed_at) j["observed_at"] = *v.observed_at;
    return j;
}

Json to_json(const LiveEvidence& v) {
    Json j;
    j["kind"] = to_string(v.kind);
    j["target"] = v.target;
    if (v.kind == LiveEvidence::Kind::URL_STATUS) {
        j["http_status"] = v.http_status;
    } else {
        j["verdict"] = to_string(v.verdict);
    }
    if (v.redirect_location) j["redirect_location"] = *v.redirect_location;
    j["fetched_at"] = v.fetched_at;
    j["from_cache"] = v.from_cache;
    return j;
}

Json to_json(const Violation& v) {
    Json j;
    j["contract_id"] = v.contract_id;
    j["evidence_kind"] = to_string(v.evidence_kind);
    if (v.drift) j["drift"] = to_json(*v.drift);
    if (v.live_evidence) j["live_evidence"] = to_json(*v.live_evidence);
    j["match_level"] = to_string(v.match_level);
    j["explanation"] = v.explanation;
    return j;
}

Json to_json(const SkillDocument& v) {
    Json j;
    j["id"] = v.id;
    j["source_path"] = v.source_path;
    j["text"] = v.text;
    if (!v.metadata.empty()) {
        Json m = Json::object();
        for (const auto& [k, val] : v.metadata) m[k] = val;
        j["metadata"] = m;
    }
    return j;
}

Json to_json(const BenchCase& v) {
    Json j;
    j["case_id"] = v.case_id;
    j["split"] = to_string(v.split);
    j["skill"] = to_json(v.skill);
    Json events = Json::array();
    for (const auto& e : v.drift_events) events.push_back(to_json(e));
    j["drift_events"] = events;
    j["label"] = v.label;
    if (v.drift_type) j["drift_type"] = to_string(*v.drift_type);
    return j;
}

DriftEvent drift_event_from_json(const Json& j) {
    if (!j.is_object()) throw Error("MALFORMED_JSON", "drift event must be an object");
    DriftEvent e;
    e.drift_type = drift_type_from_string(require_string(j, "drift_type"));
    e.old_value = require_string(j, "old_value");
    if (e.old_value.empty()) throw Error("MISSING_FIELD", "old_value must be non-empty");
    if (j.contains("new_value") && !j["new_value"].is_null()) {
        if (!j["new_value"].is_string()) throw Error("MISSING_FIELD", "new_value must be a string");
        e.new_value = j["new_value"].get<std::string>();
    }
    e.source = require_string(j, "source");
    if (e.source.empty()) throw Error("MISSING_FIELD", "source must be non-empty");
    if (j.contains("observed_at") && !j["observed_at"].is_null()) {
        e.observed_at = j["observed_at"].get<std::string>();
    }
    return e;
}

ContractRecord contract_record_from_json(const Json& j) {
    if (!j.is_object()) throw Error("MALFORMED_JSON", "contract record must be an object");
    ContractRecord c;
    c.id = require_string(j, "id");
    c.contract_type = contract_type_from_string(require_string(j, "contract_type"));
    c.role = role_from_string(require_string(j, "role"));
    c.value = require_string(j, "value");
    if (c.value.empty()) throw Error("MISSING_FIELD", "value must be non-empty");
    const Json& ev = require_field(j, "evidence");
    c.evidence.span.start = require_field(ev, "start").get<std::size_t>();
    c.evidence.span.end = require_field(ev, "end").get<std::size_t>();
    c.evidence.text = require_string(ev, "text");
    c.origin = contract_origin_from_string(require_string(j, "origin"));
    c.skill_id = require_string(j, "skill_id");
    return c;
}

SkillDocument skill_document_from_json(const Json& j) {
    if (!j.is_object()) throw Error("MALFORMED_JSON", "skill document must be an object");
    SkillDocument d;
    d.id = require_string(j, "id");
    if (d.id.empty()) throw Error("MISSING_FIELD", "id must be non-empty");
    if (j.contains("source_path") && j["source_path"].is_string()) {
        d.source_path = j["source_path"].get<std::string>();
    }
    if (j.contains("text") && j["text"].is_string()) {
        d.text = j["text"].get<std::string>();
    }
    if (j.contains("metadata") && j["metadata"].is_object()) {
        for (auto it = j["metadata"].begin(); it != j["metadata"].end(); ++it) {
            d.metadata[it.key()] = it.value().get<std::string>();
        }
    }
    return d;
}

std::vector<DriftEvent> parse_drift_events(const std::string& json_text) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error("MALFORMED_JSON", e.what());
    }
    if (!j.is_array()) throw Error("MALFORMED_JSON", "drifts file must be a JSON array");
    std::vector<DriftEvent> events;
    events.reserve(j.size());
    for (const auto& item : j) {
        events.push_back(drift_event_from_json(item));
    }
    return events;
}

std::string serialize_contracts(const std::vector<ContractRecord>& contracts) {
    Json arr = Json::array();
    for (const auto& c : contracts) arr.push_back(to_json(c));
    return arr.dump(2);
}

std::vector<ContractRecord> parse_contracts(const std::string& json_text) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error("MALFORMED_JSON", e.what());
    }
    if (!j.is_array()) throw Error("MALFORMED_JSON", "contracts file must be a JSON array");
    std::vector<ContractRecord> out;
    out.reserve(j.size());
    for (const auto& item : j) out.push_back(contract_record_from_json(item));
    return out;
}

}  // namespace driftmon
