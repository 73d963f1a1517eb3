// core.hpp — domain types, type vocabularies, compatibility relation, JSON schemas.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace driftmon {

// Deterministic field order in every serialized schema.
using Json = nlohmann::ordered_json;

// Error with a stable machine-readable code ("MALFORMED_JSON", "UNKNOWN_DRIFT_TYPE", ...).
// what() carries the bare message; callers that want the code prepend it.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

// Half-open byte range into SkillDocument::text.
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    bool operator==(const Span&) const = default;
};

struct SkillDocument {
    std::string id;
    std::string source_path;
    std::string text;
    std::map<std::string, std::string> metadata;
};

enum class ContextKind {
    CODE_FENCE,
    INLINE_CODE,
    PROSE,
    COMMENT,
    BADGE_OR_IMAGE,
    LINK_LABEL,
    HEADING,
};

// The 15 deterministic extraction families. The first seven form the base-7 set.
enum class PatternFamily {
    URL,
    VERSION_CONSTRAINT,
    IMPORT,
    API_PATH,
    AUTH_PATTERN,
    DOCKER_IMAGE,
    GITHUB_ACTION,
    ENV_VAR,
    CLOUD_REGION,
    CLI_FLAG,
    CONFIG_FILENAME,
    NPM_AT_VERSION,
    GIT_BRANCH,
    DOCKER_IMAGE_TAGGED,
    BARE_SEMVER,
};

inline constexpr std::size_t kPatternFamilyCount = 15;
inline constexpr std::size_t kBaseFamilyCount = 7;

struct Mention {
    PatternFamily family = PatternFamily::URL;
    std::string raw;     // exact matched substring, == text[span]
    std::string value;   // extracted payload
    Span span;
    std::size_t line = 1;
    ContextKind context = ContextKind::PROSE;
};

enum class ContractType {
    DEPENDENCY,
    SERVICE_URL,
    API_ENDPOINT,
    CONFIGURATION,
    SCHEMA_FIELD,
    AUTHENTICATION,
    ENV_VARIABLE,
    CONTAINER_IMAGE,
    CI_ACTION,
    CLOUD_RESOURCE,
    CLI_INTERFACE,
    TOOL_AVAILABILITY,
};

inline constexpr std::size_t kContractTypeCount = 12;

enum class Role {
    OPERATIONAL,
    INCIDENTAL,
};

enum class ContractOrigin {
    REGEX,
    SEMANTIC,
    MERGED,
};

struct Evidence {
    Span span;
    std::string text;  // quoted evidence, == document text at span
};

struct ContractRecord {
    std::string id;
    ContractType contract_type = ContractType::DEPENDENCY;
    Role role = Role::INCIDENTAL;
    std::string value;
    Evidence evidence;
    ContractOrigin origin = ContractOrigin::REGEX;
    std::string skill_id;
};

enum class DriftType {
    URL_CHANGE,
    VERSION_BUMP,
    CONFIG_CHANGE,
    API_MIGRATION,
    DEPRECATION,
    SCHEMA_CHANGE,
    AUTH_CHANGE,
    DEPENDENCY_UPDATE,
};

inline constexpr std::size_t kDriftTypeCount = 8;

struct DriftEvent {
    DriftType drift_type = DriftType::URL_CHANGE;
    std::string old_value;
    std::optional<std::string> new_value;  // absent for pure removals/deprecations
    std::string source;
    std::optional<std::string> observed_at;

    bool operator==(const DriftEvent&) const = default;
};

enum class EvidenceKind {
    KNOWN_DRIFT,
    LIVE_URL,
    LIVE_REGISTRY,
};

enum class MatchLevel {
    EXACT,
    TOK2,
    TYPED1,
    LIVE_HARD,
};

enum class RegistryVerdict {
    NOT_FOUND,
    VERSION_ABSENT,
    YANKED_OR_DEPRECATED,
    OK,
};

// Produced by the live validator; defined here because Violation embeds it.
struct LiveEvidence {
    enum class Kind { URL_STATUS, REGISTRY_LOOKUP };

    Kind kind = Kind::URL_STATUS;
    std::string target;
    int http_status = 0;                        // valid when kind == URL_STATUS
    RegistryVerdict verdict = RegistryVerdict::OK;  // valid when kind == REGISTRY_LOOKUP
    std::optional<std::string> redirect_location;   // present iff 3xx
    std::string fetched_at;
    bool from_cache = false;
};

struct Violation {
    std::string contract_id;
    EvidenceKind evidence_kind = EvidenceKind::KNOWN_DRIFT;
    std::optional<DriftEvent> drift;
    std::optional<LiveEvidence> live_evidence;
    MatchLevel match_level = MatchLevel::EXACT;
    std::string explanation;
};

// Constructs a known-drift violation, enforcing the OPERATIONAL invariant.
Violation make_known_violation(const ContractRecord& contract, const DriftEvent& drift,
                               MatchLevel level, std::string explanation);
Violation make_live_violation(const ContractRecord& contract, const LiveEvidence& evidence,
                              std::string explanation);

enum class Split {
    CONTROLLED_DRIFT,
    REAL_WORLD_DRIFT,
    IDENTITY,
    FORMATTING_NEG,
    SEMANTIC_NEG,
};

struct BenchCase {
    std::string case_id;
    Split split = Split::IDENTITY;
    SkillDocument skill;
    std::vector<DriftEvent> drift_events;
    bool label = false;  // true = genuine drift
    std::optional<DriftType> drift_type;
};

// -- enum <-> string, closed sets; parsing an unknown name is an Error --------

std::string to_string(ContextKind v);
std::string to_string(PatternFamily v);
std::string to_string(ContractType v);
std::string to_string(Role v);
std::string to_string(ContractOrigin v);
std::string to_string(DriftType v);
std::string to_string(EvidenceKind v);
std::string to_string(MatchLevel v);
std::string to_string(RegistryVerdict v);
std::string to_string(LiveEvidence::Kind v);
std::string to_string(Split v);

ContextKind context_kind_from_string(const std::string& s);
PatternFamily pattern_family_from_string(const std::string& s);
ContractType contract_type_from_string(const std::string& s);
Role role_from_string(const std::string& s);
ContractOrigin contract_origin_from_string(const std::string& s);
DriftType drift_type_from_string(const std::string& s);
EvidenceKind evidence_kind_from_string(const std::string& s);
MatchLevel match_level_from_string(const std::string& s);
RegistryVerdict registry_verdict_from_string(const std::string& s);
Split split_from_string(const std::string& s);

// -- compatibility relation ---------------------------------------------------

// Fixed 12x8 matrix gating which drift kinds can invalidate which contract kinds.
bool compatible(ContractType ct, DriftType dt);

// -- JSON ---------------------------------------------------------------------

Json to_json(const Span& v);
Json to_json(const Mention& v);
Json to_json(const ContractRecord& v);
Json to_json(const DriftEvent& v);
Json to_json(const LiveEvidence& v);
Json to_json(const Violation& v);
Json to_json(const SkillDocument& v);
Json to_json(const BenchCase& v);

DriftEvent drift_event_from_json(const Json& j);
ContractRecord contract_record_from_json(const Json& j);
SkillDocument skill_document_from_json(const Json& j);

// Parses a JSON array of drift-event objects (the drifts.json schema).
// Errors: MALFORMED_JSON, UNKNOWN_DRIFT_TYPE, MISSING_FIELD.
std::vector<DriftEvent> parse_drift_events(const std::string& json_text);

std::string serialize_contracts(const std::vector<ContractRecord>& contracts);
std::vector<ContractRecord> parse_contracts(const std::string& json_text);

}  // namespace driftmon
