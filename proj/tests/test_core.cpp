#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "driftmon/core.hpp"

using namespace driftmon;

TEST_CASE("enum round trips") {
    for (int i = 0; i < kPatternFamilyCount; ++i) {
        auto f = static_cast<PatternFamily>(i);
        CHECK(pattern_family_from_string(to_string(f)) == f);
    }
    CHECK(to_string(ContractType::SERVICE_URL) == "SERVICE_URL");
    CHECK(contract_type_from_string("CLI_INTERFACE") == ContractType::CLI_INTERFACE);
    CHECK(drift_type_from_string("API_MIGRATION") == DriftType::API_MIGRATION);
    CHECK(to_string(Role::OPERATIONAL) == "OPERATIONAL");
    CHECK(to_string(MatchLevel::TYPED1) == "TYPED1");
    CHECK(to_string(Split::SEMANTIC_NEG) == "SEMANTIC_NEG");
}

TEST_CASE("unknown enum strings raise coded errors") {
    try {
        (void)drift_type_from_string("SIDEWAYS_DRIFT");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == "UNKNOWN_DRIFT_TYPE");
    }
    CHECK_THROWS_AS((void)contract_type_from_string(""), Error);
    CHECK_THROWS_AS((void)pattern_family_from_string("URLS"), Error);
}

TEST_CASE("compatibility matrix spot checks") {
    CHECK(compatible(ContractType::SERVICE_URL, DriftType::URL_CHANGE));
    CHECK(compatible(ContractType::SERVICE_URL, DriftType::DEPRECATION));
    CHECK_FALSE(compatible(ContractType::SERVICE_URL, DriftType::VERSION_BUMP));
    CHECK_FALSE(compatible(ContractType::SERVICE_URL, DriftType::AUTH_CHANGE));
    CHECK(compatible(ContractType::DEPENDENCY, DriftType::VERSION_BUMP));
    CHECK(compatible(ContractType::DEPENDENCY, DriftType::DEPENDENCY_UPDATE));
    CHECK_FALSE(compatible(ContractType::DEPENDENCY, DriftType::AUTH_CHANGE));
    CHECK(compatible(ContractType::AUTHENTICATION, DriftType::AUTH_CHANGE));
    CHECK(compatible(ContractType::AUTHENTICATION, DriftType::API_MIGRATION));
    CHECK(compatible(ContractType::CONTAINER_IMAGE, DriftType::VERSION_BUMP));
    CHECK(compatible(ContractType::CI_ACTION, DriftType::VERSION_BUMP));
    CHECK(compatible(ContractType::ENV_VARIABLE, DriftType::CONFIG_CHANGE));
    CHECK(compatible(ContractType::ENV_VARIABLE, DriftType::AUTH_CHANGE));
    CHECK_FALSE(compatible(ContractType::ENV_VARIABLE, DriftType::URL_CHANGE));
    CHECK(compatible(ContractType::CLOUD_RESOURCE, DriftType::CONFIG_CHANGE));
    CHECK(compatible(ContractType::CLOUD_RESOURCE, DriftType::URL_CHANGE));
    CHECK(compatible(ContractType::CLI_INTERFACE, DriftType::DEPRECATION));
    CHECK(compatible(ContractType::CLI_INTERFACE, DriftType::API_MIGRATION));
    CHECK_FALSE(compatible(ContractType::CLI_INTERFACE, DriftType::VERSION_BUMP));
    CHECK(compatible(ContractType::CONFIGURATION, DriftType::CONFIG_CHANGE));
    CHECK(compatible(ContractType::API_ENDPOINT, DriftType::URL_CHANGE));
    CHECK(compatible(ContractType::API_ENDPOINT, DriftType::SCHEMA_CHANGE));
    CHECK(compatible(ContractType::SCHEMA_FIELD, DriftType::SCHEMA_CHANGE));
    CHECK(compatible(ContractType::TOOL_AVAILABILITY, DriftType::DEPRECATION));
    CHECK_FALSE(compatible(ContractType::TOOL_AVAILABILITY, DriftType::URL_CHANGE));
}

TEST_CASE("every drift type is compatible with at least one contract type") {
    for (int d = 0; d < 8; ++d) {
        bool any = false;
        for (int c = 0; c < 12; ++c) {
            if (compatible(static_cast<ContractType>(c), static_cast<DriftType>(d))) any = true;
        }
        CHECK(any);
    }
}

TEST_CASE("violation constructors refuse incidental contracts") {
    ContractRecord incidental;
    incidental.id = "c1";
    incidental.contract_type = ContractType::SERVICE_URL;
    incidental.role = Role::INCIDENTAL;
    incidental.value = "https://example.com";
    incidental.origin = ContractOrigin::REGEX;
    incidental.skill_id = "s1";

    DriftEvent ev;
    ev.drift_type = DriftType::URL_CHANGE;
    ev.old_value = "https://example.com";
    ev.new_value = "https://example.org";
    ev.source = "test";

    try {
        (void)make_known_violation(incidental, ev, MatchLevel::EXACT, "x");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == "INCIDENTAL_VIOLATION");
    }

    incidental.role = Role::OPERATIONAL;
    auto v = make_known_violation(incidental, ev, MatchLevel::EXACT, "changed");
    CHECK(v.contract_id == "c1");
    CHECK(v.evidence_kind == EvidenceKind::KNOWN_DRIFT);
    CHECK(v.match_level == MatchLevel::EXACT);
    CHECK(v.drift.has_value());
}

TEST_CASE("drift event json round trip") {
    std::string payload = R"([
      {"drift_type": "VERSION_BUMP", "old_value": "2.28.0", "new_value": "2.31.0",
       "source": "changelog", "observed_at": "2024-06-01T00:00:00Z"},
      {"drift_type": "DEPRECATION", "old_value": "--no-transaction", "source": "release notes"}
    ])";
    auto events = parse_drift_events(payload);
    REQUIRE(events.size() == 2);
    CHECK(events[0].drift_type == DriftType::VERSION_BUMP);
    CHECK(events[0].new_value.value() == "2.31.0");
    CHECK(events[0].observed_at.value() == "2024-06-01T00:00:00Z");
    CHECK_FALSE(events[1].new_value.has_value());
    CHECK_FALSE(events[1].observed_at.has_value());

    auto j = to_json(events[1]);
    CHECK(j.contains("drift_type"));
    CHECK_FALSE(j.contains("new_value"));
    auto back = drift_event_from_json(j);
    CHECK(back.drift_type == DriftType::DEPRECATION);
    CHECK(back.old_value == "--no-transaction");
}

TEST_CASE("drift event parsing rejects bad payloads with coded errors") {
    try {
        (void)parse_drift_events("{not json");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == "MALFORMED_JSON");
    }
    try {
        (void)parse_drift_events(R"({"drift_type": "VERSION_BUMP"})");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == "MALFORMED_JSON");
    }
    try {
        (void)parse_drift_events(R"([{"drift_type": "VERSION_BUMP", "source": "x"}])");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == "MISSING_FIELD");
    }
    try {
        (void)parse_drift_events(R"([{"drift_type": "VERSION_BUMP", "old_value": "", "source": "x"}])");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == "MISSING_FIELD");
    }
}

TEST_CASE("contract serialization round trips and keeps field order") {
    ContractRecord c;
    c.id = "skill-a:3";
    c.contract_type = ContractType::DEPENDENCY;
    c.role = Role::OPERATIONAL;
    c.value = "requests==2.28.0";
    c.evidence = Evidence{Span{120, 137}, "requests==2.28.0"};
    c.origin = ContractOrigin::REGEX;
    c.skill_id = "skill-a";

    auto text = serialize_contracts({c});
    auto parsed = parse_contracts(text);
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].id == c.id);
    CHECK(parsed[0].contract_type == c.contract_type);
    CHECK(parsed[0].role == c.role);
    CHECK(parsed[0].value == c.value);
    CHECK(parsed[0].evidence.span.start == 120);
    CHECK(parsed[0].evidence.span.end == 137);
    CHECK(parsed[0].origin == ContractOrigin::REGEX);
    CHECK(parsed[0].skill_id == "skill-a");

    // Serialization must be byte-stable call to call.
    CHECK(serialize_contracts({c}) == text);
    auto keys_in_order = Json::parse(text)[0];
    auto it = keys_in_order.begin();
    CHECK(it.key() == "id");
}

TEST_CASE("live evidence json shape differs by kind") {
    LiveEvidence url;
    url.kind = LiveEvidence::Kind::URL_STATUS;
    url.target = "https://api.example.com/v1";
    url.http_status = 404;
    url.fetched_at = "2024-06-01T00:00:00Z";
    url.from_cache = false;
    auto ju = to_json(url);
    CHECK(ju["kind"] == "URL_STATUS");
    CHECK(ju["http_status"] == 404);
    CHECK_FALSE(ju.contains("verdict"));

    LiveEvidence reg;
    reg.kind = LiveEvidence::Kind::REGISTRY_LOOKUP;
    reg.target = "pypi:requests";
    reg.verdict = RegistryVerdict::VERSION_ABSENT;
    reg.fetched_at = "2024-06-01T00:00:00Z";
    reg.from_cache = true;
    auto jr = to_json(reg);
    CHECK(jr["kind"] == "REGISTRY_LOOKUP");
    CHECK(jr["verdict"] == "VERSION_ABSENT");
    CHECK(jr["from_cache"] == true);
}
