#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "driftmon/drift_validator.hpp"
#include "driftmon/repair.hpp"
#include "driftmon/role_classifier.hpp"
#include "driftmon/version_constraint.hpp"

using namespace driftmon;

namespace {

SkillDocument load_skill(const std::string& name) {
    std::string path = std::string(FIXTURES_DIR) + "/skills/" + name + ".md";
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    SkillDocument doc;
    doc.id = name;
    doc.source_path = path;
    doc.text = buf.str();
    return doc;
}

DriftEvent make_event(DriftType dt, const std::string& old_value,
                      const std::string& new_value = "") {
    DriftEvent d;
    d.drift_type = dt;
    d.old_value = old_value;
    if (!new_value.empty()) d.new_value = new_value;
    d.source = "test";
    return d;
}

// A generator that replays canned outputs, one per temperature slot.
class ScriptedGenerator final : public RepairGenerator {
  public:
    explicit ScriptedGenerator(std::vector<std::string> outputs)
        : outputs_(std::move(outputs)) {}
    std::string generate(const RepairSpec&, double) const override {
        if (calls_ >= outputs_.size()) return outputs_.back();
        return outputs_[calls_++];
    }

  private:
    std::vector<std::string> outputs_;
    mutable std::size_t calls_ = 0;
};

class ThrowingGenerator final : public RepairGenerator {
  public:
    std::string generate(const RepairSpec&, double) const override {
        throw Error("GEN_UNAVAILABLE", "generator offline");
    }
};

}  // namespace

TEST_CASE("compare_versions orders semver-ish strings") {
    CHECK(compare_versions("1.2.3", "1.2.3") == 0);
    CHECK(compare_versions("1.2.3", "1.2.4") < 0);
    CHECK(compare_versions("1.10.0", "1.9.9") > 0);
    CHECK(compare_versions("1.2", "1.2.0") == 0);
    CHECK(compare_versions("2", "1.99.99") > 0);
    CHECK(compare_versions("1.2.3-rc1", "1.2.3") < 0);
    CHECK(compare_versions("1.2.3-alpha", "1.2.3-beta") < 0);
    CHECK(compare_versions("v1.2.3", "1.2.3") == 0);
}

TEST_CASE("parse_constraint accepts the common pin spellings") {
    auto pin = parse_constraint("numpy==1.24.3");
    REQUIRE(pin.has_value());
    CHECK(pin->name == "numpy");
    REQUIRE(pin->clauses.size() == 1);
    CHECK(pin->clauses[0].op == "==");
    CHECK(pin->clauses[0].version == "1.24.3");

    auto range = parse_constraint("pandas>=1.5.3,<2");
    REQUIRE(range.has_value());
    REQUIRE(range->clauses.size() == 2);
    CHECK(range->clauses[0].op == ">=");
    CHECK(range->clauses[1].op == "<");

    auto caret = parse_constraint("react@^18.2.0");
    REQUIRE(caret.has_value());
    CHECK(caret->name == "react");
    CHECK(caret->clauses[0].op == "^");

    auto tilde = parse_constraint("left-pad@~1.3.0");
    REQUIRE(tilde.has_value());
    CHECK(tilde->clauses[0].op == "~");

    auto compat = parse_constraint("sqlalchemy~=1.4.48");
    REQUIRE(compat.has_value());
    CHECK(compat->clauses[0].op == "~=");

    auto at_pin = parse_constraint("react@18.2.0");
    REQUIRE(at_pin.has_value());
    CHECK(at_pin->clauses[0].op == "==");

    CHECK(!parse_constraint("just-a-name").has_value());
    CHECK(!parse_constraint("").has_value());
    CHECK(!parse_constraint("== 1.2").has_value());
}

TEST_CASE("satisfies covers ranges, caret, tilde, compatible-release and wildcards") {
    auto range = *parse_constraint("pandas>=1.5.3,<2");
    CHECK(satisfies("1.5.3", range));
    CHECK(satisfies("1.9.9", range));
    CHECK(!satisfies("2.0.0", range));
    CHECK(!satisfies("1.5.2", range));

    auto caret = *parse_constraint("react@^18.2.0");
    CHECK(satisfies("18.2.0", caret));
    CHECK(satisfies("18.9.1", caret));
    CHECK(!satisfies("19.0.0", caret));
    CHECK(!satisfies("18.1.0", caret));

    auto tilde = *parse_constraint("lodash@~4.17.20");
    CHECK(satisfies("4.17.21", tilde));
    CHECK(!satisfies("4.18.0", tilde));

    auto compat = *parse_constraint("sqlalchemy~=1.4.48");
    CHECK(satisfies("1.4.48", compat));
    CHECK(satisfies("1.4.52", compat));
    CHECK(!satisfies("1.5.0", compat));

    auto wild = *parse_constraint("django==4.2.*");
    CHECK(satisfies("4.2.0", wild));
    CHECK(satisfies("4.2.11", wild));
    CHECK(!satisfies("4.3.0", wild));

    auto ne = *parse_constraint("flask!=2.0.0,>=1.1");
    CHECK(satisfies("2.0.1", ne));
    CHECK(!satisfies("2.0.0", ne));
    CHECK(!satisfies("1.0.9", ne));

    // Prereleases sit below their release.
    auto floor = *parse_constraint("tool>=1.2.3");
    CHECK(!satisfies("1.2.3-rc1", floor));
    CHECK(satisfies("1.2.3", floor));
}

TEST_CASE("literal verifier is per-drift byte containment") {
    std::vector<DriftEvent> drifts = {
        make_event(DriftType::VERSION_BUMP, "numpy==1.24.3", "numpy==1.26.4"),
        make_event(DriftType::URL_CHANGE, "https://a.example.com/v1",
                   "https://a.example.com/v2"),
    };

    auto good = verify_literal("pin numpy==1.26.4 and call https://a.example.com/v2\n", drifts);
    CHECK(good.passed);
    CHECK(good.verifier == VerifierKind::LITERAL);
    REQUIRE(good.per_drift.size() == 2);
    for (const auto& c : good.per_drift) {
        CHECK(c.new_present);
        CHECK(c.old_absent);
    }

    auto stale = verify_literal("numpy==1.26.4 but numpy==1.24.3 lingers, "
                                "https://a.example.com/v2\n",
                                drifts);
    CHECK(!stale.passed);
    CHECK(stale.per_drift[0].new_present);
    CHECK(!stale.per_drift[0].old_absent);
    CHECK(stale.per_drift[1].new_present);
    CHECK(stale.per_drift[1].old_absent);

    auto missing = verify_literal("only https://a.example.com/v2 here\n", drifts);
    CHECK(!missing.passed);
    CHECK(!missing.per_drift[0].new_present);
}

TEST_CASE("removal drifts verify vacuously on the new side") {
    std::vector<DriftEvent> drifts = {make_event(DriftType::DEPRECATION, "left-pad@1.3.0")};
    auto gone = verify_literal("deps: react@18.2.0\n", drifts);
    CHECK(gone.passed);
    CHECK(gone.per_drift[0].new_present);

    auto still_there = verify_literal("deps: left-pad@1.3.0\n", drifts);
    CHECK(!still_there.passed);
}

TEST_CASE("exhaustive containment: literal pass implies type-aware pass") {
    std::vector<DriftEvent> drifts = {
        make_event(DriftType::VERSION_BUMP, "alpha==1.0.0", "alpha==2.0.0"),
        make_event(DriftType::URL_CHANGE, "https://x.example.com/old",
                   "https://x.example.com/new"),
        make_event(DriftType::CONFIG_CHANGE, "old.toml", "new.toml"),
        make_event(DriftType::DEPRECATION, "legacy-helper"),
    };
    const std::size_t k = drifts.size();

    // Each bit keeps the old value around; new values are always present.
    for (std::size_t mask = 0; mask < (1u << k); ++mask) {
        std::string text = "alpha==2.0.0 https://x.example.com/new new.toml\n";
        for (std::size_t bit = 0; bit < k; ++bit) {
            if (mask & (1u << bit)) text += drifts[bit].old_value + "\n";
        }
        auto lit = verify_literal(text, drifts);
        auto typed = verify_type_aware(text, drifts);
        CHECK(lit.passed == (mask == 0));
        if (lit.passed) CHECK(typed.passed);
        REQUIRE(lit.per_drift.size() == k);
        REQUIRE(typed.per_drift.size() == k);
        for (std::size_t bit = 0; bit < k; ++bit) {
            CHECK(lit.per_drift[bit].old_absent == !(mask & (1u << bit)));
            if (lit.per_drift[bit].new_present) CHECK(typed.per_drift[bit].new_present);
        }
    }
}

TEST_CASE("type-aware verifier accepts satisfying constraints") {
    std::vector<DriftEvent> drifts = {
        make_event(DriftType::VERSION_BUMP, "numpy==1.24.3", "numpy==1.26.4")};

    std::string ranged = "install numpy>=1.26,<2 for the pipeline\n";
    CHECK(!verify_literal(ranged, drifts).passed);
    auto typed = verify_type_aware(ranged, drifts);
    CHECK(typed.passed);
    CHECK(typed.verifier == VerifierKind::TYPE_AWARE);

    // A constraint the new version fails is no help.
    std::string excluded = "install numpy>=1.27 for the pipeline\n";
    CHECK(!verify_type_aware(excluded, drifts).passed);

    // Another package's constraint does not count.
    std::string other = "install scipy>=1.26,<2 for the pipeline\n";
    CHECK(!verify_type_aware(other, drifts).passed);

    // Dependency updates get the same relaxation.
    std::vector<DriftEvent> dep = {
        make_event(DriftType::DEPENDENCY_UPDATE, "sqlalchemy==1.4.48", "sqlalchemy==2.0.25")};
    CHECK(verify_type_aware("sqlalchemy>=2.0,<3\n", dep).passed);

    // Other drift kinds keep literal semantics.
    std::vector<DriftEvent> url = {make_event(DriftType::URL_CHANGE, "https://a.example.com/v1",
                                              "https://a.example.com/v2")};
    CHECK(!verify_type_aware("no urls at all\n", url).passed);
}

TEST_CASE("unparseable new values fall back to the literal verdict") {
    std::vector<DriftEvent> drifts = {
        make_event(DriftType::VERSION_BUMP, "weird==1.0", "not a constraint at all")};
    std::string text = "weird got replaced by something prose-y\n";
    auto lit = verify_literal(text, drifts);
    auto typed = verify_type_aware(text, drifts);
    CHECK(!lit.passed);
    CHECK(typed.passed == lit.passed);
}

TEST_CASE("substitution generator rewrites every occurrence") {
    RepairSpec spec;
    spec.skill_text = "pin a==1 then a==1 again, keep b==2\n";
    RepairItem item;
    item.old_value = "a==1";
    item.new_value = "a==3";
    spec.items.push_back(item);
    RepairItem no_new;
    no_new.old_value = "b==2";
    spec.items.push_back(no_new);

    SubstitutionRepairGenerator gen;
    auto out = gen.generate(spec, 0.0);
    CHECK(out == "pin a==3 then a==3 again, keep b==2\n");
    CHECK(gen.generate(spec, 0.2) == out);
}

TEST_CASE("build_repair_spec resolves violations against contracts") {
    auto skill = load_skill("deploy-web-service");
    NoopSemanticExtractor noop;
    auto contracts = build_contracts(skill, ExtractMode::FULL15, noop);
    std::vector<DriftEvent> events = {
        make_event(DriftType::VERSION_BUMP, "requests==2.28.0", "requests==2.31.0")};
    auto violations = validate_known(contracts, events);
    REQUIRE(!violations.empty());

    auto spec = build_repair_spec(skill, violations, contracts);
    CHECK(spec.skill_text == skill.text);
    REQUIRE(spec.items.size() == violations.size());
    CHECK(spec.items[0].old_value == "requests==2.28.0");
    REQUIRE(spec.items[0].new_value.has_value());
    CHECK(*spec.items[0].new_value == "requests==2.31.0");
    CHECK(spec.items[0].contract.value == "requests==2.28.0");
    CHECK(spec.items[0].category_instructions == category_instruction(DriftType::VERSION_BUMP));
    CHECK(spec.generation_temperatures == std::vector<double>{0.0, 0.2});

    CHECK_THROWS_AS(build_repair_spec(skill, {}, contracts), Error);

    Violation orphan = violations[0];
    orphan.contract_id = "no-such-contract";
    CHECK_THROWS_AS(build_repair_spec(skill, {orphan}, contracts), Error);
}

TEST_CASE("category instructions exist for every drift type") {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < kDriftTypeCount; ++i) {
        const auto& text = category_instruction(static_cast<DriftType>(i));
        CHECK(!text.empty());
        seen.insert(text);
    }
    CHECK(seen.size() == kDriftTypeCount);
}

TEST_CASE("repair loop fixes substitution drifts on the first attempt") {
    auto skill = load_skill("python-data-pipeline");
    NoopSemanticExtractor noop;
    auto contracts = build_contracts(skill, ExtractMode::FULL15, noop);
    std::vector<DriftEvent> events = {
        make_event(DriftType::VERSION_BUMP, "numpy==1.24.3", "numpy==1.26.4")};
    auto violations = validate_known(contracts, events);
    REQUIRE(!violations.empty());

    SubstitutionRepairGenerator gen;
    auto out = run_repair_loop(skill, violations, contracts, gen, VerifierKind::LITERAL);
    CHECK(out.outcome == RepairStatus::REPAIRED);
    CHECK(out.attempts == 1);
    CHECK(out.attempt_errors.empty());
    REQUIRE(out.final_text.has_value());
    CHECK(out.final_text->find("numpy==1.26.4") != std::string::npos);
    CHECK(out.final_text->find("numpy==1.24.3") == std::string::npos);

    // The repaired text no longer trips the same event.
    SkillDocument repaired = skill;
    repaired.text = *out.final_text;
    auto post = validate_known(build_contracts(repaired, ExtractMode::FULL15, noop), events);
    for (const auto& v : post) CHECK(v.match_level != MatchLevel::EXACT);
}

TEST_CASE("repair loop retries across temperatures and reports failure") {
    auto skill = load_skill("deploy-web-service");
    NoopSemanticExtractor noop;
    auto contracts = build_contracts(skill, ExtractMode::FULL15, noop);
    std::vector<DriftEvent> events = {
        make_event(DriftType::VERSION_BUMP, "urllib3==1.26.15", "urllib3==2.0.7")};
    auto violations = validate_known(contracts, events);
    REQUIRE(!violations.empty());

    // First candidate still stale, second clean.
    ScriptedGenerator eventually({skill.text, "deps: urllib3==2.0.7\n"});
    auto out = run_repair_loop(skill, violations, contracts, eventually, VerifierKind::LITERAL);
    CHECK(out.outcome == RepairStatus::REPAIRED);
    CHECK(out.attempts == 2);

    ScriptedGenerator never({skill.text, skill.text});
    auto failed = run_repair_loop(skill, violations, contracts, never, VerifierKind::LITERAL);
    CHECK(failed.outcome == RepairStatus::FAILED);
    CHECK(failed.attempts == 2);
    CHECK(!failed.final_text.has_value());

    ThrowingGenerator broken;
    auto errored = run_repair_loop(skill, violations, contracts, broken, VerifierKind::LITERAL);
    CHECK(errored.outcome == RepairStatus::FAILED);
    CHECK(errored.attempts == 2);
    REQUIRE(errored.attempt_errors.size() == 2);
    CHECK(errored.attempt_errors[0].find("generator offline") != std::string::npos);
}

TEST_CASE("repair loop honors the type-aware verifier") {
    auto skill = load_skill("python-data-pipeline");
    NoopSemanticExtractor noop;
    auto contracts = build_contracts(skill, ExtractMode::FULL15, noop);
    std::vector<DriftEvent> events = {
        make_event(DriftType::VERSION_BUMP, "numpy==1.24.3", "numpy==1.26.4")};
    auto violations = validate_known(contracts, events);
    REQUIRE(!violations.empty());

    std::string ranged = skill.text;
    auto pos = ranged.find("numpy==1.24.3");
    REQUIRE(pos != std::string::npos);
    ranged.replace(pos, std::string("numpy==1.24.3").size(), "numpy>=1.26,<2");
    while ((pos = ranged.find("numpy==1.24.3")) != std::string::npos) {
        ranged.replace(pos, std::string("numpy==1.24.3").size(), "numpy>=1.26,<2");
    }

    ScriptedGenerator gen({ranged});
    auto literal = run_repair_loop(skill, violations, contracts, gen, VerifierKind::LITERAL);
    CHECK(literal.outcome == RepairStatus::FAILED);

    ScriptedGenerator gen2({ranged});
    auto typed = run_repair_loop(skill, violations, contracts, gen2, VerifierKind::TYPE_AWARE);
    CHECK(typed.outcome == RepairStatus::REPAIRED);
    CHECK(typed.attempts == 1);
}

TEST_CASE("verifier results serialize per drift") {
    std::vector<DriftEvent> drifts = {
        make_event(DriftType::VERSION_BUMP, "a==1", "a==2"),
    };
    auto r = verify_literal("a==2\n", drifts);
    auto j = to_json(r);
    CHECK(j["verifier"] == "LITERAL");
    CHECK(j["passed"] == true);
    REQUIRE(j["per_drift"].size() == 1);
    CHECK(j["per_drift"][0]["new_present"] == true);
    CHECK(j["per_drift"][0]["old_absent"] == true);
}
