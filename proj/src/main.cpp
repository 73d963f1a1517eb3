#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "driftmon/bench.hpp"
#include "driftmon/config.hpp"
#include "driftmon/core.hpp"
#include "driftmon/drift_validator.hpp"
#include "driftmon/live_validator.hpp"
#include "driftmon/mention_extractor.hpp"
#include "driftmon/repair.hpp"
#include "driftmon/role_classifier.hpp"

namespace {

using driftmon::Json;

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;      // verify-repair / repair did not pass
constexpr int kExitUsage = 2;     // bad flags or unreadable input
constexpr int kExitDrift = 3;     // check / scan found violations

std::string read_file_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw driftmon::Error("FILE_NOT_FOUND", "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

driftmon::SkillDocument load_skill(const std::string& path) {
    driftmon::SkillDocument doc;
    doc.id = std::filesystem::path(path).stem().string();
    doc.source_path = path;
    doc.text = read_file_or_throw(path);
    return doc;
}

std::vector<driftmon::DriftEvent> load_drifts(const std::string& path) {
    return driftmon::parse_drift_events(read_file_or_throw(path));
}

driftmon::ExtractMode parse_mode(const std::string& mode) {
    if (mode == "base7") return driftmon::ExtractMode::BASE7;
    if (mode == "full15") return driftmon::ExtractMode::FULL15;
    throw driftmon::Error("USAGE", "unknown mode '" + mode + "' (base7|full15)");
}

// Stdout and --report receive the same bytes; the human summary goes to
// stderr so reports stay machine-readable.
void emit_report(const Json& j, const std::string& report_path) {
    auto text = j.dump(2);
    text += "\n";
    std::cout << text;
    if (!report_path.empty()) {
        std::ofstream out(report_path, std::ios::binary);
        if (!out) throw driftmon::Error("FILE_NOT_FOUND", "cannot write " + report_path);
        out << text;
    }
}

void note(bool quiet, const std::string& line) {
    if (!quiet) std::cerr << "driftmon: " << line << "\n";
}

struct CommonOpts {
    std::string config_path;
    std::string report_path;
    std::string mode = "full15";
    bool quiet = false;
};

driftmon::Config load_config(const std::string& explicit_path) {
    if (!explicit_path.empty()) return driftmon::Config::load(explicit_path);
    if (std::filesystem::exists("driftmon.toml")) return driftmon::Config::load("driftmon.toml");
    return {};
}

driftmon::ProbePolicy policy_from(const driftmon::Config& cfg, bool live,
                                  const std::string& cache_dir, int timeout_ms, int per_host,
                                  const std::vector<std::string>& registry_bases) {
    driftmon::ProbePolicy policy;
    policy.network_enabled = live;
    policy.timeout_ms = timeout_ms;
    policy.per_host_limit = per_host;
    policy.cache_dir = cache_dir;
    if (policy.cache_dir.empty()) {
        if (const char* env = std::getenv("DRIFTMON_CACHE_DIR")) policy.cache_dir = env;
    }
    if (const char* token = std::getenv("DRIFTMON_GITHUB_TOKEN")) policy.github_token = token;
    for (const auto& name : {"pypi", "npm", "dockerhub", "github"}) {
        auto key = std::string("registry.") + name;
        if (cfg.has(key)) policy.registry_bases[name] = cfg.get_string(key, "");
    }
    for (const auto& kv : registry_bases) {
        auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= kv.size()) {
            throw driftmon::Error("USAGE", "--registry-base expects name=url, got '" + kv + "'");
        }
        policy.registry_bases[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return policy;
}

int cmd_extract(const CommonOpts& common, const std::string& skill_path) {
    auto cfg = load_config(common.config_path);
    auto settings = driftmon::ClassifierSettings::from_config(cfg);
    auto skill = load_skill(skill_path);
    auto mode = parse_mode(common.mode);
    auto mentions = driftmon::extract_mentions(skill, mode);
    driftmon::NoopSemanticExtractor noop;
    auto contracts = driftmon::build_contracts(skill, mode, noop, settings);

    Json j;
    j["skill_id"] = skill.id;
    j["mode"] = common.mode;
    Json jm = Json::array();
    for (const auto& m : mentions) jm.push_back(driftmon::to_json(m));
    j["mentions"] = jm;
    Json jc = Json::array();
    for (const auto& c : contracts) jc.push_back(driftmon::to_json(c));
    j["contracts"] = jc;
    emit_report(j, common.report_path);
    note(common.quiet, std::to_string(mentions.size()) + " mentions, " +
                           std::to_string(contracts.size()) + " contracts from " + skill_path);
    return kExitOk;
}

int cmd_check(const CommonOpts& common, const std::string& skill_path,
              const std::string& drifts_path) {
    auto cfg = load_config(common.config_path);
    auto settings = driftmon::ClassifierSettings::from_config(cfg);
    auto skill = load_skill(skill_path);
    auto drifts = load_drifts(drifts_path);
    driftmon::NoopSemanticExtractor noop;
    auto contracts = driftmon::build_contracts(skill, parse_mode(common.mode), noop, settings);
    auto violations = driftmon::validate_known(contracts, drifts);

    Json j;
    j["skill_id"] = skill.id;
    j["mode"] = common.mode;
    Json jv = Json::array();
    for (const auto& v : violations) jv.push_back(driftmon::to_json(v));
    j["violations"] = jv;
    Json summary;
    summary["contracts"] = contracts.size();
    summary["drift_events"] = drifts.size();
    summary["violations"] = violations.size();
    summary["flagged"] = driftmon::flag_skill(violations);
    j["summary"] = summary;
    emit_report(j, common.report_path);
    note(common.quiet, std::to_string(violations.size()) + " violations in " + skill_path);
    return violations.empty() ? kExitOk : kExitDrift;
}

int cmd_scan(const CommonOpts& common, const std::string& skill_path, bool live,
             const std::string& cache_dir, int timeout_ms, int per_host,
             const std::vector<std::string>& registry_bases) {
    auto cfg = load_config(common.config_path);
    auto settings = driftmon::ClassifierSettings::from_config(cfg);
    auto skill = load_skill(skill_path);
    driftmon::NoopSemanticExtractor noop;
    auto contracts = driftmon::build_contracts(skill, parse_mode(common.mode), noop, settings);
    auto policy = policy_from(cfg, live, cache_dir, timeout_ms, per_host, registry_bases);
    auto report = driftmon::validate_live_report(contracts, policy);

    Json j;
    j["skill_id"] = skill.id;
    j["live"] = live;
    Json jv = Json::array();
    for (const auto& v : report.violations) jv.push_back(driftmon::to_json(v));
    j["violations"] = jv;
    Json jo = Json::array();
    for (const auto& o : report.observations) {
        Json entry;
        entry["contract_id"] = o.contract_id;
        entry["note"] = o.note;
        jo.push_back(entry);
    }
    j["observations"] = jo;
    Json summary;
    summary["contracts"] = contracts.size();
    summary["violations"] = report.violations.size();
    summary["observations"] = report.observations.size();
    summary["flagged"] = !report.violations.empty();
    j["summary"] = summary;
    emit_report(j, common.report_path);
    note(common.quiet, std::to_string(report.violations.size()) + " live violations in " +
                           skill_path + (live ? "" : " (network disabled)"));
    return report.violations.empty() ? kExitOk : kExitDrift;
}

int cmd_verify_repair(const CommonOpts& common, const std::string& original_path,
                      const std::string& repaired_path, const std::string& drifts_path,
                      bool type_aware) {
    auto repaired = read_file_or_throw(repaired_path);
    (void)read_file_or_throw(original_path);  // must exist, even though literal checks run on B
    auto drifts = load_drifts(drifts_path);
    auto result = type_aware ? driftmon::verify_type_aware(repaired, drifts)
                             : driftmon::verify_literal(repaired, drifts);
    emit_report(driftmon::to_json(result), common.report_path);
    note(common.quiet, std::string("verification ") + (result.passed ? "passed" : "failed"));
    return result.passed ? kExitOk : kExitFail;
}

int cmd_repair(const CommonOpts& common, const std::string& skill_path,
               const std::string& drifts_path, bool type_aware, const std::string& out_path) {
    auto cfg = load_config(common.config_path);
    auto settings = driftmon::ClassifierSettings::from_config(cfg);
    auto skill = load_skill(skill_path);
    auto drifts = load_drifts(drifts_path);
    driftmon::NoopSemanticExtractor noop;
    auto contracts = driftmon::build_contracts(skill, parse_mode(common.mode), noop, settings);
    auto violations = driftmon::validate_known(contracts, drifts);

    Json j;
    j["skill_id"] = skill.id;
    j["violations"] = violations.size();
    if (violations.empty()) {
        j["outcome"] = "NO_VIOLATIONS";
        emit_report(j, common.report_path);
        note(common.quiet, "nothing to repair in " + skill_path);
        return kExitOk;
    }

    driftmon::SubstitutionRepairGenerator gen;
    auto kind = type_aware ? driftmon::VerifierKind::TYPE_AWARE : driftmon::VerifierKind::LITERAL;
    auto outcome = driftmon::run_repair_loop(skill, violations, contracts, gen, kind);
    j["outcome"] = outcome.outcome == driftmon::RepairStatus::REPAIRED ? "REPAIRED" : "FAILED";
    j["attempts"] = outcome.attempts;
    Json errs = Json::array();
    for (const auto& e : outcome.attempt_errors) errs.push_back(e);
    j["attempt_errors"] = errs;
    if (outcome.final_text && !out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw driftmon::Error("FILE_NOT_FOUND", "cannot write " + out_path);
        out << *outcome.final_text;
        j["repaired_path"] = out_path;
    }
    emit_report(j, common.report_path);
    note(common.quiet, std::string("repair ") + j["outcome"].get<std::string>() + " after " +
                           std::to_string(outcome.attempts) + " attempts");
    return outcome.outcome == driftmon::RepairStatus::REPAIRED ? kExitOk : kExitFail;
}

int cmd_bench(const CommonOpts& common, const std::string& corpus_path, unsigned bootstrap,
              std::uint64_t seed) {
    auto cfg = load_config(common.config_path);
    auto cases = driftmon::load_corpus(corpus_path);
    driftmon::PipelineConfig pipeline;
    pipeline.mode = parse_mode(common.mode);
    pipeline.classifier = driftmon::ClassifierSettings::from_config(cfg);
    pipeline.bootstrap_resamples = bootstrap;
    pipeline.seed = seed;
    std::vector<driftmon::CaseResult> log;
    auto metrics = driftmon::run_detection(cases, pipeline, &log);

    Json j;
    j["corpus"] = corpus_path;
    j["mode"] = common.mode;
    j["seed"] = seed;
    j["cases"] = cases.size();
    j["metrics"] = driftmon::to_json(metrics);
    Json jl = Json::array();
    for (const auto& r : log) jl.push_back(driftmon::to_json(r));
    j["case_log"] = jl;
    emit_report(j, common.report_path);
    note(common.quiet, std::to_string(cases.size()) + " cases, precision " +
                           std::to_string(metrics.precision) + ", recall " +
                           std::to_string(metrics.recall));
    return kExitOk;
}

int cmd_negatives(const CommonOpts& common, const std::string& skill_path,
                  const std::string& kind, unsigned count, std::uint64_t seed,
                  const std::string& out_dir) {
    if (kind != "formatting" && kind != "semantic") {
        throw driftmon::Error("USAGE", "--kind must be formatting or semantic");
    }
    auto skill = load_skill(skill_path);
    std::filesystem::create_directories(out_dir);
    Json written = Json::array();
    for (unsigned i = 0; i < count; ++i) {
        auto c = kind == "formatting"
                     ? driftmon::gen_formatting_negative(skill, seed + i)
                     : driftmon::gen_semantic_negative(skill, seed + i);
        auto file = std::filesystem::path(out_dir) / (c.case_id + ".json");
        std::ofstream out(file, std::ios::binary);
        if (!out) throw driftmon::Error("FILE_NOT_FOUND", "cannot write " + file.string());
        out << driftmon::to_json(c).dump(2) << "\n";
        written.push_back(file.string());
    }
    Json j;
    j["skill_id"] = skill.id;
    j["kind"] = kind;
    j["count"] = count;
    j["seed"] = seed;
    j["files"] = written;
    emit_report(j, common.report_path);
    note(common.quiet, std::to_string(count) + " " + kind + " negatives in " + out_dir);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skill drift monitor: contracts out of markdown, drift in from the world"};
    app.require_subcommand(1);

    CommonOpts common;
    app.add_option("--config", common.config_path, "config file (default ./driftmon.toml)");

    std::string skill_path, drifts_path, corpus_path, out_path, kind;
    std::string original_path, repaired_path, cache_dir;
    bool live = false, no_network = false, type_aware = false;
    int timeout_ms = 5000, per_host = 4;
    unsigned bootstrap = 1000, count = 10;
    std::uint64_t seed = 0;
    std::vector<std::string> registry_bases;

    auto add_common = [&](CLI::App* sub, bool with_mode) {
        sub->add_option("--report", common.report_path, "also write the JSON report here");
        sub->add_flag("--quiet", common.quiet, "suppress the stderr summary");
        if (with_mode) {
            sub->add_option("--mode", common.mode, "base7|full15")->default_str("full15");
        }
    };

    auto* extract = app.add_subcommand("extract", "mentions and contracts from one skill");
    extract->add_option("skill", skill_path, "skill markdown file")->required();
    add_common(extract, true);

    auto* check = app.add_subcommand("check", "validate a skill against known drift events");
    check->add_option("skill", skill_path, "skill markdown file")->required();
    check->add_option("--drifts", drifts_path, "drift events json")->required();
    add_common(check, true);

    auto* scan = app.add_subcommand("scan", "probe live registries and urls for hard evidence");
    scan->add_option("skill", skill_path, "skill markdown file")->required();
    scan->add_flag("--live", live, "enable network probes");
    scan->add_flag("--no-network", no_network, "force network off (default)");
    scan->add_option("--cache-dir", cache_dir, "probe cache directory");
    scan->add_option("--timeout-ms", timeout_ms, "per-request timeout")->default_str("5000");
    scan->add_option("--per-host", per_host, "probe burst size per host")->default_str("4");
    scan->add_option("--registry-base", registry_bases,
                     "override a registry base url, name=url (repeatable)");
    add_common(scan, true);

    auto* verify = app.add_subcommand("verify-repair", "check a repaired skill against drifts");
    verify->add_option("--original", original_path, "original skill file")->required();
    verify->add_option("--repaired", repaired_path, "repaired skill file")->required();
    verify->add_option("--drifts", drifts_path, "drift events json")->required();
    verify->add_flag("--type-aware", type_aware, "relax dependency checks to range satisfaction");
    add_common(verify, false);

    auto* repair = app.add_subcommand("repair", "substitution repair with verification");
    repair->add_option("skill", skill_path, "skill markdown file")->required();
    repair->add_option("--drifts", drifts_path, "drift events json")->required();
    repair->add_flag("--type-aware", type_aware, "relax dependency checks to range satisfaction");
    repair->add_option("--out", out_path, "write the repaired text here");
    add_common(repair, true);

    auto* bench = app.add_subcommand("bench", "run the detection pipeline over a corpus");
    bench->add_option("--corpus", corpus_path, "corpus json")->required();
    bench->add_option("--bootstrap", bootstrap, "bootstrap resamples")->default_str("1000");
    bench->add_option("--seed", seed, "rng seed")->default_str("0");
    add_common(bench, true);

    auto* negatives = app.add_subcommand("negatives", "generate hard negatives from a skill");
    negatives->add_option("--skill", skill_path, "seed skill markdown file")->required();
    negatives->add_option("--kind", kind, "formatting|semantic")->required();
    negatives->add_option("--count", count, "how many cases")->default_str("10");
    negatives->add_option("--seed", seed, "rng seed")->default_str("0");
    negatives->add_option("--out", out_path, "output directory")->required();
    add_common(negatives, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (no_network) live = false;
        if (extract->parsed()) return cmd_extract(common, skill_path);
        if (check->parsed()) return cmd_check(common, skill_path, drifts_path);
        if (scan->parsed()) {
            return cmd_scan(common, skill_path, live, cache_dir, timeout_ms, per_host,
                            registry_bases);
        }
        if (verify->parsed()) {
            return cmd_verify_repair(common, original_path, repaired_path, drifts_path,
                                     type_aware);
        }
        if (repair->parsed()) {
            return cmd_repair(common, skill_path, drifts_path, type_aware, out_path);
        }
        if (bench->parsed()) return cmd_bench(common, corpus_path, bootstrap, seed);
        if (negatives->parsed()) {
            return cmd_negatives(common, skill_path, kind, count, seed, out_path);
        }
    } catch (const driftmon::Error& e) {
        std::cerr << "driftmon: " << e.code() << ": " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "driftmon: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
