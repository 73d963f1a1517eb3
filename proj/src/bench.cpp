#include "driftmon/bench.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "driftmon/drift_validator.hpp"
#include "driftmon/matcher.hpp"
#include "driftmon/role_classifier.hpp"
#include "driftmon/version_constraint.hpp"

namespace driftmon {

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("FILE_NOT_FOUND", "cannot read " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

[[noreturn]] void schema_error(const std::string& case_id, const std::string& what) {
    throw Error("SCHEMA_VIOLATION", "case " + case_id + ": " + what);
}

BenchCase case_from_json(const Json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw Error("SCHEMA_VIOLATION", "corpus entry must be an object");
    BenchCase c;
    if (!j.contains("case_id") || !j["case_id"].is_string() ||
        j["case_id"].get<std::string>().empty()) {
        throw Error("SCHEMA_VIOLATION", "corpus entry missing case_id");
    }
    c.case_id = j["case_id"].get<std::string>();
    if (!j.contains("split") || !j["split"].is_string()) {
        schema_error(c.case_id, "missing split");
    }
    c.split = split_from_string(j["split"].get<std::string>());
    if (!j.contains("skill") || !j["skill"].is_object()) {
        schema_error(c.case_id, "missing skill");
    }
    const Json& sk = j["skill"];
    if (sk.contains("path")) {
        auto rel = sk["path"].get<std::string>();
        auto full = base_dir / rel;
        if (!std::filesystem::exists(full)) {
            throw Error("FILE_NOT_FOUND", "case " + c.case_id + ": skill file " + rel);
        }
        c.skill.id = sk.contains("id") ? sk["id"].get<std::string>()
                                       : std::filesystem::path(rel).stem().string();
        c.skill.source_path = full.string();
        c.skill.text = read_file(full);
    } else {
        try {
            c.skill = skill_document_from_json(sk);
        } catch (const Error& e) {
            schema_error(c.case_id, e.what());
        }
    }
    if (j.contains("drift_events")) {
        if (!j["drift_events"].is_array()) schema_error(c.case_id, "drift_events must be a list");
        for (const auto& ev : j["drift_events"]) {
            try {
                c.drift_events.push_back(drift_event_from_json(ev));
            } catch (const Error& e) {
                schema_error(c.case_id, e.what());
            }
        }
    }
    if (!j.contains("label") || !j["label"].is_boolean()) schema_error(c.case_id, "missing label");
    c.label = j["label"].get<bool>();
    if (j.contains("drift_type") && j["drift_type"].is_string()) {
        c.drift_type = drift_type_from_string(j["drift_type"].get<std::string>());
    }

    bool negative_split = c.split == Split::IDENTITY || c.split == Split::FORMATTING_NEG ||
                          c.split == Split::SEMANTIC_NEG;
    if (negative_split && c.label) {
        schema_error(c.case_id, to_string(c.split) + " requires label=false");
    }
    if (!negative_split && !c.label) {
        schema_error(c.case_id, to_string(c.split) + " requires label=true");
    }
    if (!negative_split && c.drift_events.empty()) {
        schema_error(c.case_id, to_string(c.split) + " requires drift events");
    }
    if (c.split == Split::IDENTITY && !c.drift_events.empty()) {
        schema_error(c.case_id, "IDENTITY carries no drift events");
    }
    if (c.skill.text.empty()) schema_error(c.case_id, "skill text is empty");
    return c;
}

double ratio(std::uint64_t num, std::uint64_t den, double when_empty) {
    return den == 0 ? when_empty : static_cast<double>(num) / static_cast<double>(den);
}

// Case outcomes are encoded as doubles so the generic bootstrap can resample
// them: 0=tn 1=fp 2=fn 3=tp.
double encode_outcome(bool label, bool predicted) {
    if (label && predicted) return 3.0;
    if (label) return 2.0;
    if (predicted) return 1.0;
    return 0.0;
}

double precision_of(std::span<const double> outcomes) {
    std::uint64_t tp = 0, fp = 0;
    for (double o : outcomes) {
        if (o == 3.0) ++tp;
        if (o == 1.0) ++fp;
    }
    return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double recall_of(std::span<const double> outcomes) {
    std::uint64_t tp = 0, fn = 0;
    for (double o : outcomes) {
        if (o == 3.0) ++tp;
        if (o == 2.0) ++fn;
    }
    return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

// ---- formatting transforms ----

struct Section {
    std::string text;   // includes the heading line
    bool pinned = false;
};

struct SplitDoc {
    std::string preamble;
    std::vector<Section> sections;
};

bool heading_line(const std::string& line) {
    std::size_t i = 0;
    while (i < line.size() && line[i] == '#') ++i;
    return i >= 1 && i <= 6 && i < line.size() && (line[i] == ' ' || line[i] == '\t');
}

bool fence_line(const std::string& line) {
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ')) ++i;
    if (i > 3) return false;
    return line.compare(i, 3, "```") == 0 || line.compare(i, 3, "~~~") == 0;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

SplitDoc split_sections(const std::string& text) {
    SplitDoc out;
    auto lines = split_lines(text);
    std::string current;
    bool in_fence = false;
    bool seen_heading = false;
    auto flush = [&](bool as_section) {
        if (as_section) {
            Section s;
            s.text = current;
            s.pinned = current.find("<!-- ordered -->") != std::string::npos;
            out.sections.push_back(std::move(s));
        } else {
            out.preamble = current;
        }
        current.clear();
    };
    for (const auto& line : lines) {
        if (!in_fence && heading_line(line)) {
            flush(seen_heading);
            seen_heading = true;
        }
        if (fence_line(line)) in_fence = !in_fence;
        current += line;
        current += '\n';
    }
    flush(seen_heading);
    return out;
}

void reorder_sections(SplitDoc& doc, std::mt19937_64& rng) {
    std::vector<std::size_t> movable;
    for (std::size_t i = 0; i < doc.sections.size(); ++i) {
        if (!doc.sections[i].pinned) movable.push_back(i);
    }
    // Fisher-Yates over the movable slots only; pinned sections keep their index.
    for (std::size_t i = movable.size(); i > 1; --i) {
        auto j = stats::bounded_draw(rng(), i);
        std::swap(doc.sections[movable[i - 1]].text, doc.sections[movable[j]].text);
    }
}

std::string normalize_headings(const std::string& text) {
    std::string out;
    bool in_fence = false;
    for (const auto& line : split_lines(text)) {
        if (!in_fence && heading_line(line)) {
            std::size_t i = 0;
            while (i < line.size() && line[i] == '#') ++i;
            out += "## " + line.substr(line.find_first_not_of(" \t", i));
        } else {
            if (fence_line(line)) in_fence = !in_fence;
            out += line;
        }
        out += '\n';
    }
    return out;
}

std::string swap_list_markers(const std::string& text) {
    std::string out;
    bool in_fence = false;
    for (const auto& line : split_lines(text)) {
        std::string emitted = line;
        if (!in_fence) {
            auto i = line.find_first_not_of(" \t");
            if (i != std::string::npos && i + 1 < line.size() &&
                (line[i] == '-' || line[i] == '*') && line[i + 1] == ' ' &&
                (i + 2 >= line.size() || line[i + 2] != line[i])) {
                emitted[i] = line[i] == '-' ? '*' : '-';
            }
        }
        if (fence_line(line)) in_fence = !in_fence;
        out += emitted;
        out += '\n';
    }
    return out;
}

std::string toggle_fence_languages(const std::string& text) {
    std::string out;
    bool in_fence = false;
    for (const auto& line : split_lines(text)) {
        std::string emitted = line;
        if (fence_line(line)) {
            if (!in_fence) {
                auto i = line.find_first_not_of(' ');
                auto tag_start = i + 3;
                if (tag_start < line.size() &&
                    line.find_first_not_of(" \t", tag_start) != std::string::npos) {
                    emitted = line.substr(0, tag_start);
                }
            }
            in_fence = !in_fence;
        }
        out += emitted;
        out += '\n';
    }
    return out;
}

std::string normalize_whitespace(const std::string& text) {
    std::string out;
    bool in_fence = false;
    int blank_run = 0;
    for (const auto& line : split_lines(text)) {
        std::string emitted = line;
        auto last = emitted.find_last_not_of(" \t");
        emitted.erase(last == std::string::npos ? 0 : last + 1);
        if (fence_line(line)) {
            in_fence = !in_fence;
            blank_run = 0;
        } else if (!in_fence && emitted.empty()) {
            ++blank_run;
            if (blank_run > 1) continue;
        } else {
            blank_run = 0;
        }
        out += emitted;
        out += '\n';
    }
    return out;
}

std::vector<std::pair<PatternFamily, std::string>> mention_multiset(const SkillDocument& doc) {
    std::vector<std::pair<PatternFamily, std::string>> out;
    for (const auto& m : extract_mentions(doc, ExtractMode::FULL15)) {
        out.emplace_back(m.family, m.value);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---- semantic transforms ----

std::optional<std::string> bump_last_number(const std::string& value) {
    auto end = value.find_last_of("0123456789");
    if (end == std::string::npos) return std::nullopt;
    auto start = end;
    while (start > 0 && std::isdigit(static_cast<unsigned char>(value[start - 1]))) --start;
    auto digits = value.substr(start, end - start + 1);
    auto bumped = std::to_string(std::stoull(digits) + 1);
    return value.substr(0, start) + bumped + value.substr(end + 1);
}

std::string splice(const std::string& text, const Span& span, const std::string& replacement) {
    return text.substr(0, span.start) + replacement + text.substr(span.end);
}

std::optional<Mention> mention_overlapping(const SkillDocument& doc, std::size_t pos,
                                           PatternFamily family) {
    for (const auto& m : extract_mentions(doc, ExtractMode::FULL15)) {
        if (m.family == family && m.span.start <= pos && pos < m.span.end) return m;
    }
    return std::nullopt;
}

bool pipeline_flags(const SkillDocument& doc, const std::vector<DriftEvent>& events) {
    NoopSemanticExtractor noop;
    auto contracts = build_contracts(doc, ExtractMode::FULL15, noop);
    return flag_skill(validate_known(contracts, events));
}

struct SemanticCandidate {
    std::string kind;
    Mention mention;            // for the in-place transforms
    std::string package_name;   // for the commentary transform
    std::string package_version;
};

}  // namespace

std::vector<BenchCase> load_corpus(const std::string& path) {
    std::filesystem::path p(path);
    if (!std::filesystem::exists(p)) throw Error("FILE_NOT_FOUND", "no corpus at " + path);
    auto raw = read_file(p);
    Json j = Json::parse(raw, nullptr, false);
    if (j.is_discarded()) throw Error("MALFORMED_JSON", "corpus is not valid json: " + path);
    if (!j.is_array()) throw Error("MALFORMED_JSON", "corpus must be a json array: " + path);
    std::vector<BenchCase> cases;
    std::set<std::string> ids;
    for (const auto& entry : j) {
        auto c = case_from_json(entry, p.parent_path());
        if (!ids.insert(c.case_id).second) {
            throw Error("SCHEMA_VIOLATION", "case " + c.case_id + ": duplicate case_id");
        }
        cases.push_back(std::move(c));
    }
    return cases;
}

Metrics metrics_from_results(std::vector<CaseResult> results, const PipelineConfig& config) {
    std::sort(results.begin(), results.end(),
              [](const CaseResult& a, const CaseResult& b) { return a.case_id < b.case_id; });
    Metrics m;
    std::vector<double> outcomes;
    outcomes.reserve(results.size());
    for (const auto& r : results) {
        auto& split = m.per_split[to_string(r.split)];
        SplitCounts* per_type = nullptr;
        if (r.drift_type) per_type = &m.per_drift_type[to_string(*r.drift_type)];
        if (r.label && r.predicted) {
            ++m.tp, ++split.tp;
            if (per_type) ++per_type->tp;
        } else if (r.label) {
            ++m.fn, ++split.fn;
            if (per_type) ++per_type->fn;
        } else if (r.predicted) {
            ++m.fp, ++split.fp;
            if (per_type) ++per_type->fp;
        } else {
            ++m.tn, ++split.tn;
            if (per_type) ++per_type->tn;
        }
        outcomes.push_back(encode_outcome(r.label, r.predicted));
    }
    m.precision = ratio(m.tp, m.tp + m.fp, 1.0);
    m.recall = ratio(m.tp, m.tp + m.fn, 1.0);
    m.fpr = ratio(m.fp, m.fp + m.tn, 0.0);

    if (!outcomes.empty() && config.bootstrap_resamples > 0) {
        m.precision_ci = stats::bootstrap_ci(outcomes, precision_of, config.bootstrap_resamples,
                                             config.confidence, config.seed);
        m.recall_ci = stats::bootstrap_ci(outcomes, recall_of, config.bootstrap_resamples,
                                          config.confidence, stats::mix_seed(config.seed, 1));
    } else {
        m.precision_ci = {m.precision, m.precision, stats::IntervalMethod::BOOTSTRAP,
                          config.confidence};
        m.recall_ci = {m.recall, m.recall, stats::IntervalMethod::BOOTSTRAP, config.confidence};
    }
    if (m.fp + m.tn > 0) {
        m.fpr_ci = stats::wilson_ci(m.fp, m.fp + m.tn, config.confidence);
    } else {
        m.fpr_ci = {0.0, 1.0, stats::IntervalMethod::WILSON, config.confidence};
    }
    return m;
}

Metrics run_detection(const std::vector<BenchCase>& cases, const PipelineConfig& config,
                      std::vector<CaseResult>* log) {
    NoopSemanticExtractor noop;
    std::vector<CaseResult> results;
    results.reserve(cases.size());
    for (const auto& c : cases) {
        CaseResult r;
        r.case_id = c.case_id;
        r.split = c.split;
        r.label = c.label;
        r.drift_type = c.drift_type;
        try {
            auto contracts = build_contracts(c.skill, config.mode, noop, config.classifier);
            auto violations = validate_known(contracts, c.drift_events);
            r.violation_count = violations.size();
            r.predicted = flag_skill(violations);
        } catch (const std::exception& e) {
            // A crashing monitor must not inflate recall: count as negative.
            r.predicted = false;
            r.error = e.what();
            std::cerr << "driftmon: case " << c.case_id << " pipeline error: " << e.what()
                      << "\n";
        }
        results.push_back(std::move(r));
    }
    auto metrics = metrics_from_results(results, config);
    if (log) {
        std::sort(results.begin(), results.end(),
                  [](const CaseResult& a, const CaseResult& b) { return a.case_id < b.case_id; });
        *log = std::move(results);
    }
    return metrics;
}

BenchCase gen_formatting_negative(const SkillDocument& skill, std::uint64_t seed) {
    auto doc = split_sections(skill.text);
    if (doc.sections.size() < 2) {
        throw Error("TOO_FEW_SECTIONS", "skill " + skill.id + " has " +
                                            std::to_string(doc.sections.size()) +
                                            " sections; need at least 2");
    }
    std::mt19937_64 rng(stats::mix_seed(seed, 0));
    bool do_reorder = stats::bounded_draw(rng(), 2) == 1;
    bool do_headings = stats::bounded_draw(rng(), 2) == 1;
    bool do_lists = stats::bounded_draw(rng(), 2) == 1;
    bool do_fences = stats::bounded_draw(rng(), 2) == 1;
    bool do_whitespace = stats::bounded_draw(rng(), 2) == 1;
    if (!do_reorder && !do_headings && !do_lists && !do_fences && !do_whitespace) {
        do_reorder = do_whitespace = true;
    }

    std::vector<std::string> applied;
    if (do_reorder) {
        reorder_sections(doc, rng);
        applied.push_back("section_reorder");
    }
    std::string text = doc.preamble;
    for (const auto& s : doc.sections) text += s.text;
    if (do_headings) {
        text = normalize_headings(text);
        applied.push_back("heading_normalization");
    }
    if (do_lists) {
        text = swap_list_markers(text);
        applied.push_back("list_marker_swap");
    }
    if (do_fences) {
        text = toggle_fence_languages(text);
        applied.push_back("fence_language_toggle");
    }
    if (do_whitespace) {
        text = normalize_whitespace(text);
        applied.push_back("whitespace_normalization");
    }

    BenchCase out;
    out.case_id = skill.id + "-fmt-" + std::to_string(seed);
    out.split = Split::FORMATTING_NEG;
    out.label = false;
    out.skill.id = out.case_id;
    out.skill.text = text;
    out.skill.metadata["generator"] = "formatting";
    out.skill.metadata["source_skill"] = skill.id;
    out.skill.metadata["seed"] = std::to_string(seed);
    std::string joined;
    for (const auto& t : applied) {
        if (!joined.empty()) joined += ",";
        joined += t;
    }
    out.skill.metadata["transforms"] = joined;

    if (mention_multiset(skill) != mention_multiset(out.skill)) {
        throw Error("MENTION_MISMATCH",
                    "formatting transform changed the mention multiset of " + skill.id);
    }
    return out;
}

BenchCase gen_semantic_negative(const SkillDocument& skill, std::uint64_t seed) {
    auto mentions = extract_mentions(skill, ExtractMode::FULL15);
    std::vector<SemanticCandidate> candidates;
    for (const auto& m : mentions) {
        Role role = assign_role(skill, m);
        bool versionish_family = m.family == PatternFamily::VERSION_CONSTRAINT ||
                                 m.family == PatternFamily::NPM_AT_VERSION ||
                                 m.family == PatternFamily::BARE_SEMVER;
        if (role == Role::INCIDENTAL && versionish_family &&
            m.value.find_first_of("0123456789") != std::string::npos) {
            candidates.push_back({"incidental_version_bump", m, "", ""});
        }
        if (role == Role::INCIDENTAL && m.family == PatternFamily::URL) {
            candidates.push_back({"url_alias", m, "", ""});
        }
        if (role == Role::OPERATIONAL && (m.family == PatternFamily::VERSION_CONSTRAINT ||
                                          m.family == PatternFamily::NPM_AT_VERSION)) {
            if (auto expr = parse_constraint(m.value); expr && !expr->clauses.empty()) {
                candidates.push_back(
                    {"commentary_version", m, expr->name, expr->clauses.front().version});
            }
        }
    }
    if (candidates.empty()) {
        throw Error("NO_ELIGIBLE_MENTION",
                    "skill " + skill.id + " offers no incidental mention to perturb");
    }

    std::mt19937_64 rng(stats::mix_seed(seed, 0));
    auto start = stats::bounded_draw(rng(), candidates.size());
    for (std::size_t tried = 0; tried < candidates.size(); ++tried) {
        const auto& cand = candidates[(start + tried) % candidates.size()];
        SkillDocument transformed = skill;
        transformed.id = skill.id + "-sem-" + std::to_string(seed);
        DriftEvent event;
        event.source = "driftbench:semantic-negative";

        if (cand.kind == "incidental_version_bump") {
            auto span_text = skill.text.substr(cand.mention.span.start,
                                               cand.mention.span.end - cand.mention.span.start);
            auto bumped = bump_last_number(span_text);
            if (!bumped) continue;
            transformed.text = splice(skill.text, cand.mention.span, *bumped);
            auto now = mention_overlapping(transformed, cand.mention.span.start, cand.mention.family);
            if (!now) continue;
            event.drift_type = DriftType::VERSION_BUMP;
            event.old_value = now->value;
            event.new_value = bump_last_number(now->value);
        } else if (cand.kind == "url_alias") {
            auto url = skill.text.substr(cand.mention.span.start,
                                         cand.mention.span.end - cand.mention.span.start);
            std::string aliased;
            if (url.rfind("http://", 0) == 0) {
                aliased = "https://" + url.substr(7);
            } else if (!url.empty() && url.back() == '/') {
                aliased = url.substr(0, url.size() - 1);
            } else {
                aliased = url + "/";
            }
            transformed.text = splice(skill.text, cand.mention.span, aliased);
            auto now = mention_overlapping(transformed, cand.mention.span.start, cand.mention.family);
            if (!now) continue;
            event.drift_type = DriftType::URL_CHANGE;
            event.old_value = now->value;
            event.new_value = cand.mention.value;
        } else {  // commentary_version
            auto version = cand.package_version;
            if (!version.empty() && version[0] == 'v') version.erase(0, 1);
            auto dot = version.find('.');
            std::string major = dot == std::string::npos ? version : version.substr(0, dot);
            std::string cited;
            try {
                cited = std::to_string(std::stoull(major) + 1) + ".0";
            } catch (...) {
                continue;
            }
            transformed.text = skill.text;
            if (!transformed.text.empty() && transformed.text.back() != '\n') {
                transformed.text += '\n';
            }
            transformed.text += "\nFor background, see the " + cand.package_name + " " + cited +
                                " changelog before planning any upgrade.\n";
            event.drift_type = DriftType::VERSION_BUMP;
            event.old_value = cited;
        }

        // The construction is semantics-preserving, so a flag here would be a
        // collision artifact of the corpus values, not a usable hard negative.
        // Skip it; if every candidate collides the generator fails loudly.
        if (pipeline_flags(transformed, {event})) continue;

        BenchCase out;
        out.case_id = skill.id + "-sem-" + std::to_string(seed);
        out.split = Split::SEMANTIC_NEG;
        out.label = false;
        out.skill = transformed;
        out.skill.metadata["generator"] = "semantic";
        out.skill.metadata["source_skill"] = skill.id;
        out.skill.metadata["seed"] = std::to_string(seed);
        out.skill.metadata["transform"] = cand.kind;
        out.drift_events.push_back(event);
        return out;
    }
    throw Error("NO_ELIGIBLE_MENTION",
                "skill " + skill.id + ": every candidate transform collided");
}

std::vector<DriftEvent> derive_events_from_diff(const SkillDocument& old_doc,
                                                const SkillDocument& new_doc) {
    static const std::map<PatternFamily, DriftType> family_drift = {
        {PatternFamily::URL, DriftType::URL_CHANGE},
        {PatternFamily::VERSION_CONSTRAINT, DriftType::VERSION_BUMP},
        {PatternFamily::IMPORT, DriftType::DEPENDENCY_UPDATE},
        {PatternFamily::API_PATH, DriftType::URL_CHANGE},
        {PatternFamily::AUTH_PATTERN, DriftType::AUTH_CHANGE},
        {PatternFamily::DOCKER_IMAGE, DriftType::VERSION_BUMP},
        {PatternFamily::GITHUB_ACTION, DriftType::VERSION_BUMP},
        {PatternFamily::ENV_VAR, DriftType::CONFIG_CHANGE},
        {PatternFamily::CLOUD_REGION, DriftType::CONFIG_CHANGE},
        {PatternFamily::CLI_FLAG, DriftType::CONFIG_CHANGE},
        {PatternFamily::CONFIG_FILENAME, DriftType::CONFIG_CHANGE},
        {PatternFamily::NPM_AT_VERSION, DriftType::VERSION_BUMP},
        {PatternFamily::GIT_BRANCH, DriftType::CONFIG_CHANGE},
        {PatternFamily::DOCKER_IMAGE_TAGGED, DriftType::VERSION_BUMP},
        {PatternFamily::BARE_SEMVER, DriftType::VERSION_BUMP},
    };

    auto keyed = [](const SkillDocument& doc) {
        std::vector<std::pair<std::pair<PatternFamily, std::string>, std::string>> out;
        for (const auto& m : extract_mentions(doc, ExtractMode::FULL15)) {
            NormalizedValue norm;
            try {
                norm = normalize(contract_type_for(m.family), m.value);
            } catch (const Error&) {
                continue;
            }
            out.push_back({{m.family, norm.head}, m.value});
        }
        return out;
    };

    auto old_mentions = keyed(old_doc);
    auto new_mentions = keyed(new_doc);
    std::map<std::pair<PatternFamily, std::string>, std::string> new_first;
    for (const auto& [key, value] : new_mentions) {
        new_first.emplace(key, value);
    }

    std::vector<DriftEvent> events;
    std::set<std::pair<PatternFamily, std::string>> seen;
    for (const auto& [key, old_value] : old_mentions) {
        if (!seen.insert(key).second) continue;
        auto it = new_first.find(key);
        if (it == new_first.end() || it->second == old_value) continue;
        DriftEvent e;
        e.drift_type = family_drift.at(key.first);
        e.old_value = old_value;
        e.new_value = it->second;
        e.source = "diff:" + old_doc.id + ".." + new_doc.id;
        events.push_back(std::move(e));
    }
    return events;
}

Json to_json(const stats::Interval& iv) {
    Json j;
    j["lower"] = iv.lower;
    j["upper"] = iv.upper;
    switch (iv.method) {
        case stats::IntervalMethod::WILSON: j["method"] = "wilson"; break;
        case stats::IntervalMethod::CLOPPER_PEARSON: j["method"] = "clopper_pearson"; break;
        case stats::IntervalMethod::BOOTSTRAP: j["method"] = "bootstrap"; break;
    }
    j["confidence"] = iv.confidence;
    return j;
}

namespace {
Json to_json(const SplitCounts& c) {
    Json j;
    j["tp"] = c.tp;
    j["fp"] = c.fp;
    j["fn"] = c.fn;
    j["tn"] = c.tn;
    return j;
}
}  // namespace

Json to_json(const Metrics& m) {
    Json j;
    j["tp"] = m.tp;
    j["fp"] = m.fp;
    j["fn"] = m.fn;
    j["tn"] = m.tn;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["fpr"] = m.fpr;
    j["precision_ci"] = to_json(m.precision_ci);
    j["recall_ci"] = to_json(m.recall_ci);
    j["fpr_ci"] = to_json(m.fpr_ci);
    Json per_split = Json::object();
    for (const auto& [name, counts] : m.per_split) per_split[name] = to_json(counts);
    j["per_split"] = per_split;
    Json per_type = Json::object();
    for (const auto& [name, counts] : m.per_drift_type) per_type[name] = to_json(counts);
    j["per_drift_type"] = per_type;
    return j;
}

Json to_json(const CaseResult& r) {
    Json j;
    j["case_id"] = r.case_id;
    j["split"] = to_string(r.split);
    j["label"] = r.label;
    j["predicted"] = r.predicted;
    j["violations"] = r.violation_count;
    if (r.drift_type) j["drift_type"] = to_string(*r.drift_type);
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

}  // namespace driftmon
