#include "driftmon/role_classifier.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "driftmon/matcher.hpp"

namespace driftmon {

namespace {

bool operational_family(PatternFamily f) {
    switch (f) {
        case PatternFamily::VERSION_CONSTRAINT:
        case PatternFamily::IMPORT:
        case PatternFamily::DOCKER_IMAGE:
        case PatternFamily::DOCKER_IMAGE_TAGGED:
        case PatternFamily::GITHUB_ACTION:
        case PatternFamily::NPM_AT_VERSION:
        case PatternFamily::ENV_VAR:
            return true;
        default:
            return false;
    }
}

std::string fold_token(const std::string& tok) {
    std::size_t b = 0;
    std::size_t e = tok.size();
    auto droppable = [](char c) {
        return std::string(".,;:()[]{}\"'`").find(c) != std::string::npos;
    };
    while (b < e && droppable(tok[b])) ++b;
    while (e > b && droppable(tok[e - 1])) --e;
    std::string out = tok.substr(b, e - b);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

// A citation cue within the last `window` whitespace tokens on the mention's
// line, before the mention itself.
bool citation_cue_fires(const SkillDocument& doc, const Mention& m,
                        const ClassifierSettings& settings) {
    if (settings.cue_window == 0 || settings.citation_cues.empty()) return false;

    std::size_t line_start = doc.text.rfind('\n', m.span.start == 0 ? 0 : m.span.start - 1);
    line_start = line_start == std::string::npos ? 0 : line_start + 1;
    if (m.span.start < line_start) return false;
    std::string before = doc.text.substr(line_start, m.span.start - line_start);

    std::vector<std::string> tokens;
    std::string cur;
    for (char c : before) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) tokens.push_back(fold_token(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) tokens.push_back(fold_token(cur));

    std::size_t first = tokens.size() > settings.cue_window ? tokens.size() - settings.cue_window
                                                            : 0;
    for (const auto& cue : settings.citation_cues) {
        std::vector<std::string> cue_words;
        std::string w;
        for (char c : cue) {
            if (c == ' ') {
                if (!w.empty()) cue_words.push_back(fold_token(w));
                w.clear();
            } else {
                w.push_back(c);
            }
        }
        if (!w.empty()) cue_words.push_back(fold_token(w));
        if (cue_words.empty()) continue;

        for (std::size_t i = first; i + cue_words.size() <= tokens.size(); ++i) {
            bool all = true;
            for (std::size_t k = 0; k < cue_words.size(); ++k) {
                if (tokens[i + k] != cue_words[k]) {
                    all = false;
                    break;
                }
            }
            if (all) return true;
        }
    }
    return false;
}

}  // namespace

ContractType contract_type_for(PatternFamily family) {
    switch (family) {
        case PatternFamily::URL: return ContractType::SERVICE_URL;
        case PatternFamily::API_PATH: return ContractType::API_ENDPOINT;
        case PatternFamily::VERSION_CONSTRAINT:
        case PatternFamily::IMPORT:
        case PatternFamily::NPM_AT_VERSION:
        case PatternFamily::BARE_SEMVER: return ContractType::DEPENDENCY;
        case PatternFamily::AUTH_PATTERN: return ContractType::AUTHENTICATION;
        case PatternFamily::DOCKER_IMAGE:
        case PatternFamily::DOCKER_IMAGE_TAGGED: return ContractType::CONTAINER_IMAGE;
        case PatternFamily::GITHUB_ACTION: return ContractType::CI_ACTION;
        case PatternFamily::ENV_VAR: return ContractType::ENV_VARIABLE;
        case PatternFamily::CLOUD_REGION: return ContractType::CLOUD_RESOURCE;
        case PatternFamily::CLI_FLAG: return ContractType::CLI_INTERFACE;
        case PatternFamily::CONFIG_FILENAME:
        case PatternFamily::GIT_BRANCH: return ContractType::CONFIGURATION;
    }
    throw Error("UNKNOWN_FAMILY", "unmapped pattern family");
}

Role assign_role(const SkillDocument& doc, const Mention& mention) {
    return assign_role(doc, mention, ClassifierSettings{});
}

Role assign_role(const SkillDocument& doc, const Mention& mention,
                 const ClassifierSettings& settings) {
    switch (mention.context) {
        case ContextKind::BADGE_OR_IMAGE:
        case ContextKind::LINK_LABEL:
        case ContextKind::HEADING:
        case ContextKind::COMMENT:
            return Role::INCIDENTAL;
        default:
            break;
    }
    if (citation_cue_fires(doc, mention, settings)) return Role::INCIDENTAL;
    if (mention.context == ContextKind::CODE_FENCE || mention.context == ContextKind::INLINE_CODE) {
        return Role::OPERATIONAL;
    }
    if (operational_family(mention.family)) return Role::OPERATIONAL;
    return settings.ambiguous_default;
}

std::vector<ContractRecord> form_contracts(const SkillDocument& doc,
                                           const std::vector<Mention>& mentions,
                                           const std::vector<ContractRecord>& semantic,
                                           const ClassifierSettings& settings) {
    struct Pending {
        ContractRecord rec;
        bool merged = false;
    };
    std::map<std::pair<ContractType, std::string>, Pending> by_key;

    auto fold_in = [&](ContractRecord rec) {
        std::string canonical;
        try {
            canonical = normalize(rec.contract_type, rec.value).canonical;
        } catch (const Error&) {
            canonical = rec.value;
        }
        auto key = std::make_pair(rec.contract_type, canonical);
        auto it = by_key.find(key);
        if (it == by_key.end()) {
            by_key.emplace(key, Pending{std::move(rec), false});
            return;
        }
        Pending& p = it->second;
        if (rec.role == Role::OPERATIONAL) p.rec.role = Role::OPERATIONAL;
        if (rec.evidence.span.start < p.rec.evidence.span.start) {
            p.rec.evidence = rec.evidence;
            p.rec.value = rec.value;
        }
        p.merged = true;
    };

    for (const auto& m : mentions) {
        ContractRecord rec;
        rec.contract_type = contract_type_for(m.family);
        rec.role = assign_role(doc, m, settings);
        rec.value = m.value;
        rec.evidence = Evidence{m.span, m.raw};
        rec.origin = ContractOrigin::REGEX;
        rec.skill_id = doc.id;
        fold_in(std::move(rec));
    }
    for (const auto& s : semantic) {
        if (s.evidence.span.end > doc.text.size() ||
            s.evidence.span.start >= s.evidence.span.end) {
            throw Error("EVIDENCE_OUT_OF_RANGE",
                        "semantic record evidence lies outside the document");
        }
        ContractRecord rec = s;
        rec.origin = ContractOrigin::SEMANTIC;
        rec.skill_id = doc.id;
        fold_in(std::move(rec));
    }

    std::vector<ContractRecord> out;
    out.reserve(by_key.size());
    for (auto& [key, pending] : by_key) {
        if (pending.merged) pending.rec.origin = ContractOrigin::MERGED;
        out.push_back(std::move(pending.rec));
    }
    std::sort(out.begin(), out.end(), [](const ContractRecord& a, const ContractRecord& b) {
        if (a.evidence.span.start != b.evidence.span.start)
            return a.evidence.span.start < b.evidence.span.start;
        if (a.contract_type != b.contract_type) return a.contract_type < b.contract_type;
        return a.value < b.value;
    });
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].id = doc.id + ":c" + std::to_string(i);
    }
    return out;
}

std::vector<ContractRecord> build_contracts(const SkillDocument& doc, ExtractMode mode,
                                            const SemanticExtractor& semantic,
                                            const ClassifierSettings& settings) {
    auto mentions = extract_mentions(doc, mode);
    auto sem = semantic.extract(doc);
    return form_contracts(doc, mentions, sem, settings);
}

}  // namespace driftmon
