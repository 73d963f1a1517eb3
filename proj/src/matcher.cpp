#include "driftmon/matcher.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace driftmon {

namespace {

const std::set<std::string> kStoplist = {"http", "https", "www", "com", "org", "io",
                                         "net",  "api",   "the", "a",   "an",  "latest"};

bool is_separator(char ch) {
    switch (ch) {
        case '/': case '-': case '_': case '.': case ':': case '@': case '=':
        case ' ': case '<': case '>': case ',': case '~': case '^': case '!':
            return true;
        default:
            return false;
    }
}

bool is_strip_char(char ch) {
    switch (ch) {
        case '"': case '\'': case '`': case '(': case ')': case '<': case '>':
        case '[': case ']': case ',': case ';': case '$': case '{': case '}':
            return true;
        default:
            return false;
    }
}

bool url_like(ContractType ct) {
    return ct == ContractType::SERVICE_URL || ct == ContractType::API_ENDPOINT ||
           ct == ContractType::CLOUD_RESOURCE;
}

// "v1", "2", "28": a bare version fragment. Signal for version-bearing types,
// noise everywhere else.
bool versionish(const std::string& tok) {
    std::size_t i = 0;
    if (!tok.empty() && (tok[0] == 'v' || tok[0] == 'V')) i = 1;
    if (i >= tok.size()) return false;
    for (; i < tok.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return false;
    }
    return true;
}

}  // namespace

bool version_bearing(ContractType ct) {
    return ct == ContractType::DEPENDENCY || ct == ContractType::CONTAINER_IMAGE ||
           ct == ContractType::CI_ACTION || ct == ContractType::TOOL_AVAILABILITY;
}

NormalizedValue normalize(ContractType ct, const std::string& value) {
    if (value.empty()) throw Error("EMPTY_VALUE", "cannot normalize an empty value");

    std::string s = value;
    auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());

    while (!s.empty() && is_strip_char(s.front())) s.erase(s.begin());
    while (!s.empty() && is_strip_char(s.back())) s.pop_back();

    if (url_like(ct)) {
        std::string head8 = s.substr(0, std::min<std::size_t>(s.size(), 8));
        std::transform(head8.begin(), head8.end(), head8.begin(),
                       [](unsigned char ch) { return std::tolower(ch); });
        if (head8.rfind("https://", 0) == 0) {
            s.erase(0, 8);
        } else if (head8.rfind("http://", 0) == 0) {
            s.erase(0, 7);
        }
    }

    if (ct != ContractType::ENV_VARIABLE) {
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char ch) { return std::tolower(ch); });
    }

    std::string collapsed;
    collapsed.reserve(s.size());
    for (char ch : s) {
        if (ch == '/' && !collapsed.empty() && collapsed.back() == '/') continue;
        collapsed.push_back(ch);
    }
    while (!collapsed.empty() && collapsed.back() == '/') collapsed.pop_back();

    NormalizedValue out;
    out.canonical = collapsed;

    std::string cur;
    std::vector<std::string> raw_tokens;
    for (char ch : collapsed) {
        if (is_separator(ch)) {
            if (!cur.empty()) raw_tokens.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) raw_tokens.push_back(cur);

    const bool keep_versions = version_bearing(ct);
    for (auto& tok : raw_tokens) {
        std::string lowered = tok;
        std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                       [](unsigned char ch) { return std::tolower(ch); });
        if (kStoplist.count(tok) > 0) continue;
        if (versionish(lowered)) {
            if (!keep_versions) continue;
        } else if (tok.size() < 2) {
            continue;
        }
        out.tokens.push_back(tok);
        if (out.head.empty() && !versionish(lowered) &&
            std::isalpha(static_cast<unsigned char>(tok[0]))) {
            out.head = tok;
        }
    }
    return out;
}

namespace {

// Substring acceptance for EXACT: the shorter canonical sits inside the longer
// with both boundaries on a separator (or the string edge).
bool separator_aligned_substring(const std::string& needle, const std::string& hay) {
    if (needle.empty() || hay.empty() || needle.size() > hay.size()) return false;
    std::size_t pos = hay.find(needle);
    while (pos != std::string::npos) {
        bool left_ok = pos == 0 || is_separator(hay[pos - 1]);
        std::size_t end = pos + needle.size();
        bool right_ok = end == hay.size() || is_separator(hay[end]);
        if (left_ok && right_ok) return true;
        pos = hay.find(needle, pos + 1);
    }
    return false;
}

}  // namespace

MatchResult match(const ContractRecord& c, const DriftEvent& d) {
    MatchResult result;
    if (c.role == Role::INCIDENTAL) return result;
    if (!compatible(c.contract_type, d.drift_type)) return result;

    NormalizedValue v = normalize(c.contract_type, c.value);
    NormalizedValue o = normalize(c.contract_type, d.old_value);

    std::set<std::string> o_set(o.tokens.begin(), o.tokens.end());
    std::set<std::string> seen;
    for (const auto& tok : v.tokens) {
        if (o_set.count(tok) && seen.insert(tok).second) {
            result.shared_tokens.push_back(tok);
        }
    }

    const bool exact_equal = !v.canonical.empty() && v.canonical == o.canonical;
    const bool exact_sub = separator_aligned_substring(v.canonical, o.canonical) ||
                           separator_aligned_substring(o.canonical, v.canonical);
    if (exact_equal || exact_sub) {
        result.matched = true;
        result.level = MatchLevel::EXACT;
        return result;
    }
    if (result.shared_tokens.size() >= 2) {
        result.matched = true;
        result.level = MatchLevel::TOK2;
        return result;
    }
    if (result.shared_tokens.size() == 1 && version_bearing(c.contract_type) &&
        !v.head.empty() && v.head == o.head && result.shared_tokens[0] == v.head) {
        result.matched = true;
        result.level = MatchLevel::TYPED1;
        return result;
    }
    return result;
}

}  // namespace driftmon
