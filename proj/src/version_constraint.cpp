#include "driftmon/version_constraint.hpp"

#include <algorithm>
#include <cctype>

namespace driftmon {

namespace {

struct ParsedVersion {
    std::vector<long long> parts;
    std::string prerelease;  // empty for a plain release
};

ParsedVersion parse_version(const std::string& s) {
    ParsedVersion v;
    std::string body = s;
    if (!body.empty() && (body[0] == 'v' || body[0] == 'V')) body = body.substr(1);
    std::string pre;
    auto dash = body.find('-');
    if (dash != std::string::npos) {
        pre = body.substr(dash + 1);
        body = body.substr(0, dash);
    }
    std::string cur;
    auto flush = [&]() {
        if (cur.empty()) {
            v.parts.push_back(0);
            return;
        }
        bool digits = std::all_of(cur.begin(), cur.end(), [](char c) {
            return std::isdigit(static_cast<unsigned char>(c));
        });
        if (digits) {
            v.parts.push_back(std::stoll(cur));
        } else {
            // Trailing alpha fragment ("3a1"): numeric prefix, rest to prerelease.
            std::size_t i = 0;
            while (i < cur.size() && std::isdigit(static_cast<unsigned char>(cur[i]))) ++i;
            v.parts.push_back(i == 0 ? 0 : std::stoll(cur.substr(0, i)));
            if (pre.empty()) pre = cur.substr(i);
        }
        cur.clear();
    };
    for (char c : body) {
        if (c == '.') flush();
        else cur += c;
    }
    flush();
    v.prerelease = pre;
    return v;
}

int cmp(const ParsedVersion& a, const ParsedVersion& b) {
    std::size_t n = std::max(a.parts.size(), b.parts.size());
    for (std::size_t i = 0; i < n; ++i) {
        long long x = i < a.parts.size() ? a.parts[i] : 0;
        long long y = i < b.parts.size() ? b.parts[i] : 0;
        if (x != y) return x < y ? -1 : 1;
    }
    if (a.prerelease.empty() != b.prerelease.empty()) {
        return a.prerelease.empty() ? 1 : -1;  // release beats prerelease
    }
    if (a.prerelease != b.prerelease) return a.prerelease < b.prerelease ? -1 : 1;
    return 0;
}

bool version_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '*' ||
           c == '+';
}

// ~=1.2.3 (pip compatible release) and ^/~ (npm) all mean ">= base, < ceiling".
ParsedVersion ceiling_for(const std::string& op, const ParsedVersion& base) {
    ParsedVersion top = base;
    top.prerelease.clear();
    if (op == "~=" || op == "~") {
        // Bump the second-to-last given part (~=2.31.0 → <2.32; ~=2.31 → <3).
        if (top.parts.size() >= 2) {
            top.parts[top.parts.size() - 2] += 1;
            top.parts.back() = 0;
            top.parts.resize(top.parts.size() - 1);
        } else {
            top.parts[0] += 1;
        }
    } else {  // ^
        std::size_t i = 0;
        while (i < top.parts.size() && top.parts[i] == 0) ++i;
        if (i == top.parts.size()) i = 0;
        top.parts[i] += 1;
        top.parts.resize(i + 1);
    }
    return top;
}

}  // namespace

int compare_versions(const std::string& a, const std::string& b) {
    return cmp(parse_version(a), parse_version(b));
}

bool clause_satisfied(const std::string& version, const ConstraintClause& clause) {
    ParsedVersion v = parse_version(version);

    if (clause.op == "==" || clause.op == "!=") {
        bool eq;
        auto star = clause.version.find('*');
        if (star != std::string::npos) {
            // ==2.31.* : compare the given prefix parts only.
            ParsedVersion want = parse_version(clause.version.substr(0, star));
            if (!want.parts.empty() && star > 0 && clause.version[star - 1] == '.') {
                want.parts.pop_back();  // the trailing empty part from "2.31."
            }
            eq = true;
            for (std::size_t i = 0; i < want.parts.size(); ++i) {
                long long x = i < v.parts.size() ? v.parts[i] : 0;
                if (x != want.parts[i]) {
                    eq = false;
                    break;
                }
            }
        } else {
            eq = cmp(v, parse_version(clause.version)) == 0;
        }
        return clause.op == "==" ? eq : !eq;
    }

    ParsedVersion base = parse_version(clause.version);
    int c = cmp(v, base);
    if (clause.op == ">=") return c >= 0;
    if (clause.op == "<=") return c <= 0;
    if (clause.op == ">") return c > 0;
    if (clause.op == "<") return c < 0;
    if (clause.op == "~=" || clause.op == "~" || clause.op == "^") {
        return c >= 0 && cmp(v, ceiling_for(clause.op, base)) < 0;
    }
    return false;
}

bool satisfies(const std::string& version, const ConstraintExpr& expr) {
    return std::all_of(expr.clauses.begin(), expr.clauses.end(),
                       [&](const ConstraintClause& cl) { return clause_satisfied(version, cl); });
}

std::optional<ConstraintExpr> parse_constraint(const std::string& text) {
    std::string s = text;
    // trim
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    if (s.empty()) return std::nullopt;

    // Package name: letters/digits/._- plus an optional @scope/ prefix.
    std::size_t i = 0;
    if (s[0] == '@') {
        ++i;
        while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '-' ||
                                s[i] == '_' || s[i] == '.'))
            ++i;
        if (i >= s.size() || s[i] != '/') return std::nullopt;
        ++i;
    }
    std::size_t name_start = i;
    while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '-' ||
                            s[i] == '_' || s[i] == '.'))
        ++i;
    if (i == name_start) return std::nullopt;
    ConstraintExpr expr;
    expr.name = s.substr(0, i);

    // npm style name@constraint
    bool at_form = i < s.size() && s[i] == '@';
    if (at_form) ++i;

    std::string rest = s.substr(i);
    while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.front())))
        rest.erase(rest.begin());
    if (rest.empty()) return std::nullopt;

    // Comma-separated clauses, each op + version.
    std::string clause_text;
    std::vector<std::string> pieces;
    for (char c : rest) {
        if (c == ',') {
            pieces.push_back(clause_text);
            clause_text.clear();
        } else {
            clause_text += c;
        }
    }
    pieces.push_back(clause_text);

    for (auto piece : pieces) {
        while (!piece.empty() && std::isspace(static_cast<unsigned char>(piece.front())))
            piece.erase(piece.begin());
        while (!piece.empty() && std::isspace(static_cast<unsigned char>(piece.back())))
            piece.pop_back();
        if (piece.empty()) return std::nullopt;

        ConstraintClause cl;
        auto take_op = [&](const char* op) {
            std::size_t n = std::char_traits<char>::length(op);
            if (piece.compare(0, n, op) == 0) {
                cl.op = op;
                piece = piece.substr(n);
                return true;
            }
            return false;
        };
        if (!(take_op("==") || take_op(">=") || take_op("<=") || take_op("~=") ||
              take_op("!=") || take_op("^") || take_op("~") || take_op(">") || take_op("<"))) {
            if (at_form) {
                cl.op = "==";  // name@1.2.3 pins exactly
            } else {
                return std::nullopt;
            }
        }
        while (!piece.empty() && std::isspace(static_cast<unsigned char>(piece.front())))
            piece.erase(piece.begin());
        if (piece.empty() || !std::all_of(piece.begin(), piece.end(), version_char)) {
            return std::nullopt;
        }
        if (!std::isdigit(static_cast<unsigned char>(piece[0])) &&
            !(piece[0] == 'v' && piece.size() > 1 &&
              std::isdigit(static_cast<unsigned char>(piece[1])))) {
            return std::nullopt;
        }
        cl.version = piece;
        expr.clauses.push_back(cl);
    }
    return expr;
}

}  // namespace driftmon
