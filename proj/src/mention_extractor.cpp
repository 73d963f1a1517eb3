#include "driftmon/mention_extractor.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

namespace driftmon {

namespace {

struct Region {
    std::size_t start;
    std::size_t end;  // half-open
    bool contains(std::size_t pos) const { return pos >= start && pos < end; }
};

struct LineInfo {
    std::size_t start;
    std::size_t end;  // excludes the newline
    std::size_t number;
    bool in_fence;
    bool fence_comment;  // line inside a fence whose first non-space chars are # or //
    bool heading;
};

// Layout facts computed once per document: fence regions, html comments,
// inline code spans, image/link syntax, headings.
struct DocumentMap {
    std::vector<LineInfo> lines;
    std::vector<Region> fences;
    std::vector<Region> html_comments;
    std::vector<Region> inline_code;
    std::vector<Region> images;
    std::vector<Region> links;

    const LineInfo& line_at(std::size_t pos) const {
        auto it = std::upper_bound(lines.begin(), lines.end(), pos,
                                   [](std::size_t p, const LineInfo& li) { return p < li.start; });
        if (it == lines.begin()) return lines.front();
        return *(it - 1);
    }

    bool in_any(const std::vector<Region>& rs, std::size_t pos) const {
        for (const auto& r : rs) {
            if (r.contains(pos)) return true;
        }
        return false;
    }
};

bool starts_with(const std::string& s, std::size_t pos, const char* lit) {
    std::size_t n = std::char_traits<char>::length(lit);
    return s.compare(pos, n, lit) == 0;
}

DocumentMap build_map(const std::string& text) {
    DocumentMap map;

    // Lines + fence tracking.
    std::size_t pos = 0;
    std::size_t lineno = 1;
    bool in_fence = false;
    std::string fence_marker;
    std::size_t fence_start = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::size_t end = eol == std::string::npos ? text.size() : eol;
        std::string_view line(text.data() + pos, end - pos);

        std::size_t indent = 0;
        while (indent < line.size() && (line[indent] == ' ' || line[indent] == '\t')) ++indent;
        std::string_view body = line.substr(indent);

        bool fence_line = indent <= 3 && (body.rfind("```", 0) == 0 || body.rfind("~~~", 0) == 0);
        LineInfo li;
        li.start = pos;
        li.end = end;
        li.number = lineno;
        li.heading = false;
        li.fence_comment = false;

        if (fence_line && !in_fence) {
            in_fence = true;
            fence_marker = std::string(body.substr(0, 3));
            fence_start = pos;
            li.in_fence = true;
        } else if (fence_line && in_fence && body.rfind(fence_marker, 0) == 0) {
            in_fence = false;
            li.in_fence = true;
            map.fences.push_back({fence_start, end});
        } else {
            li.in_fence = in_fence;
            if (in_fence) {
                li.fence_comment = !body.empty() &&
                                   (body[0] == '#' || body.rfind("//", 0) == 0);
            } else {
                std::size_t hashes = 0;
                while (hashes < body.size() && body[hashes] == '#') ++hashes;
                li.heading = hashes >= 1 && hashes <= 6 && hashes < body.size() &&
                             (body[hashes] == ' ' || body[hashes] == '\t');
            }
        }
        map.lines.push_back(li);

        if (eol == std::string::npos) break;
        pos = eol + 1;
        ++lineno;
    }
    if (in_fence) map.fences.push_back({fence_start, text.size()});  // unterminated fence

    // HTML comments (may span lines).
    std::size_t c = 0;
    while ((c = text.find("<!--", c)) != std::string::npos) {
        std::size_t close = text.find("-->", c + 4);
        std::size_t cend = close == std::string::npos ? text.size() : close + 3;
        map.html_comments.push_back({c, cend});
        c = cend;
    }

    auto in_fence_at = [&](std::size_t p) { return map.in_any(map.fences, p); };

    // Inline code: backtick pairs outside fences, per line.
    for (const auto& li : map.lines) {
        if (li.in_fence) continue;
        std::size_t i = li.start;
        while (i < li.end) {
            if (text[i] != '`') {
                ++i;
                continue;
            }
            std::size_t ticks = 0;
            while (i + ticks < li.end && text[i + ticks] == '`') ++ticks;
            std::string delim(ticks, '`');
            std::size_t close = text.find(delim, i + ticks);
            if (close == std::string::npos || close >= li.end) {
                i += ticks;
                continue;
            }
            map.inline_code.push_back({i, close + ticks});
            i = close + ticks;
        }
    }

    // Images ![alt](target) and links [label](target), outside fences.
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '[') continue;
        if (in_fence_at(i)) continue;
        bool image = i > 0 && text[i - 1] == '!';
        std::size_t close_bracket = text.find(']', i);
        if (close_bracket == std::string::npos) continue;
        if (close_bracket + 1 >= text.size() || text[close_bracket + 1] != '(') continue;
        std::size_t close_paren = text.find(')', close_bracket + 2);
        if (close_paren == std::string::npos) continue;
        Region r{image ? i - 1 : i, close_paren + 1};
        if (image) {
            map.images.push_back(r);
        } else {
            map.links.push_back(r);
        }
    }
    return map;
}

ContextKind classify(const DocumentMap& map, std::size_t pos) {
    const LineInfo& li = map.line_at(pos);
    if (li.in_fence) {
        if (li.fence_comment) return ContextKind::COMMENT;
        if (map.in_any(map.html_comments, pos)) return ContextKind::COMMENT;
        return ContextKind::CODE_FENCE;
    }
    if (map.in_any(map.inline_code, pos)) return ContextKind::INLINE_CODE;
    if (map.in_any(map.images, pos)) return ContextKind::BADGE_OR_IMAGE;
    if (map.in_any(map.links, pos)) return ContextKind::LINK_LABEL;
    if (li.heading) return ContextKind::HEADING;
    if (map.in_any(map.html_comments, pos)) return ContextKind::COMMENT;
    return ContextKind::PROSE;
}

struct Hit {
    PatternFamily family;
    std::size_t start;
    std::size_t end;
    std::string value;  // empty means use the raw text
};

using Hits = std::vector<Hit>;

bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Run re over [line_start, line_end) and call fn with absolute offsets of the
// whole match plus the std::smatch for group access.
template <typename Fn>
void scan_line(const std::string& text, std::size_t line_start, std::size_t line_end,
               const std::regex& re, Fn&& fn) {
    std::string line = text.substr(line_start, line_end - line_start);
    auto begin = std::sregex_iterator(line.begin(), line.end(), re);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        fn(line_start + static_cast<std::size_t>(it->position(0)),
           line_start + static_cast<std::size_t>(it->position(0)) +
               static_cast<std::size_t>(it->length(0)),
           *it, line);
    }
}

// --- pattern registry -------------------------------------------------------
// Each family's regex is pinned here; tests carry positive and negative lines.

const std::regex& re_url() {
    static const std::regex re(R"(https?://[^\s"'<>`\])]+)");
    return re;
}

const std::regex& re_version_constraint() {
    static const std::regex re(
        R"(([A-Za-z_][A-Za-z0-9._-]*)\s*(==|>=|<=|~=|!=|>|<)\s*v?[0-9][0-9A-Za-z.*+-]*(\s*,\s*(==|>=|<=|~=|!=|>|<)\s*v?[0-9][0-9A-Za-z.*+-]*)*)");
    return re;
}

const std::regex& re_import_py() {
    static const std::regex re(R"(^\s*(?:import\s+([A-Za-z_][\w.]*)|from\s+([A-Za-z_][\w.]*)\s+import\b))");
    return re;
}

const std::regex& re_import_require() {
    static const std::regex re(R"(require\(\s*['"]([^'"]+)['"]\s*\))");
    return re;
}

const std::regex& re_api_path_verb() {
    static const std::regex re(R"(\b(GET|POST|PUT|PATCH|DELETE|HEAD|OPTIONS)\s+(/[\w/{}.:-]+))");
    return re;
}

const std::regex& re_api_path_versioned() {
    static const std::regex re(R"(/v[0-9]+/[\w/{}.-]+)");
    return re;
}

const std::regex& re_auth_header() {
    static const std::regex re(R"(Authorization:\s*[^\s"']+(?:\s+[^\s"']+)?)");
    return re;
}

const std::regex& re_auth_bearer() {
    static const std::regex re(R"(Bearer\s+[<$]?[\w.{}$-]+>?)");
    return re;
}

const std::regex& re_auth_token_flag() {
    static const std::regex re(R"(--token(?:[= ]\S+)?)");
    return re;
}

const std::regex& re_auth_oauth_path() {
    static const std::regex re(R"(/oauth2?(?:/[\w.-]+)+)");
    return re;
}

const std::regex& re_docker_cmd() {
    // The argument skipper hops flags and letterless values (port mappings);
    // the repository part of a real image reference contains a letter.
    static const std::regex re(
        R"(docker\s+(?:pull|run)\s+(?:(?:-{1,2}[\w=./:-]+|[0-9:.]+)\s+)*((?=[0-9_./-]*[a-z])[a-z0-9][\w./-]*:[\w][\w.-]*))");
    return re;
}

const std::regex& re_docker_image_key() {
    static const std::regex re(R"(image:\s*["']?([a-z0-9][\w./-]*:[\w][\w.-]*))");
    return re;
}

const std::regex& re_github_action() {
    static const std::regex re(R"(uses:\s*["']?([\w.-]+/[\w./-]+@[\w.-]+))");
    return re;
}

const std::regex& re_env_ref() {
    static const std::regex re(R"(\$\{?([A-Z][A-Z0-9_]+)\}?)");
    return re;
}

const std::regex& re_env_assign() {
    static const std::regex re(R"((?:^|\s)(?:export\s+)?([A-Z][A-Z0-9_]+)=)");
    return re;
}

const std::regex& re_cloud_region() {
    static const std::regex re(
        R"(\b(?:(?:us|eu|ap|sa|ca|me|af)-(?:gov-)?(?:east|west|north|south|central|northeast|southeast|northwest|southwest)-[0-9]|(?:us|europe|asia|australia|southamerica|northamerica)-(?:east|west|north|south|central|northeast|southeast|northwest|southwest)[0-9])\b)");
    return re;
}

const std::regex& re_cli_flag() {
    static const std::regex re(R"((?:^|[\s'"`])(--[a-z][a-z0-9-]+))");
    return re;
}

const std::regex& re_config_known() {
    static const std::regex re(
        R"((?:[\w.-]+/)*(?:pyproject\.toml|package\.json|package-lock\.json|requirements\.txt|setup\.py|setup\.cfg|tsconfig\.json|Cargo\.toml|go\.mod|Dockerfile|Makefile|\.env|[\w.-]+\.ya?ml|[\w.-]+\.toml|[\w.-]+\.ini))");
    return re;
}

const std::regex& re_npm_at_version() {
    static const std::regex re(R"((@[a-z0-9-][\w.-]*/)?[a-z0-9-][\w.-]*@v?[0-9][\w.-]*)");
    return re;
}

const std::regex& re_git_origin() {
    static const std::regex re(R"(\borigin/[\w./-]+)");
    return re;
}

const std::regex& re_git_refs() {
    static const std::regex re(R"(\brefs/heads/[\w./-]+)");
    return re;
}

const std::regex& re_git_branch_flag() {
    static const std::regex re(R"(--branch[= ]([\w./-]+))");
    return re;
}

const std::regex& re_docker_tagged() {
    static const std::regex re(
        R"([a-z0-9-]+(?:\.[a-z0-9-]+)+(?::[0-9]+)?/[a-z0-9][\w./-]*:[\w][\w.-]*)");
    return re;
}

const std::regex& re_semver_token() {
    static const std::regex re(R"((v[0-9]+\.[0-9]+(?:\.[0-9]+)?|[0-9]+\.[0-9]+\.[0-9]+)\b)");
    return re;
}

const std::set<std::string>& known_tools() {
    static const std::set<std::string> tools = {
        "python", "node",  "nodejs", "terraform", "kubectl", "go",   "golang",
        "rust",   "java",  "ruby",   "postgres",  "postgresql", "redis", "nginx",
        "docker", "npm",   "pip",    "helm",      "git",     "cmake", "gcc", "clang"};
    return tools;
}

bool code_context(ContextKind k) {
    return k == ContextKind::CODE_FENCE || k == ContextKind::INLINE_CODE ||
           k == ContextKind::COMMENT;
}

void extract_line_families(const std::string& text, const LineInfo& li, const DocumentMap& map,
                           ExtractMode mode, Hits& hits) {
    const std::size_t ls = li.start;
    const std::size_t le = li.end;
    if (ls >= le) return;

    scan_line(text, ls, le, re_url(), [&](std::size_t s, std::size_t e, const std::smatch&,
                                          const std::string&) {
        // Trailing sentence punctuation is not part of the URL.
        while (e > s && std::string(".,;:!?").find(text[e - 1]) != std::string::npos) --e;
        hits.push_back({PatternFamily::URL, s, e, ""});
    });

    scan_line(text, ls, le, re_version_constraint(),
              [&](std::size_t s, std::size_t e, const std::smatch&, const std::string&) {
                  // Skip hits glued into a URL or path.
                  if (s > 0 && (text[s - 1] == '/' || text[s - 1] == '.')) return;
                  hits.push_back({PatternFamily::VERSION_CONSTRAINT, s, e, ""});
              });

    scan_line(text, ls, le, re_import_py(),
              [&](std::size_t s, std::size_t e, const std::smatch& m, const std::string&) {
                  if (!code_context(classify(map, s))) return;
                  std::string name = m[1].matched ? m[1].str() : m[2].str();
                  hits.push_back({PatternFamily::IMPORT, s, e, name});
              });
    scan_line(text, ls, le, re_import_require(),
              [&](std::size_t s, std::size_t e, const std::smatch& m, const std::string&) {
                  if (!code_context(classify(map, s))) return;
                  hits.push_back({PatternFamily::IMPORT, s, e, m[1].str()});
              });

    scan_line(text, ls, le, re_api_path_verb(),
              [&](std::size_t s, std::size_t e, const std::smatch& m, const std::string&) {
                  hits.push_back({PatternFamily::API_PATH, s, e, m[1].str() + " " + m[2].str()});
              });
    scan_line(text, ls, le, re_api_path_versioned(),
              [&](std::size_t s, std::size_t e, const std::smatch&, const std::string&) {
                  // The versioned-path rule is for bare paths; URLs carry their own family.
                  if (s > 0 && word_char(text[s - 1])) return;
                  hits.push_back({PatternFamily::API_PATH, s, e, ""});
              });

    scan_line(text, ls, le, re_auth_header(),
              [&](std::size_t s, std::size_t e, const std::smatch&, const std::string&) {
                  hits.push_back({PatternFamily::AUTH_PATTERN, s, e, ""});
              });
    scan_line(text, ls, le, re_auth_bearer(),
              [&](std::size_t s, std::size_t e, const std::smatch&, const std::string&) {
                  // Covered by the Authorization: hit when part of a header line.
                  for (const auto& h : hits) {
                      if (h.family == PatternFamily::AUTH_PATTERN && s >= h.start && e <= h.end)
                          return;
                  }
                  hits.push_back({PatternFamily::AUTH_PATTERN, s, e, ""});
              });
    scan_line(text, ls, le, re_auth_token_flag(),
              [&](std::size_t s, std::size_t e, const std::smatch&, const std::string&) {
                  hits.push_back({PatternFamily::AUTH_PATTERN, s, e, ""});
              });
    scan_line(text, ls, le, re_auth_oauth_path(),
              [&](std::size_t s, std::size_t e, const std::smatch&, const std::string&) {
                  if (s > 0 && word_char(text[s - 1])) return;
                  hits.push_back({PatternFamily::AUTH_PATTERN, s, e, ""});
              });

    scan_line(text, ls, le, re_docker_cmd(),
              [&](std::size_t s, std::size_t e, const std::smatch& m, const std::string& line) {
                  std::size_t vs = ls + static_cast<std::size_t>(m.position(1));
                  (void)line;
                  hits.push_back({PatternFamily::DOCKER_IMAGE, vs,
                                  vs + static_cast<std::size_t>(m.length(1)), m[1].str()});
                  (void)s;
                  (void)e;
              });
    scan_line(text, ls, le, re_docker_image_key(),
              [&](std::size_t s, std::size_t e, const std::smatch& m, const std::string&) {
                  std::size_t vs = ls + static_cast<std::size_t>(m.position(1));
                  hits.push_back({PatternFamily::DOCKER_IMAGE, vs,
                                  vs + static_cast<std::size_t>(m.length(1)), m[1].str()});
                  (void)s;
                  (void)e;
              });

    scan_line(text, ls, le, re_github_action(),
              [&](std::size_t s, std::size_t e, const std::smatch& m, const std::string&) {
                  std::size_t vs = ls + static_cast<std::size_t>(m.position(1));
                  hits.push_back({PatternFamily::GITHUB_ACTION, vs,
                                  vs + static_cast<std::size_t>(m.length(1)), m[1].str()});
                  (void)s;
                  (void)e;
              });

    if (mode == ExtractMode::BASE7) return;

    scan_line(text, ls, le, re_env_ref(),
              [&](std::size_t s, std::size_t e, const std::smatch& m, const std::string&) {
                  hits.push_back({PatternFamily::ENV_VAR, s, e, m[1].str()});
              });
    scan_line(text, ls, le, re_env_assign(),
              [&](std::size_t s, std::size_t e, const std::smatch& m, const std::string&) {
                  std::size_t vs = ls + static_cast<std::size_t>(m.position(1));
                  hits.push_back({PatternFamily::ENV_VAR, vs,
                                  vs + static_cast<std::size_t>(m.length(1)), m[1].str()});
                  (void)s;
                  (void)e;
              });

    scan_line(text, ls, le, re_cloud_region(),
              [&](std::size_t s, std::size_t e, const std::smatch&, const std::string&) {
                  hits.push_back({PatternFamily::CLOUD_REGION, s, e, ""});
              });

    scan_line(text, ls, le, re_cli_flag(),
              [&](std::size_t s, std::size_t e, const std::smatch& m, const std::string&) {
                  std::size_t vs = ls + static_cast<std::size_t>(m.position(1));
                  if (!code_context(classify(map, vs))) return;
                  hits.push_back({PatternFamily::CLI_FLAG, vs,
                                  vs + static_cast<std::size_t>(m.length(1)), m[1].str()});
                  (void)s;
                  (void)e;
              });

    scan_line(text, ls, le, re_config_known(),
              [&](std::size_t s, std::size_t e, const std::smatch&, const std::string&) {
                  if (s > 0 && (word_char(text[s - 1]) || text[s - 1] == '/' || text[s - 1] == '.'))
                      return;
                  if (e < le && word_char(text[e])) return;
                  hits.push_back({PatternFamily::CONFIG_FILENAME, s, e, ""});
              });

    scan_line(text, ls, le, re_npm_at_version(),
              [&](std::size_t s, std::size_t e, const std::smatch&, const std::string&) {
                  // Reject tails of slash-paths (actions/checkout@v4 belongs to
                  // GITHUB_ACTION) unless the match is itself scoped.
                  if (text[s] != '@' && s > 0 &&
                      (word_char(text[s - 1]) || text[s - 1] == '/' || text[s - 1] == '@' ||
                       text[s - 1] == '.' || text[s - 1] == '-'))
                      return;
                  hits.push_back({PatternFamily::NPM_AT_VERSION, s, e, ""});
              });

    scan_line(text, ls, le, re_git_origin(),
              [&](std::size_t s, std::size_t e, const std::smatch&, const std::string&) {
                  hits.push_back({PatternFamily::GIT_BRANCH, s, e, ""});
              });
    scan_line(text, ls, le, re_git_refs(),
              [&](std::size_t s, std::size_t e, const std::smatch&, const std::string&) {
                  hits.push_back({PatternFamily::GIT_BRANCH, s, e, ""});
              });
    scan_line(text, ls, le, re_git_branch_flag(),
              [&](std::size_t s, std::size_t e, const std::smatch& m, const std::string&) {
                  hits.push_back({PatternFamily::GIT_BRANCH, s, e, m[1].str()});
              });

    scan_line(text, ls, le, re_docker_tagged(),
              [&](std::size_t s, std::size_t e, const std::smatch&, const std::string&) {
                  if (s > 0 && (word_char(text[s - 1]) || text[s - 1] == '/')) return;
                  hits.push_back({PatternFamily::DOCKER_IMAGE_TAGGED, s, e, ""});
              });

    // BARE_SEMVER: a version token standing on its own; the plain X.Y.Z form
    // additionally needs a known tool name one token away, and the hit then
    // covers both tokens.
    scan_line(text, ls, le, re_semver_token(),
              [&](std::size_t s, std::size_t e, const std::smatch& m, const std::string& line) {
                  char before = s > ls ? text[s - 1] : '\n';
                  if (word_char(before) || before == '.' || before == ':' || before == '@' ||
                      before == '=' || before == '>' || before == '<' || before == '~' ||
                      before == '-' || before == '/')
                      return;
                  char after = e < le ? text[e] : '\n';
                  if (word_char(after) || after == '.' || after == '-' || after == '/') return;

                  bool v_form = m[1].str()[0] == 'v';

                  auto lower_tok = [](std::string t) {
                      for (auto& c : t)
                          c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                      return t;
                  };
                  // Look one whitespace-separated token left and right.
                  std::size_t rel_s = s - ls;
                  std::size_t rel_e = e - ls;
                  std::size_t le_prev = rel_s;
                  while (le_prev > 0 && line[le_prev - 1] == ' ') --le_prev;
                  std::size_t ls_prev = le_prev;
                  while (ls_prev > 0 && !std::isspace(static_cast<unsigned char>(line[ls_prev - 1])) &&
                         line[ls_prev - 1] != '`')
                      --ls_prev;
                  std::string prev = lower_tok(std::string(line.substr(ls_prev, le_prev - ls_prev)));

                  std::size_t ns = rel_e;
                  while (ns < line.size() && line[ns] == ' ') ++ns;
                  std::size_t ne = ns;
                  while (ne < line.size() && !std::isspace(static_cast<unsigned char>(line[ne])) &&
                         line[ne] != '`')
                      ++ne;
                  std::string next = lower_tok(std::string(line.substr(ns, ne - ns)));

                  bool prev_tool = known_tools().count(prev) > 0 && le_prev > 0;
                  bool next_tool = known_tools().count(next) > 0 && ne > ns;

                  if (prev_tool) {
                      hits.push_back({PatternFamily::BARE_SEMVER, ls + ls_prev, e, ""});
                  } else if (next_tool) {
                      hits.push_back({PatternFamily::BARE_SEMVER, s, ls + ne, ""});
                  } else if (v_form) {
                      hits.push_back({PatternFamily::BARE_SEMVER, s, e, ""});
                  }
              });
}

}  // namespace

std::vector<Mention> extract_mentions(const SkillDocument& doc, ExtractMode mode) {
    DocumentMap map = build_map(doc.text);
    Hits hits;
    for (const auto& li : map.lines) {
        extract_line_families(doc.text, li, map, mode, hits);
    }

    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        if (a.start != b.start) return a.start < b.start;
        if (a.end != b.end) return a.end < b.end;
        return static_cast<int>(a.family) < static_cast<int>(b.family);
    });
    hits.erase(std::unique(hits.begin(), hits.end(),
                           [](const Hit& a, const Hit& b) {
                               return a.family == b.family && a.start == b.start && a.end == b.end;
                           }),
               hits.end());

    std::vector<Mention> out;
    out.reserve(hits.size());
    for (const auto& h : hits) {
        Mention m;
        m.family = h.family;
        m.span = Span{h.start, h.end};
        m.raw = doc.text.substr(h.start, h.end - h.start);
        m.value = h.value.empty() ? m.raw : h.value;
        m.line = map.line_at(h.start).number;
        m.context = classify(map, h.start);
        out.push_back(std::move(m));
    }
    return out;
}

ContextKind classify_context(const SkillDocument& doc, const Span& span) {
    if (span.start >= span.end || span.end > doc.text.size()) {
        throw Error("SPAN_OUT_OF_RANGE", "span does not lie within the document");
    }
    DocumentMap map = build_map(doc.text);
    return classify(map, span.start);
}

}  // namespace driftmon
