#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "driftmon/mention_extractor.hpp"

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

SkillDocument make_doc(const std::string& text) {
    SkillDocument doc;
    doc.id = "synthetic";
    doc.text = text;
    return doc;
}

const std::vector<std::string> kAllSkills = {
    "deploy-web-service", "python-data-pipeline", "container-release", "cloud-infra",
    "node-frontend",      "auth-rotation",        "git-release-train", "monitoring-stack",
};

using Key = std::tuple<PatternFamily, std::size_t, std::size_t>;

std::multiset<Key> keys_of(const std::vector<Mention>& ms) {
    std::multiset<Key> out;
    for (const auto& m : ms) out.insert({m.family, m.span.start, m.span.end});
    return out;
}

bool base_family(PatternFamily f) {
    return static_cast<std::size_t>(f) < kBaseFamilyCount;
}

// (family, value, context) triples; order matters.
using Row = std::tuple<PatternFamily, std::string, ContextKind>;

std::vector<Row> rows_of(const std::vector<Mention>& ms) {
    std::vector<Row> out;
    for (const auto& m : ms) out.push_back({m.family, m.value, m.context});
    return out;
}

bool has_row(const std::vector<Mention>& ms, PatternFamily f, const std::string& value,
             ContextKind ctx) {
    for (const auto& m : ms)
        if (m.family == f && m.value == value && m.context == ctx) return true;
    return false;
}

bool has_value(const std::vector<Mention>& ms, PatternFamily f, const std::string& value) {
    for (const auto& m : ms)
        if (m.family == f && m.value == value) return true;
    return false;
}

}  // namespace

TEST_CASE("mentions are sorted, spans index the text, lines count newlines") {
    for (const auto& name : kAllSkills) {
        auto doc = load_skill(name);
        auto ms = extract_mentions(doc, ExtractMode::FULL15);
        CHECK(!ms.empty());
        for (std::size_t i = 1; i < ms.size(); ++i)
            CHECK(ms[i - 1].span.start <= ms[i].span.start);
        for (const auto& m : ms) {
            REQUIRE(m.span.end <= doc.text.size());
            REQUIRE(m.span.start < m.span.end);
            CHECK(m.raw == doc.text.substr(m.span.start, m.span.end - m.span.start));
            std::size_t newlines =
                std::count(doc.text.begin(), doc.text.begin() + m.span.start, '\n');
            CHECK(m.line == newlines + 1);
        }
    }
}

TEST_CASE("extraction is deterministic") {
    for (const auto& name : kAllSkills) {
        auto doc = load_skill(name);
        auto a = extract_mentions(doc, ExtractMode::FULL15);
        auto b = extract_mentions(doc, ExtractMode::FULL15);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].family == b[i].family);
            CHECK(a[i].span == b[i].span);
            CHECK(a[i].value == b[i].value);
            CHECK(a[i].context == b[i].context);
        }
    }
}

TEST_CASE("base-7 output is exactly the base-family slice of full-15") {
    for (const auto& name : kAllSkills) {
        auto doc = load_skill(name);
        auto base = extract_mentions(doc, ExtractMode::BASE7);
        auto full = extract_mentions(doc, ExtractMode::FULL15);
        for (const auto& m : base) CHECK(base_family(m.family));
        std::multiset<Key> full_base_slice;
        for (const auto& m : full)
            if (base_family(m.family)) full_base_slice.insert({m.family, m.span.start, m.span.end});
        CHECK(keys_of(base) == full_base_slice);
    }
}

TEST_CASE("all fifteen families fire somewhere in the fixture set") {
    std::set<PatternFamily> seen;
    for (const auto& name : kAllSkills) {
        auto doc = load_skill(name);
        for (const auto& m : extract_mentions(doc, ExtractMode::FULL15)) seen.insert(m.family);
    }
    CHECK(seen.size() == kPatternFamilyCount);
}

TEST_CASE("deploy-web-service full mention sequence") {
    auto doc = load_skill("deploy-web-service");
    auto ms = extract_mentions(doc, ExtractMode::FULL15);
    std::vector<Row> expected = {
        {PatternFamily::URL, "https://img.shields.io/badge/build-passing-brightgreen",
         ContextKind::BADGE_OR_IMAGE},
        {PatternFamily::URL, "https://ci.example.com/pipelines/web", ContextKind::PROSE},
        {PatternFamily::VERSION_CONSTRAINT, "requests==2.28.0", ContextKind::CODE_FENCE},
        {PatternFamily::VERSION_CONSTRAINT, "urllib3==1.26.15", ContextKind::CODE_FENCE},
        {PatternFamily::ENV_VAR, "DEPLOY_ENV", ContextKind::CODE_FENCE},
        {PatternFamily::ENV_VAR, "API_TOKEN", ContextKind::CODE_FENCE},
        {PatternFamily::URL, "https://api.internal.example.com/v1/deployments",
         ContextKind::PROSE},
        {PatternFamily::URL, "https://artifacts.internal.example.com/store/", ContextKind::PROSE},
        {PatternFamily::AUTH_PATTERN, "Authorization: Bearer $API_TOKEN",
         ContextKind::CODE_FENCE},
        {PatternFamily::ENV_VAR, "API_TOKEN", ContextKind::CODE_FENCE},
        {PatternFamily::URL, "https://api.internal.example.com/v1/whoami",
         ContextKind::CODE_FENCE},
        {PatternFamily::CLI_FLAG, "--environment", ContextKind::CODE_FENCE},
        {PatternFamily::CLI_FLAG, "--confirm-plan", ContextKind::CODE_FENCE},
        {PatternFamily::CLI_FLAG, "--max-surge", ContextKind::CODE_FENCE},
        {PatternFamily::API_PATH, "GET /v1/deployments/{id}", ContextKind::INLINE_CODE},
        {PatternFamily::API_PATH, "/v1/deployments/{id}", ContextKind::INLINE_CODE},
        {PatternFamily::URL, "https://web.internal.example.com/healthz", ContextKind::INLINE_CODE},
        {PatternFamily::CLI_FLAG, "--follow", ContextKind::INLINE_CODE},
        {PatternFamily::URL, "https://grafana.internal.example.com/d/web", ContextKind::PROSE},
        {PatternFamily::CLI_FLAG, "--to-last-good", ContextKind::INLINE_CODE},
        {PatternFamily::CONFIG_FILENAME, "rollback.yaml", ContextKind::INLINE_CODE},
    };
    CHECK(rows_of(ms) == expected);
}

TEST_CASE("fixture spot checks across families") {
    auto pipeline = extract_mentions(load_skill("python-data-pipeline"), ExtractMode::FULL15);
    CHECK(has_row(pipeline, PatternFamily::VERSION_CONSTRAINT, "pandas>=1.5.3,<2",
                  ContextKind::CODE_FENCE));
    CHECK(has_row(pipeline, PatternFamily::IMPORT, "pandas", ContextKind::CODE_FENCE));
    CHECK(has_row(pipeline, PatternFamily::IMPORT, "ingest.io", ContextKind::CODE_FENCE));
    CHECK(has_row(pipeline, PatternFamily::CONFIG_FILENAME, "pipeline.toml",
                  ContextKind::INLINE_CODE));
    CHECK(has_row(pipeline, PatternFamily::BARE_SEMVER, "python 3.9.16", ContextKind::PROSE));
    // "pandas 2.0.3" sits in prose but pandas is not a tool name, so no
    // bare-semver mention carries it.
    CHECK(!has_value(pipeline, PatternFamily::BARE_SEMVER, "pandas 2.0.3"));
    CHECK(!has_value(pipeline, PatternFamily::BARE_SEMVER, "2.0.3"));

    auto container = extract_mentions(load_skill("container-release"), ExtractMode::FULL15);
    CHECK(has_row(container, PatternFamily::GITHUB_ACTION, "actions/checkout@v3",
                  ContextKind::CODE_FENCE));
    CHECK(has_row(container, PatternFamily::DOCKER_IMAGE_TAGGED,
                  "registry.example.com/platform/worker:2.4.1", ContextKind::CODE_FENCE));
    CHECK(has_row(container, PatternFamily::DOCKER_IMAGE, "python:3.11-slim",
                  ContextKind::CODE_FENCE));
    CHECK(has_row(container, PatternFamily::GIT_BRANCH, "origin/main", ContextKind::CODE_FENCE));
    CHECK(has_row(container, PatternFamily::GIT_BRANCH, "refs/heads/release",
                  ContextKind::INLINE_CODE));
    CHECK(has_row(container, PatternFamily::BARE_SEMVER, "docker 24.0.7", ContextKind::PROSE));

    auto cloud = extract_mentions(load_skill("cloud-infra"), ExtractMode::FULL15);
    CHECK(has_row(cloud, PatternFamily::ENV_VAR, "TF_VAR_OWNER", ContextKind::CODE_FENCE));
    CHECK(has_row(cloud, PatternFamily::CLOUD_REGION, "us-east-1", ContextKind::CODE_FENCE));
    CHECK(has_row(cloud, PatternFamily::CLOUD_REGION, "europe-west1", ContextKind::PROSE));
    CHECK(has_row(cloud, PatternFamily::BARE_SEMVER, "terraform 1.5.7",
                  ContextKind::INLINE_CODE));
    CHECK(has_row(cloud, PatternFamily::BARE_SEMVER, "terraform 1.4.6", ContextKind::PROSE));

    auto node = extract_mentions(load_skill("node-frontend"), ExtractMode::FULL15);
    CHECK(has_row(node, PatternFamily::NPM_AT_VERSION, "react@18.2.0", ContextKind::CODE_FENCE));
    CHECK(has_row(node, PatternFamily::NPM_AT_VERSION, "@types/node@18.16.3",
                  ContextKind::CODE_FENCE));
    CHECK(has_row(node, PatternFamily::IMPORT, "express", ContextKind::CODE_FENCE));
    CHECK(has_row(node, PatternFamily::BARE_SEMVER, "npm 10.2.4", ContextKind::PROSE));

    auto auth = extract_mentions(load_skill("auth-rotation"), ExtractMode::FULL15);
    CHECK(has_row(auth, PatternFamily::API_PATH, "POST /oauth2/token", ContextKind::CODE_FENCE));
    CHECK(has_row(auth, PatternFamily::AUTH_PATTERN, "Authorization: Basic $CLIENT_CREDS",
                  ContextKind::CODE_FENCE));
    CHECK(has_row(auth, PatternFamily::AUTH_PATTERN, "--token $NEW_TOKEN",
                  ContextKind::CODE_FENCE));
    CHECK(has_row(auth, PatternFamily::AUTH_PATTERN, "Authorization: Bearer $OLD_TOKEN",
                  ContextKind::INLINE_CODE));

    auto git = extract_mentions(load_skill("git-release-train"), ExtractMode::FULL15);
    CHECK(has_row(git, PatternFamily::GIT_BRANCH, "origin/develop", ContextKind::CODE_FENCE));
    CHECK(has_row(git, PatternFamily::GIT_BRANCH, "refs/heads/release-next", ContextKind::PROSE));
    CHECK(has_row(git, PatternFamily::BARE_SEMVER, "v2.7.3", ContextKind::INLINE_CODE));

    auto mon = extract_mentions(load_skill("monitoring-stack"), ExtractMode::FULL15);
    CHECK(has_row(mon, PatternFamily::DOCKER_IMAGE, "prom/blackbox-exporter:v0.24.0",
                  ContextKind::CODE_FENCE));
    CHECK(has_row(mon, PatternFamily::URL, "https://grafana.com/dashboards/1860",
                  ContextKind::PROSE));
    CHECK(has_row(mon, PatternFamily::BARE_SEMVER, "kubectl 1.28.4", ContextKind::INLINE_CODE));
}

TEST_CASE("versioned api paths inside urls are not double-reported") {
    auto doc = load_skill("deploy-web-service");
    auto ms = extract_mentions(doc, ExtractMode::FULL15);
    std::vector<Span> url_spans;
    for (const auto& m : ms)
        if (m.family == PatternFamily::URL) url_spans.push_back(m.span);
    for (const auto& m : ms) {
        if (m.family != PatternFamily::API_PATH) continue;
        for (const auto& u : url_spans) {
            bool inside = m.span.start >= u.start && m.span.end <= u.end;
            CHECK(!inside);
        }
    }
}

TEST_CASE("classify_context covers every kind") {
    std::string text =
        "# Deploy guide\n"
        "\n"
        "Plain prose with [a link](https://example.com/x) here.\n"
        "![badge](https://img.example.com/b.svg)\n"
        "<!-- internal note: https://hidden.example.com/y -->\n"
        "Inline `curl https://api.example.com/z` touch.\n"
        "\n"
        "```bash\n"
        "export MODE=prod\n"
        "```\n";
    auto doc = make_doc(text);

    auto at = [&](const std::string& needle) {
        std::size_t pos = text.find(needle);
        REQUIRE(pos != std::string::npos);
        return Span{pos, pos + needle.size()};
    };

    CHECK(classify_context(doc, at("Deploy guide")) == ContextKind::HEADING);
    CHECK(classify_context(doc, at("a link")) == ContextKind::LINK_LABEL);
    CHECK(classify_context(doc, at("https://img.example.com/b.svg")) ==
          ContextKind::BADGE_OR_IMAGE);
    CHECK(classify_context(doc, at("https://hidden.example.com/y")) == ContextKind::COMMENT);
    CHECK(classify_context(doc, at("https://api.example.com/z")) == ContextKind::INLINE_CODE);
    CHECK(classify_context(doc, at("MODE")) == ContextKind::CODE_FENCE);
    CHECK(classify_context(doc, at("Plain prose")) == ContextKind::PROSE);

    CHECK_THROWS_AS(classify_context(doc, Span{0, text.size() + 1}), Error);
    try {
        classify_context(doc, Span{5, 3});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == "SPAN_OUT_OF_RANGE");
    }
}

TEST_CASE("url extraction stops before closing punctuation") {
    auto doc = make_doc("See (https://example.com/a) and <https://example.com/b> or "
                        "[x](https://example.com/c).\n");
    auto ms = extract_mentions(doc, ExtractMode::BASE7);
    REQUIRE(ms.size() == 3);
    CHECK(ms[0].value == "https://example.com/a");
    CHECK(ms[1].value == "https://example.com/b");
    CHECK(ms[2].value == "https://example.com/c");
}

TEST_CASE("version constraints keep comma continuations") {
    auto doc = make_doc("```\npandas>=1.5.3,<2.1\nscipy~=1.10\nflask >= 2.0\n```\n");
    auto ms = extract_mentions(doc, ExtractMode::BASE7);
    CHECK(has_value(ms, PatternFamily::VERSION_CONSTRAINT, "pandas>=1.5.3,<2.1"));
    CHECK(has_value(ms, PatternFamily::VERSION_CONSTRAINT, "scipy~=1.10"));
}

TEST_CASE("imports: python and node forms") {
    auto doc = make_doc("```python\nimport numpy\nfrom sklearn.linear_model import Ridge\n```\n"
                        "```js\nconst pg = require('pg');\n```\n");
    auto ms = extract_mentions(doc, ExtractMode::BASE7);
    CHECK(has_value(ms, PatternFamily::IMPORT, "numpy"));
    CHECK(has_value(ms, PatternFamily::IMPORT, "sklearn.linear_model"));
    CHECK(has_value(ms, PatternFamily::IMPORT, "pg"));
}

TEST_CASE("env var reference and assignment forms") {
    auto doc = make_doc("```\nexport AWS_PROFILE=ops\necho $DB_HOST and ${CACHE_URL}\n```\n");
    auto ms = extract_mentions(doc, ExtractMode::FULL15);
    CHECK(has_value(ms, PatternFamily::ENV_VAR, "AWS_PROFILE"));
    CHECK(has_value(ms, PatternFamily::ENV_VAR, "DB_HOST"));
    CHECK(has_value(ms, PatternFamily::ENV_VAR, "CACHE_URL"));
}

TEST_CASE("docker image forms: command, compose key, registry-qualified") {
    auto doc = make_doc("```\ndocker pull redis:7.2\ndocker run --rm -p 80:80 nginx:1.25\n"
                        "image: \"postgres:15-alpine\"\n"
                        "docker pull ghcr.example.com/team/app:2.0.0\n```\n");
    auto ms = extract_mentions(doc, ExtractMode::FULL15);
    CHECK(has_value(ms, PatternFamily::DOCKER_IMAGE, "redis:7.2"));
    CHECK(has_value(ms, PatternFamily::DOCKER_IMAGE, "nginx:1.25"));
    CHECK(has_value(ms, PatternFamily::DOCKER_IMAGE, "postgres:15-alpine"));
    CHECK(has_value(ms, PatternFamily::DOCKER_IMAGE_TAGGED, "ghcr.example.com/team/app:2.0.0"));
}

TEST_CASE("github actions, quoted or not") {
    auto doc = make_doc("```yaml\nsteps:\n  - uses: actions/setup-node@v4\n"
                        "  - uses: \"docker/login-action@v3.1.0\"\n```\n");
    auto ms = extract_mentions(doc, ExtractMode::BASE7);
    CHECK(has_value(ms, PatternFamily::GITHUB_ACTION, "actions/setup-node@v4"));
    CHECK(has_value(ms, PatternFamily::GITHUB_ACTION, "docker/login-action@v3.1.0"));
}

TEST_CASE("npm at-version needs a clean left boundary") {
    auto doc = make_doc("```\nnpm install lodash@4.17.21 @scope/pkg@2.0.0\n"
                        "user@host.example.com stays out\n```\n");
    auto ms = extract_mentions(doc, ExtractMode::FULL15);
    CHECK(has_value(ms, PatternFamily::NPM_AT_VERSION, "lodash@4.17.21"));
    CHECK(has_value(ms, PatternFamily::NPM_AT_VERSION, "@scope/pkg@2.0.0"));
    CHECK(!has_value(ms, PatternFamily::NPM_AT_VERSION, "host.example.com"));
}

TEST_CASE("bare semver needs a v prefix or a nearby tool name") {
    auto doc = make_doc("Upgrade terraform 1.6.2 first. The budget grew 3.5.1 percent.\n"
                        "Release `v1.9.0` is tagged. Version 2.28.0 of requests predates it.\n");
    auto ms = extract_mentions(doc, ExtractMode::FULL15);
    CHECK(has_value(ms, PatternFamily::BARE_SEMVER, "terraform 1.6.2"));
    CHECK(has_value(ms, PatternFamily::BARE_SEMVER, "v1.9.0"));
    std::size_t semvers = 0;
    for (const auto& m : ms)
        if (m.family == PatternFamily::BARE_SEMVER) ++semvers;
    CHECK(semvers == 2);
}

TEST_CASE("cli flags fire only in code contexts") {
    auto doc = make_doc("Pass the --force flag in prose and `--retries` in code.\n"
                        "```\ntool --verbose run\n```\n");
    auto ms = extract_mentions(doc, ExtractMode::FULL15);
    CHECK(!has_value(ms, PatternFamily::CLI_FLAG, "--force"));
    CHECK(has_value(ms, PatternFamily::CLI_FLAG, "--retries"));
    CHECK(has_value(ms, PatternFamily::CLI_FLAG, "--verbose"));
}

TEST_CASE("config filenames respect word boundaries") {
    auto doc = make_doc("Edit `pyproject.toml` and `ops/values.yaml`; mypackage.json is not a "
                        "config file.\n");
    auto ms = extract_mentions(doc, ExtractMode::FULL15);
    CHECK(has_value(ms, PatternFamily::CONFIG_FILENAME, "pyproject.toml"));
    CHECK(has_value(ms, PatternFamily::CONFIG_FILENAME, "ops/values.yaml"));
    for (const auto& m : ms)
        if (m.family == PatternFamily::CONFIG_FILENAME) CHECK(m.value != "mypackage.json");
}

TEST_CASE("cloud regions: aws and gcp spellings") {
    auto doc = make_doc("```\naws configure set region ap-southeast-2\n"
                        "gcloud config set compute/region europe-north1\n```\n");
    auto ms = extract_mentions(doc, ExtractMode::FULL15);
    CHECK(has_value(ms, PatternFamily::CLOUD_REGION, "ap-southeast-2"));
    CHECK(has_value(ms, PatternFamily::CLOUD_REGION, "europe-north1"));
}

TEST_CASE("git branch forms") {
    auto doc = make_doc("```\ngit push origin/feature-x\ngit update-ref refs/heads/main abc\n"
                        "git checkout -b hotfix\n```\n");
    auto ms = extract_mentions(doc, ExtractMode::FULL15);
    CHECK(has_value(ms, PatternFamily::GIT_BRANCH, "origin/feature-x"));
    CHECK(has_value(ms, PatternFamily::GIT_BRANCH, "refs/heads/main"));
}

TEST_CASE("auth patterns: header, bearer, token flag, oauth path") {
    auto doc = make_doc("```\ncurl -H 'Authorization: Bearer abc123'\n"
                        "login --token sekrit\nPOST /oauth2/device/code\n```\n");
    auto ms = extract_mentions(doc, ExtractMode::BASE7);
    CHECK(has_value(ms, PatternFamily::AUTH_PATTERN, "Authorization: Bearer abc123"));
    CHECK(has_value(ms, PatternFamily::AUTH_PATTERN, "--token sekrit"));
    CHECK(has_value(ms, PatternFamily::AUTH_PATTERN, "/oauth2/device/code"));
}

TEST_CASE("empty and mention-free documents extract nothing") {
    CHECK(extract_mentions(make_doc(""), ExtractMode::FULL15).empty());
    CHECK(extract_mentions(make_doc("# Notes\n\nNothing operational here.\n"),
                           ExtractMode::FULL15)
              .empty());
}
