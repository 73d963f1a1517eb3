#include "driftmon/live_validator.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "driftmon/version_constraint.hpp"

namespace driftmon {

namespace {

using nlohmann::json;

struct UrlParts {
    std::string scheme;
    std::string host;  // lowercase, no port
    std::string port;  // may be empty
    std::string path;  // starts with '/', query stripped
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::optional<UrlParts> parse_url(const std::string& url) {
    UrlParts p;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return std::nullopt;
    p.scheme = lower(url.substr(0, scheme_end));
    if (p.scheme != "http" && p.scheme != "https") return std::nullopt;
    auto rest = url.substr(scheme_end + 3);
    auto path_start = rest.find('/');
    std::string authority = path_start == std::string::npos ? rest : rest.substr(0, path_start);
    p.path = path_start == std::string::npos ? "/" : rest.substr(path_start);
    auto q = p.path.find('?');
    if (q != std::string::npos) p.path.erase(q);
    auto colon = authority.rfind(':');
    if (colon != std::string::npos && colon + 1 < authority.size() &&
        std::isdigit(static_cast<unsigned char>(authority[colon + 1]))) {
        p.port = authority.substr(colon + 1);
        authority.erase(colon);
    }
    if (authority.empty()) return std::nullopt;
    p.host = lower(authority);
    return p;
}

std::string strip_trailing_slash(std::string path) {
    while (path.size() > 1 && path.back() == '/') path.pop_back();
    return path;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string cache_path_for(const std::string& dir, const std::string& url) {
    std::ostringstream name;
    name << std::hex << fnv1a(url) << ".json";
    return (std::filesystem::path(dir) / name.str()).string();
}

long long unix_now() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

// Minimum spacing between bursts keeps per-host pressure bounded without
// threads, so probe order stays deterministic.
std::map<std::string, int>& host_counters() {
    static std::map<std::string, int> counters;
    return counters;
}

void note_request(const std::string& host, const ProbePolicy& policy) {
    int& issued = host_counters()[host];
    ++issued;
    if (policy.per_host_limit > 0 && issued % policy.per_host_limit == 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
}

httplib::Client make_client(const UrlParts& p, const ProbePolicy& policy) {
    std::string base =
        p.scheme + "://" + p.host + (p.port.empty() ? "" : ":" + p.port);
    httplib::Client cli(base);
    cli.set_follow_location(false);
    cli.set_connection_timeout(0, policy.timeout_ms * 1000);
    cli.set_read_timeout(0, policy.timeout_ms * 1000);
    return cli;
}

[[noreturn]] void throw_transport(const httplib::Result& res, const std::string& url) {
    auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
        err == httplib::Error::Write) {
        throw Error("TIMEOUT", "no response from " + url + " within the timeout");
    }
    throw Error("DNS_FAILURE", "could not reach " + url + ": " + httplib::to_string(err));
}

json fetch_json(const std::string& url, const ProbePolicy& policy,
                const httplib::Headers& headers, int* status_out) {
    if (!policy.network_enabled) {
        throw Error("NETWORK_DISABLED", "live probing requires --live");
    }
    auto parts = parse_url(url);
    if (!parts) throw Error("UNSUPPORTED_URL", "not an http(s) url: " + url);
    auto cli = make_client(*parts, policy);
    note_request(parts->host, policy);
    auto res = cli.Get(parts->path, headers);
    if (!res) throw_transport(res, url);
    *status_out = res->status;
    if (res->status == 404) return json();
    if (res->status < 200 || res->status >= 300) {
        throw Error("MALFORMED_REGISTRY_RESPONSE",
                    "unexpected status " + std::to_string(res->status) + " from " + url);
    }
    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) {
        throw Error("MALFORMED_REGISTRY_RESPONSE", "invalid json from " + url);
    }
    return parsed;
}

std::string date_header(const httplib::Result& res) {
    if (res && res->has_header("Date")) return res->get_header_value("Date");
    return "";
}

LiveEvidence evidence_from_cache_file(const std::string& path, long long ttl) {
    std::ifstream in(path);
    if (!in) return LiveEvidence{};
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return LiveEvidence{};
    long long stored = j.value("stored_at", 0LL);
    if (ttl > 0 && unix_now() - stored > ttl) return LiveEvidence{};
    LiveEvidence ev;
    ev.kind = LiveEvidence::Kind::URL_STATUS;
    ev.target = j.value("target", "");
    ev.http_status = j.value("status", 0);
    if (j.contains("redirect_location")) {
        ev.redirect_location = j["redirect_location"].get<std::string>();
    }
    ev.fetched_at = j.value("fetched_at", "");
    ev.from_cache = true;
    return ev;
}

void write_cache_file(const std::string& path, const LiveEvidence& ev) {
    json j;
    j["target"] = ev.target;
    j["status"] = ev.http_status;
    if (ev.redirect_location) j["redirect_location"] = *ev.redirect_location;
    j["fetched_at"] = ev.fetched_at;
    j["stored_at"] = unix_now();
    std::ofstream out(path);
    out << j.dump();
}

std::string registry_base(const ProbePolicy& policy, const std::string& name,
                          const std::string& fallback) {
    auto it = policy.registry_bases.find(name);
    if (it == policy.registry_bases.end()) return fallback;
    auto base = it->second;
    while (!base.empty() && base.back() == '/') base.pop_back();
    return base;
}

LiveEvidence registry_evidence(const std::string& url, RegistryVerdict verdict) {
    LiveEvidence ev;
    ev.kind = LiveEvidence::Kind::REGISTRY_LOOKUP;
    ev.target = url;
    ev.verdict = verdict;
    ev.fetched_at = "";
    return ev;
}

struct DockerRef {
    std::string ns;
    std::string name;
    std::string tag;
};

std::optional<DockerRef> parse_docker_ref(const std::string& value) {
    auto colon = value.rfind(':');
    if (colon == std::string::npos || colon + 1 >= value.size()) return std::nullopt;
    std::string repo = value.substr(0, colon);
    DockerRef ref;
    ref.tag = value.substr(colon + 1);
    auto slash = repo.find('/');
    if (slash == std::string::npos) {
        ref.ns = "library";
        ref.name = repo;
    } else {
        std::string first = repo.substr(0, slash);
        if (first.find('.') != std::string::npos || first.find(':') != std::string::npos) {
            return std::nullopt;  // registry-qualified ref, not a Docker Hub repo
        }
        if (repo.find('/', slash + 1) != std::string::npos) return std::nullopt;
        ref.ns = first;
        ref.name = repo.substr(slash + 1);
    }
    if (ref.name.empty() || ref.tag.empty() || ref.tag.find('/') != std::string::npos) {
        return std::nullopt;
    }
    return ref;
}

bool looks_like_npm_value(const std::string& value) {
    if (value.empty()) return false;
    if (value[0] == '@') return true;  // scoped package
    return value.find('@', 1) != std::string::npos;
}

bool bare_package_name(const std::string& value) {
    if (value.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(value[0])) && value[0] != '_') return false;
    return std::all_of(value.begin(), value.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

std::optional<std::string> pinned_version(const ConstraintExpr& expr) {
    for (const auto& cl : expr.clauses) {
        if (cl.op == "==" && cl.version.find('*') == std::string::npos) return cl.version;
    }
    return std::nullopt;
}

LiveEvidence check_pypi(const std::string& name, const std::optional<std::string>& version,
                        const ProbePolicy& policy) {
    std::string base = registry_base(policy, "pypi", "https://pypi.org");
    std::string url = base + "/pypi/" + name + "/json";
    int status = 0;
    json j = fetch_json(url, policy, {}, &status);
    if (status == 404) return registry_evidence(url, RegistryVerdict::NOT_FOUND);
    if (!j.is_object() || !j.contains("releases") || !j["releases"].is_object()) {
        throw Error("MALFORMED_REGISTRY_RESPONSE", "pypi payload missing releases: " + url);
    }
    if (version) {
        auto& releases = j["releases"];
        if (!releases.contains(*version)) {
            return registry_evidence(url, RegistryVerdict::VERSION_ABSENT);
        }
        auto& files = releases[*version];
        if (files.is_array() && !files.empty()) {
            bool all_yanked = std::all_of(files.begin(), files.end(), [](const json& f) {
                return f.is_object() && f.value("yanked", false);
            });
            if (all_yanked) {
                return registry_evidence(url, RegistryVerdict::YANKED_OR_DEPRECATED);
            }
        }
    }
    return registry_evidence(url, RegistryVerdict::OK);
}

LiveEvidence check_npm(const std::string& value, const ProbePolicy& policy) {
    std::string name = value;
    std::optional<std::string> version;
    auto at = value.rfind('@');
    if (at != std::string::npos && at > 0) {
        name = value.substr(0, at);
        std::string v = value.substr(at + 1);
        if (v.size() > 1 && v[0] == 'v') v.erase(0, 1);
        version = v;
    }
    std::string base = registry_base(policy, "npm", "https://registry.npmjs.org");
    std::string url = base + "/" + name;
    int status = 0;
    json j = fetch_json(url, policy, {}, &status);
    if (status == 404) return registry_evidence(url, RegistryVerdict::NOT_FOUND);
    if (!j.is_object() || !j.contains("versions") || !j["versions"].is_object()) {
        throw Error("MALFORMED_REGISTRY_RESPONSE", "npm payload missing versions: " + url);
    }
    if (version) {
        auto& versions = j["versions"];
        if (!versions.contains(*version)) {
            return registry_evidence(url, RegistryVerdict::VERSION_ABSENT);
        }
        auto& entry = versions[*version];
        if (entry.is_object() && entry.contains("deprecated")) {
            return registry_evidence(url, RegistryVerdict::YANKED_OR_DEPRECATED);
        }
    }
    return registry_evidence(url, RegistryVerdict::OK);
}

std::optional<LiveEvidence> check_dockerhub(const std::string& value,
                                            const ProbePolicy& policy) {
    auto ref = parse_docker_ref(value);
    if (!ref) return std::nullopt;
    std::string base = registry_base(policy, "dockerhub", "https://hub.docker.com");
    std::string url =
        base + "/v2/repositories/" + ref->ns + "/" + ref->name + "/tags/" + ref->tag;
    int status = 0;
    fetch_json(url, policy, {}, &status);
    if (status == 404) return registry_evidence(url, RegistryVerdict::VERSION_ABSENT);
    return registry_evidence(url, RegistryVerdict::OK);
}

std::optional<LiveEvidence> check_github(const std::string& value, const ProbePolicy& policy) {
    auto at = value.find('@');
    if (at == std::string::npos) return std::nullopt;
    std::string repo_path = value.substr(0, at);
    std::string ref = value.substr(at + 1);
    if (repo_path.find('/') == std::string::npos || ref.empty()) return std::nullopt;
    std::string base = registry_base(policy, "github", "https://api.github.com");
    std::string url = base + "/repos/" + repo_path + "/tags";
    httplib::Headers headers;
    headers.emplace("User-Agent", "driftmon");
    if (!policy.github_token.empty()) {
        headers.emplace("Authorization", "Bearer " + policy.github_token);
    }
    int status = 0;
    json j = fetch_json(url, policy, headers, &status);
    if (status == 404) return registry_evidence(url, RegistryVerdict::NOT_FOUND);
    if (!j.is_array()) {
        throw Error("MALFORMED_REGISTRY_RESPONSE", "github tags payload not a list: " + url);
    }
    for (const auto& tag : j) {
        if (!tag.is_object() || !tag.contains("name")) continue;
        auto name = tag["name"].get<std::string>();
        if (name == ref || name.rfind(ref + ".", 0) == 0) {
            return registry_evidence(url, RegistryVerdict::OK);
        }
    }
    return registry_evidence(url, RegistryVerdict::VERSION_ABSENT);
}

bool probeable_url(const std::string& value) {
    auto head = lower(value.substr(0, 8));
    return head.rfind("https://", 0) == 0 || head.rfind("http://", 0) == 0;
}

}  // namespace

bool redirect_is_drift(const std::string& url, const std::string& location) {
    auto from = parse_url(url);
    if (!from) return false;
    std::string to_host = from->host;
    std::string to_path;
    auto head = lower(location.substr(0, 8));
    if (head.rfind("http://", 0) == 0 || head.rfind("https://", 0) == 0) {
        auto to = parse_url(location);
        if (!to) return true;  // unparseable absolute target counts as a move
        to_host = to->host;
        to_path = to->path;
    } else if (!location.empty() && location[0] == '/') {
        to_path = location;
        auto q = to_path.find('?');
        if (q != std::string::npos) to_path.erase(q);
    } else {
        return true;  // relative-to-resource target changes the path
    }
    if (to_host != from->host) return true;
    return strip_trailing_slash(from->path) != strip_trailing_slash(to_path);
}

LiveEvidence probe_url(const std::string& url, const ProbePolicy& policy) {
    if (!policy.network_enabled) {
        throw Error("NETWORK_DISABLED", "live probing requires --live");
    }
    auto parts = parse_url(url);
    if (!parts) throw Error("UNSUPPORTED_URL", "not an http(s) url: " + url);

    std::string cache_file;
    if (!policy.cache_dir.empty()) {
        std::filesystem::create_directories(policy.cache_dir);
        cache_file = cache_path_for(policy.cache_dir, url);
        if (std::filesystem::exists(cache_file)) {
            auto cached = evidence_from_cache_file(cache_file, policy.cache_ttl_seconds);
            if (cached.from_cache) return cached;
        }
    }

    auto cli = make_client(*parts, policy);
    note_request(parts->host, policy);
    auto res = cli.Head(parts->path);
    if (res && res->status == 405) {
        note_request(parts->host, policy);
        res = cli.Get(parts->path);
    }
    if (!res) throw_transport(res, url);

    LiveEvidence ev;
    ev.kind = LiveEvidence::Kind::URL_STATUS;
    ev.target = url;
    ev.http_status = res->status;
    if (res->has_header("Location")) ev.redirect_location = res->get_header_value("Location");
    ev.fetched_at = date_header(res);
    ev.from_cache = false;
    if (!cache_file.empty()) write_cache_file(cache_file, ev);
    return ev;
}

std::optional<LiveEvidence> check_registry(const ContractRecord& c, const ProbePolicy& policy) {
    switch (c.contract_type) {
        case ContractType::DEPENDENCY: {
            if (looks_like_npm_value(c.value)) return check_npm(c.value, policy);
            if (auto expr = parse_constraint(c.value)) {
                return check_pypi(expr->name, pinned_version(*expr), policy);
            }
            if (bare_package_name(c.value)) return check_pypi(c.value, std::nullopt, policy);
            return std::nullopt;
        }
        case ContractType::CONTAINER_IMAGE:
            return check_dockerhub(c.value, policy);
        case ContractType::CI_ACTION:
            return check_github(c.value, policy);
        default:
            return std::nullopt;
    }
}

LiveReport validate_live_report(const std::vector<ContractRecord>& contracts,
                                const ProbePolicy& policy) {
    LiveReport report;
    for (const auto& c : contracts) {
        if (c.role != Role::OPERATIONAL) continue;
        bool url_candidate = (c.contract_type == ContractType::SERVICE_URL ||
                              c.contract_type == ContractType::API_ENDPOINT ||
                              c.contract_type == ContractType::CLOUD_RESOURCE) &&
                             probeable_url(c.value);
        if (url_candidate) {
            try {
                auto ev = probe_url(c.value, policy);
                int s = ev.http_status;
                if (s == 404 || s == 410) {
                    report.violations.push_back(
                        make_live_violation(c, ev, "url answered " + std::to_string(s)));
                } else if (s >= 300 && s < 400 && ev.redirect_location &&
                           redirect_is_drift(c.value, *ev.redirect_location)) {
                    report.violations.push_back(make_live_violation(
                        c, ev,
                        "url moved to " + *ev.redirect_location + " (status " +
                            std::to_string(s) + ")"));
                } else {
                    report.observations.push_back({c.id, "url status " + std::to_string(s)});
                }
            } catch (const Error& e) {
                report.observations.push_back({c.id, e.code() + ": " + e.what()});
            }
            continue;
        }
        try {
            auto ev = check_registry(c, policy);
            if (!ev) continue;
            if (ev->verdict != RegistryVerdict::OK) {
                report.violations.push_back(make_live_violation(
                    c, *ev, "registry reports " + to_string(ev->verdict) + " for " + c.value));
            } else {
                report.observations.push_back({c.id, "registry verdict OK"});
            }
        } catch (const Error& e) {
            report.observations.push_back({c.id, e.code() + ": " + e.what()});
        }
    }
    return report;
}

std::vector<Violation> validate_live(const std::vector<ContractRecord>& contracts,
                                     const ProbePolicy& policy) {
    return validate_live_report(contracts, policy).violations;
}

}  // namespace driftmon
