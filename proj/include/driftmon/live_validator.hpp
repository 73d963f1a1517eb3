#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "driftmon/core.hpp"

namespace driftmon {

struct ProbePolicy {
    bool network_enabled = false;  // --no-network is the default stance
    std::string cache_dir;         // empty disables the cache
    int timeout_ms = 5000;
    int per_host_limit = 4;
    long long cache_ttl_seconds = 3600;
    // Base-URL overrides keyed by client name: pypi, npm, dockerhub, github.
    std::map<std::string, std::string> registry_bases;
    std::string github_token;
};

struct Observation {
    std::string contract_id;
    std::string note;
};

struct LiveReport {
    std::vector<Violation> violations;
    std::vector<Observation> observations;
};

// One HEAD (GET on 405), no redirect following. Throws NETWORK_DISABLED,
// TIMEOUT, DNS_FAILURE, UNSUPPORTED_URL.
LiveEvidence probe_url(const std::string& url, const ProbePolicy& policy);

// Registry lookup for DEPENDENCY / CONTAINER_IMAGE / CI_ACTION contracts;
// nullopt when no validator covers the contract.
std::optional<LiveEvidence> check_registry(const ContractRecord& c, const ProbePolicy& policy);

// Hard evidence only: 404/410, redirect off host-or-path, registry
// NOT_FOUND / VERSION_ABSENT / YANKED_OR_DEPRECATED. Everything else lands in
// observations.
LiveReport validate_live_report(const std::vector<ContractRecord>& contracts,
                                const ProbePolicy& policy);
std::vector<Violation> validate_live(const std::vector<ContractRecord>& contracts,
                                     const ProbePolicy& policy);

// True when the redirect target leaves the original host or path (trailing
// slash and scheme ignored). Exposed for tests.
bool redirect_is_drift(const std::string& url, const std::string& location);

}  // namespace driftmon
