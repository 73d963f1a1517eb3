#pragma once

#include <map>
#include <string>
#include <vector>

#include "driftmon/core.hpp"

namespace driftmon {

// Key-value config shared by the classifier and the CLI. Accepts JSON objects
// or a flat TOML subset (key = value lines, string/number/bool/arrays of
// strings; [section] headers prefix keys with "section.").
class Config {
  public:
    Config() = default;

    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;

  private:
    std::map<std::string, std::string> strings_;
    std::map<std::string, long long> ints_;
    std::map<std::string, bool> bools_;
    std::map<std::string, std::vector<std::string>> lists_;
};

struct ClassifierSettings {
    std::vector<std::string> citation_cues = {"see",        "see also",     "docs",
                                              "documentation", "tutorial",  "example of",
                                              "e.g.",       "for reference", "changelog",
                                              "blog"};
    std::size_t cue_window = 5;
    Role ambiguous_default = Role::INCIDENTAL;

    // Keys: classifier.cues (list), classifier.cue_window (int),
    // classifier.ambiguous_default ("OPERATIONAL"/"INCIDENTAL").
    static ClassifierSettings from_config(const Config& cfg);
};

}  // namespace driftmon
