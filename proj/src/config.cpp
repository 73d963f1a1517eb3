#include "driftmon/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace driftmon {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\''))) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config cfg;
    std::string body = trim(text);
    // TOML section headers also start with '['; only '{' can open a JSON
    // object config.
    if (!body.empty() && body.front() == '{') {
        Json j;
        try {
            j = Json::parse(body);
        } catch (const Json::parse_error& e) {
            throw Error("MALFORMED_CONFIG", std::string("bad JSON config: ") + e.what());
        }
        if (!j.is_object()) throw Error("MALFORMED_CONFIG", "config root must be an object");
        // One level of nesting flattens to dotted keys.
        for (const auto& [key, val] : j.items()) {
            auto store = [&cfg](const std::string& k, const Json& v) {
                if (v.is_string()) cfg.strings_[k] = v.get<std::string>();
                else if (v.is_boolean()) cfg.bools_[k] = v.get<bool>();
                else if (v.is_number_integer()) cfg.ints_[k] = v.get<long long>();
                else if (v.is_array()) {
                    std::vector<std::string> items;
                    for (const auto& el : v) {
                        if (el.is_string()) items.push_back(el.get<std::string>());
                    }
                    cfg.lists_[k] = items;
                }
            };
            if (val.is_object()) {
                for (const auto& [sub, subval] : val.items()) store(key + "." + sub, subval);
            } else {
                store(key, val);
            }
        }
        return cfg;
    }

    std::istringstream in(body);
    std::string line;
    std::string section;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw Error("MALFORMED_CONFIG", "expected key = value: " + t);
        }
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (!section.empty()) key = section + "." + key;
        if (key.empty() || val.empty()) {
            throw Error("MALFORMED_CONFIG", "empty key or value: " + t);
        }
        if (val.front() == '[') {
            if (val.back() != ']') throw Error("MALFORMED_CONFIG", "unterminated array: " + t);
            std::vector<std::string> items;
            std::string inner = val.substr(1, val.size() - 2);
            std::string cur;
            bool in_quote = false;
            char quote = 0;
            for (char ch : inner) {
                if (in_quote) {
                    if (ch == quote) in_quote = false;
                    else cur += ch;
                } else if (ch == '"' || ch == '\'') {
                    in_quote = true;
                    quote = ch;
                } else if (ch == ',') {
                    if (!trim(cur).empty()) items.push_back(trim(cur));
                    cur.clear();
                } else {
                    cur += ch;
                }
            }
            if (!trim(cur).empty()) items.push_back(trim(cur));
            cfg.lists_[key] = items;
        } else if (val == "true" || val == "false") {
            cfg.bools_[key] = val == "true";
        } else if (val.front() == '"' || val.front() == '\'') {
            cfg.strings_[key] = unquote(val);
        } else {
            try {
                std::size_t used = 0;
                long long n = std::stoll(val, &used);
                if (used == val.size()) {
                    cfg.ints_[key] = n;
                } else {
                    cfg.strings_[key] = val;
                }
            } catch (const std::exception&) {
                cfg.strings_[key] = val;
            }
        }
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("CONFIG_NOT_FOUND", "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool Config::has(const std::string& key) const {
    return strings_.count(key) || ints_.count(key) || bools_.count(key) || lists_.count(key);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = strings_.find(key);
    return it == strings_.end() ? fallback : it->second;
}

long long Config::get_int(const std::string& key, long long fallback) const {
    auto it = ints_.find(key);
    return it == ints_.end() ? fallback : it->second;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    auto it = bools_.find(key);
    return it == bools_.end() ? fallback : it->second;
}

std::vector<std::string> Config::get_list(const std::string& key) const {
    auto it = lists_.find(key);
    return it == lists_.end() ? std::vector<std::string>{} : it->second;
}

ClassifierSettings ClassifierSettings::from_config(const Config& cfg) {
    ClassifierSettings s;
    if (cfg.has("classifier.cues")) s.citation_cues = cfg.get_list("classifier.cues");
    long long w = cfg.get_int("classifier.cue_window", static_cast<long long>(s.cue_window));
    if (w < 0) throw Error("MALFORMED_CONFIG", "classifier.cue_window must be >= 0");
    s.cue_window = static_cast<std::size_t>(w);
    std::string def = cfg.get_string("classifier.ambiguous_default", "INCIDENTAL");
    s.ambiguous_default = role_from_string(def);
    return s;
}

}  // namespace driftmon
