#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace coadjoint {

// Raised for anything the user can fix in a config file or on the command
// line; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key-value text format: `[section]` headers, `key = value` lines,
// `#`/`;` comments.  Repeated keys are kept in order (list-valued entries);
// scalar getters take the last occurrence.
class Config {
  public:
    Config() = default;

    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_text(ss.str(), path);
    }

    static Config parse_text(const std::string& text, const std::string& origin = "<string>") {
        Config cfg;
        std::string section;
        std::size_t lineno = 0;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#' || t[0] == ';') continue;
            if (t.front() == '[') {
                if (t.back() != ']')
                    throw ConfigError(origin + ":" + std::to_string(lineno) +
                                      ": unterminated section header");
                section = trim(t.substr(1, t.size() - 2));
                if (section.empty())
                    throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": expected 'key = value', got '" + t + "'");
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            if (key.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
            cfg.entries_.push_back({section, key, value});
        }
        return cfg;
    }

    bool has(const std::string& section, const std::string& key) const {
        for (const auto& e : entries_)
            if (e.section == section && e.key == key) return true;
        return false;
    }

    // all occurrences, in file order
    std::vector<std::string> get_all(const std::string& section, const std::string& key) const {
        std::vector<std::string> out;
        for (const auto& e : entries_)
            if (e.section == section && e.key == key) out.push_back(e.value);
        return out;
    }

    std::string get_string(const std::string& section, const std::string& key) const {
        const auto all = get_all(section, key);
        if (all.empty()) throw ConfigError("missing config key [" + section + "] " + key);
        return all.back();
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        const auto all = get_all(section, key);
        return all.empty() ? fallback : all.back();
    }

    double get_double(const std::string& section, const std::string& key) const {
        return to_double(section, key, get_string(section, key));
    }

    double get_double(const std::string& section, const std::string& key, double fallback) const {
        const auto all = get_all(section, key);
        return all.empty() ? fallback : to_double(section, key, all.back());
    }

    std::int64_t get_i64(const std::string& section, const std::string& key,
                         std::int64_t fallback) const {
        const auto all = get_all(section, key);
        return all.empty() ? fallback : to_i64(section, key, all.back());
    }

    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const {
        const auto all = get_all(section, key);
        if (all.empty()) return fallback;
        std::uint64_t v = 0;
        const std::string& s = all.back();
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw ConfigError("config key [" + section + "] " + key +
                              ": expected unsigned integer, got '" + s + "'");
        return v;
    }

    // whitespace-separated list of reals
    std::vector<double> get_vec(const std::string& section, const std::string& key) const {
        return split_doubles(section, key, get_string(section, key));
    }

    std::vector<double> get_vec(const std::string& section, const std::string& key,
                                const std::vector<double>& fallback) const {
        const auto all = get_all(section, key);
        return all.empty() ? fallback : split_doubles(section, key, all.back());
    }

    std::vector<double> split_doubles(const std::string& section, const std::string& key,
                                      const std::string& value) const {
        std::vector<double> out;
        std::istringstream in(value);
        std::string tok;
        while (in >> tok) out.push_back(to_double(section, key, tok));
        if (out.empty())
            throw ConfigError("config key [" + section + "] " + key + ": expected numbers");
        return out;
    }

    // typo guard: every (section, key) must appear in the allowlist
    void check_known(const std::vector<std::pair<std::string, std::string>>& known) const {
        for (const auto& e : entries_) {
            bool ok = false;
            for (const auto& [s, k] : known)
                if (e.section == s && e.key == k) {
                    ok = true;
                    break;
                }
            if (!ok)
                throw ConfigError("unknown config key [" + e.section + "] " + e.key);
        }
    }

  private:
    struct Entry {
        std::string section, key, value;
    };
    std::vector<Entry> entries_;

    static std::string trim(const std::string& s) {
        std::size_t b = 0, e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
        return s.substr(b, e - b);
    }

    double to_double(const std::string& section, const std::string& key,
                     const std::string& s) const {
        double v = 0.0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw ConfigError("config key [" + section + "] " + key + ": expected real, got '" +
                              s + "'");
        return v;
    }

    std::int64_t to_i64(const std::string& section, const std::string& key,
                        const std::string& s) const {
        std::int64_t v = 0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw ConfigError("config key [" + section + "] " + key + ": expected integer, got '" +
                              s + "'");
        return v;
    }
};

}  // namespace coadjoint
