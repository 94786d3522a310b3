#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ttsv {

// Flat `key = value` text. `#` starts a comment, blank lines are ignored and
// list values are comma separated. Unknown keys are an error when checked
// against an allowed set. See docs/config.md.
class ConfigFile {
public:
    static ConfigFile parse(std::istream& is, const std::string& origin = "<config>");
    static ConfigFile load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    const std::map<std::string, std::string>& entries() const { return values_; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const;
    std::vector<std::size_t> get_size_list(const std::string& key, const std::vector<std::size_t>& fallback) const;

    // Throws ConfigError naming the first key outside `allowed`.
    void check_keys(const std::set<std::string>& allowed) const;

private:
    std::map<std::string, std::string> values_;
    std::string origin_;
};

std::string trim(const std::string& s);
std::vector<std::string> split_list(const std::string& s);

}  // namespace ttsv
