#pragma once

#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace channelwave::cli {

// Usage and configuration errors; the CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One `key = value` line. Keys before the first [section] header belong to "general".
struct ConfigEntry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
};

// '#' and ';' start comments; blank lines are skipped. Throws ConfigError("<source>:<line>: ...").
std::vector<ConfigEntry> parse_config(std::istream& in, const std::string& source);
std::vector<ConfigEntry> parse_config_file(const std::string& path);

enum class KeyType { Real, Integer, String, Bool, List };

struct KeySpec {
    std::string name;
    KeyType type = KeyType::Real;
    std::string default_value;
    std::string help;
    double lo = -1e300;  // inclusive range for numbers
    double hi = 1e300;
    std::vector<std::string> choices;  // for strings; empty means free text
};

using Schema = std::vector<KeySpec>;

// Resolved, validated settings for one subcommand.
class Settings {
public:
    double real(const std::string& key) const;
    long integer(const std::string& key) const;
    const std::string& str(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::vector<double> list(const std::string& key) const;

    // Keys and typed values, in schema order; keys listed in `skip` are left out.
    nlohmann::ordered_json to_json(const std::vector<std::string>& skip = {}) const;

private:
    friend Settings resolve(const Schema&, const std::string&, const std::vector<ConfigEntry>&,
                            const std::map<std::string, std::string>&, const std::map<std::string, Schema>&);
    const KeySpec& spec(const std::string& key) const;
    Schema schema_;
    std::map<std::string, std::string> values_;
};

// Validates every entry: sections must be "general" or a known subcommand, keys must exist in
// that section's schema and parse with the right type and range. Entries for `section` and
// "general" are applied; overrides (from command-line flags) win over the file.
Settings resolve(const Schema& schema, const std::string& section, const std::vector<ConfigEntry>& entries,
                 const std::map<std::string, std::string>& overrides, const std::map<std::string, Schema>& all_sections);

// Checks one value against its KeySpec; returns an error message or "".
std::string validate_value(const KeySpec& spec, const std::string& value);

}  // namespace channelwave::cli
