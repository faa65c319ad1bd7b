#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>

namespace channelwave::cli {
namespace {

std::string strip_comment(const std::string& s) {
    const auto pos = s.find_first_of("#;");
    return pos == std::string::npos ? s : s.substr(0, pos);
}

bool parse_double(const std::string& s, double& out) {
    const char* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, out);
    return r.ec == std::errc() && r.ptr == end;
}

bool parse_long(const std::string& s, long& out) {
    const char* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, out);
    return r.ec == std::errc() && r.ptr == end;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    boost::split(parts, s, boost::is_any_of(","));
    for (auto& p : parts) boost::trim(p);
    if (parts.size() == 1 && parts[0].empty()) parts.clear();
    return parts;
}

const KeySpec* find_key(const Schema& schema, const std::string& key) {
    const auto it = std::find_if(schema.begin(), schema.end(), [&](const KeySpec& k) { return k.name == key; });
    return it == schema.end() ? nullptr : &*it;
}

}  // namespace

std::vector<ConfigEntry> parse_config(std::istream& in, const std::string& source) {
    std::vector<ConfigEntry> out;
    std::string section = "general", raw;
    int line = 0;
    auto fail = [&](const std::string& msg) { throw ConfigError(source + ":" + std::to_string(line) + ": " + msg); };
    while (std::getline(in, raw)) {
        ++line;
        std::string s = boost::trim_copy(strip_comment(raw));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail("unterminated section header");
            section = boost::trim_copy(s.substr(1, s.size() - 2));
            if (section.empty()) fail("empty section name");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        ConfigEntry e{section, boost::trim_copy(s.substr(0, eq)), boost::trim_copy(s.substr(eq + 1)), line};
        if (e.key.empty()) fail("missing key before '='");
        if (e.key.find_first_of(" \t") != std::string::npos) fail("key contains whitespace: '" + e.key + "'");
        for (const auto& prev : out)
            if (prev.section == e.section && prev.key == e.key)
                fail("duplicate key '" + e.key + "' (first set on line " + std::to_string(prev.line) + ")");
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<ConfigEntry> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    return parse_config(in, path);
}

std::string validate_value(const KeySpec& spec, const std::string& value) {
    auto range = [&](double v) -> std::string {
        if (!std::isfinite(v)) return "value must be finite";
        if (v < spec.lo || v > spec.hi) {
            std::ostringstream os;
            os << "value " << value << " outside [" << spec.lo << ", " << spec.hi << "]";
            return os.str();
        }
        return "";
    };
    switch (spec.type) {
        case KeyType::Real: {
            double v;
            if (!parse_double(value, v)) return "expected a number, got '" + value + "'";
            return range(v);
        }
        case KeyType::Integer: {
            long v;
            if (!parse_long(value, v)) return "expected an integer, got '" + value + "'";
            return range(double(v));
        }
        case KeyType::Bool:
            if (value != "true" && value != "false") return "expected true or false, got '" + value + "'";
            return "";
        case KeyType::List:
            for (const auto& p : split_list(value)) {
                double v;
                if (!parse_double(p, v)) return "expected a comma-separated list of numbers, got '" + value + "'";
                if (auto e = range(v); !e.empty()) return e;
            }
            return "";
        case KeyType::String:
            if (!spec.choices.empty() && std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end())
                return "expected one of {" + boost::join(spec.choices, ", ") + "}, got '" + value + "'";
            return "";
    }
    return "";
}

Settings resolve(const Schema& schema, const std::string& section, const std::vector<ConfigEntry>& entries,
                 const std::map<std::string, std::string>& overrides, const std::map<std::string, Schema>& all_sections) {
    Settings s;
    s.schema_ = schema;
    for (const auto& k : schema) s.values_[k.name] = k.default_value;

    for (const auto& e : entries) {
        const auto where = "line " + std::to_string(e.line) + ": ";
        const auto sec = all_sections.find(e.section);
        if (sec == all_sections.end()) throw ConfigError(where + "unknown section [" + e.section + "]");
        const KeySpec* k = find_key(sec->second, e.key);
        if (!k) throw ConfigError(where + "unknown key '" + e.key + "' in [" + e.section + "]");
        if (auto err = validate_value(*k, e.value); !err.empty()) throw ConfigError(where + e.key + ": " + err);
        if (e.section == section || e.section == "general") {
            if (find_key(schema, e.key)) s.values_[e.key] = e.value;
        }
    }
    for (const auto& [key, value] : overrides) {
        const KeySpec* k = find_key(schema, key);
        if (!k) throw ConfigError("--" + key + ": unknown option");
        if (auto err = validate_value(*k, value); !err.empty()) throw ConfigError("--" + key + ": " + err);
        s.values_[key] = value;
    }
    return s;
}

const KeySpec& Settings::spec(const std::string& key) const {
    const KeySpec* k = find_key(schema_, key);
    if (!k) throw std::logic_error("settings: no key '" + key + "'");
    return *k;
}

double Settings::real(const std::string& key) const {
    spec(key);
    double v = 0.0;
    parse_double(values_.at(key), v);
    return v;
}

long Settings::integer(const std::string& key) const {
    spec(key);
    long v = 0;
    parse_long(values_.at(key), v);
    return v;
}

const std::string& Settings::str(const std::string& key) const {
    spec(key);
    return values_.at(key);
}

bool Settings::flag(const std::string& key) const { return str(key) == "true"; }

std::vector<double> Settings::list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& p : split_list(str(key))) {
        double v = 0.0;
        parse_double(p, v);
        out.push_back(v);
    }
    return out;
}

nlohmann::ordered_json Settings::to_json(const std::vector<std::string>& skip) const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& k : schema_) {
        if (std::find(skip.begin(), skip.end(), k.name) != skip.end()) continue;
        switch (k.type) {
            case KeyType::Real: j[k.name] = real(k.name); break;
            case KeyType::Integer: j[k.name] = integer(k.name); break;
            case KeyType::Bool: j[k.name] = flag(k.name); break;
            case KeyType::List: j[k.name] = list(k.name); break;
            case KeyType::String: j[k.name] = str(k.name); break;
        }
    }
    return j;
}

}  // namespace channelwave::cli
