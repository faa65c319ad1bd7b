#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "channelwave/acceptance.hpp"
#include "config.hpp"
#include "json.hpp"

namespace channelwave::cli {

// Checks, structured results and CSV tables produced by one subcommand run.
class Report {
public:
    nlohmann::ordered_json results = nlohmann::ordered_json::object();
    std::vector<Check> checks;
    std::vector<std::string> warnings;

    void at_most(const std::string& name, double value, double bound);
    void at_least(const std::string& name, double value, double bound);
    void add(const Check& c) { checks.push_back(c); }

    // Rows are written with 17 significant digits.
    void table(const std::string& file, std::vector<std::string> header, std::vector<std::vector<double>> rows);

    bool passed() const;
    nlohmann::ordered_json to_json(const std::string& subcommand, const nlohmann::ordered_json& config) const;
    // Writes report.json and the tables into dir.
    void write(const std::string& dir, const std::string& subcommand, const nlohmann::ordered_json& config) const;

private:
    struct Table {
        std::vector<std::string> header;
        std::vector<std::vector<double>> rows;
    };
    std::map<std::string, Table> tables_;
};

nlohmann::ordered_json check_to_json(const Check& c);

struct Command {
    std::string name;
    std::string help;
    Schema schema;
    std::function<void(const Settings&, Report&)> run;
};

// Every subcommand; the keys "outdir" and "timestamp" are shared and live in [general].
const std::vector<Command>& commands();

// Section name -> schema, for config validation ("general" included).
std::map<std::string, Schema> all_sections();

}  // namespace channelwave::cli
