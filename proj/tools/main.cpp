// channelwave: run experiments and write <outdir>/<subcommand>/<timestamp>/{report.json, *.csv}.
// Exit codes: 0 success, 1 a checked bound failed, 2 usage or configuration error.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using namespace channelwave::cli;

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

// Unique run directory; a numeric suffix avoids clobbering an earlier run in the same second.
std::string run_dir(const std::string& outdir, const std::string& sub, const std::string& stamp) {
    namespace fs = std::filesystem;
    const fs::path base = fs::path(outdir) / sub;
    fs::path dir = base / stamp;
    for (int k = 1; fs::exists(dir); ++k) dir = base / (stamp + "-" + std::to_string(k));
    return dir.string();
}

int run(int argc, char** argv) {
    CLI::App app{"channelwave: radial wave experiments"};
    app.require_subcommand(1);
    struct Slot {
        const Command* cmd;
        CLI::App* sub;
        std::string config;
        std::map<std::string, std::string> flags;
    };
    std::vector<std::unique_ptr<Slot>> slots;
    for (const auto& c : commands()) {
        auto slot = std::make_unique<Slot>();
        slot->cmd = &c;
        slot->sub = app.add_subcommand(c.name, c.help);
        slot->sub->add_option("--config", slot->config, "key = value config file")->check(CLI::ExistingFile);
        for (const auto& k : c.schema) {
            auto* flags = &slot->flags;
            const std::string key = k.name;
            slot->sub->add_option_function<std::string>(
                "--" + k.name, [flags, key](const std::string& v) { (*flags)[key] = v; },
                k.help + (k.default_value.empty() ? "" : " [" + k.default_value + "]"));
        }
        slots.push_back(std::move(slot));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    for (const auto& slot : slots) {
        if (!slot->sub->parsed()) continue;
        const Command& cmd = *slot->cmd;
        Settings settings;
        std::vector<ConfigEntry> entries;
        try {
            // Parse errors already carry "<file>:<line>:".
            if (!slot->config.empty()) entries = parse_config_file(slot->config);
        } catch (const ConfigError& e) {
            std::cerr << "channelwave " << cmd.name << ": " << e.what() << "\n";
            return 2;
        }
        try {
            settings = resolve(cmd.schema, cmd.name, entries, slot->flags, all_sections());
        } catch (const ConfigError& e) {
            std::cerr << "channelwave " << cmd.name << ": " << (slot->config.empty() ? "" : slot->config + ": ") << e.what()
                      << "\n";
            return 2;
        }

        Report report;
        try {
            cmd.run(settings, report);
        } catch (const ConfigError& e) {
            std::cerr << "channelwave " << cmd.name << ": " << e.what() << "\n";
            return 2;
        } catch (const std::exception& e) {
            // Module preconditions (grid sizes, domains) reject the requested experiment.
            std::cerr << "channelwave " << cmd.name << ": invalid experiment: " << e.what() << "\n";
            return 2;
        }

        const std::string stamp = settings.str("timestamp").empty() ? utc_timestamp() : settings.str("timestamp");
        const std::string dir = run_dir(settings.str("outdir"), cmd.name, stamp);
        report.write(dir, cmd.name, settings.to_json({"outdir", "timestamp"}));

        int failed = 0, passed = 0;
        for (const auto& c : report.checks) {
            if (c.passed) {
                ++passed;
                continue;
            }
            if (!c.known_failure) ++failed;
            std::cout << (c.known_failure ? "known failure: " : "FAILED: ") << c.name << " = " << c.value << " (need "
                      << c.relation << " " << c.bound << ")\n";
        }
        for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
        std::cout << passed << "/" << report.checks.size() << " checks passed\n";
        std::cout << "report: " << dir << "/report.json\n";
        return failed == 0 ? 0 : 1;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
