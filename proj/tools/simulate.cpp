// simulate: run one scenario from a config file.
//
//   simulate <config> [--output-dir D] [--threads K] [--calibration F]
//
// Exit codes: 0 success, 2 configuration error, 3 health abort,
// 4 missing calibration.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "polaron/config.hpp"
#include "polaron/errors.hpp"
#include "polaron/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Polaron-dressed Kitaev chain: non-Markovian edge-correlation dynamics"};
    std::string config_path;
    std::string output_dir;
    int threads = 0;
    std::string calibration = "calibration.txt";
    app.add_option("config", config_path, "scenario config file")->required()->check(CLI::ExistingFile);
    app.add_option("--output-dir", output_dir, "overrides output.dir");
    app.add_option("--threads", threads, "overrides run.threads")->check(CLI::PositiveNumber);
    app.add_option("--calibration", calibration, "calibration file (read, or written by 'calibrate')");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : polaron::kExitConfig;
    }

    std::ifstream in(config_path);
    std::stringstream text;
    text << in.rdbuf();

    try {
        polaron::ScenarioConfig cfg = polaron::parse_config(text.str());
        if (!output_dir.empty()) {
            cfg.output_dir = output_dir;
        }
        if (threads > 0) {
            cfg.threads = threads;
        }
        const polaron::ScenarioOutcome outcome = polaron::run_scenario(cfg, calibration, text.str());
        for (const auto& f : outcome.files) {
            std::cout << f.string() << '\n';
        }
        if (!outcome.message.empty()) {
            std::cerr << outcome.message;
        }
        return outcome.exit_code;
    } catch (const polaron::ConfigError& e) {
        std::cerr << config_path << ": " << e.what() << '\n';
        return polaron::kExitConfig;
    } catch (const polaron::HealthError& e) {
        std::cerr << "health abort: " << e.what() << '\n';
        return polaron::kExitHealth;
    } catch (const polaron::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return polaron::kExitConfig;
    }
}
