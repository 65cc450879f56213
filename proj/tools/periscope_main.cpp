#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "periscope/scenario.hpp"

namespace {

std::size_t jobs_from_env() {
    const char* env = std::getenv("PERISCOPE_JOBS");
    if (!env) return 1;
    long v = std::strtol(env, nullptr, 10);
    return v > 0 ? static_cast<std::size_t>(v) : 1;
}

int exit_code_for(const periscope::Error& e) {
    // Config and I/O problems exit 1; violated spec invariants and failed
    // checks exit 2.
    return e.code() == periscope::ErrorCode::invalid_argument ? 1 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-mirror periscope synthesis and verification"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::size_t jobs = jobs_from_env();

    CLI::App* run = app.add_subcommand("run", "Run the checks configured in a JSON scenario");
    run->add_option("config", config_path, "Scenario config (JSON)")->required();
    run->add_option("--out", out_override, "Override the output directory");
    run->add_option("--jobs", jobs, "Worker threads for grid sweeps (env PERISCOPE_JOBS)");

    std::string demo_name;
    std::string demo_out = "periscope-out";
    CLI::App* demo = app.add_subcommand("demo", "Run a canned scenario and print its table");
    demo->add_option("name", demo_name, "Demo name")->required();
    demo->add_option("--out", demo_out, "Output directory");
    demo->add_option("--jobs", jobs, "Worker threads for grid sweeps");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            periscope::ScenarioConfig config = periscope::load_scenario(config_path);
            periscope::RunOptions options;
            if (!out_override.empty()) options.output_override = out_override;
            options.jobs = jobs;
            periscope::RunResult result = periscope::run_scenario(config, options);
            for (const auto& [name, outcome] : result.checks)
                std::cout << (outcome.pass ? "[PASS] " : "[FAIL] ") << name << "\n";
            std::cout << "report: " << result.csv_path << "\n";
            std::cout << "summary: " << result.summary_path << "\n";
            if (result.failures > 0)
                std::cout << result.failures << " grid point(s) failed; see the flag column\n";
            return result.pass ? 0 : 2;
        }
        periscope::RunResult result =
            periscope::run_demo(demo_name, demo_out + "/" + demo_name, std::cout, jobs);
        return result.pass ? 0 : 2;
    } catch (const periscope::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
