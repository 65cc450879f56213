#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "periscope/scalar_field.hpp"
#include "periscope/vec.hpp"

namespace periscope {

enum class ScenarioKind { spherical, reversed };
enum class CheckKind { synthesize, trace, frobenius };

const char* to_string(ScenarioKind kind);
const char* to_string(CheckKind kind);

/// Batch scenario: one periscope spec, a grid, a set of checks, tolerances,
/// and output destinations. Parsed strictly from JSON: unknown keys,
/// non-finite numbers and grid counts outside [1, 10^4] are rejected.
struct ScenarioConfig {
    ScenarioKind scenario = ScenarioKind::spherical;
    std::size_t dimension = 3;
    double C = 1.0;

    std::string mirror_family;
    ScalarField mirror = ScalarField::constant(3, 0.0); // reparsed from JSON
    std::string gradient_mode = "analytic";
    double fd_step = 1e-6;

    // spherical
    Vec patch_base;
    double patch_radius = 0.0;
    // reversed
    Vec domain_min;
    Vec domain_max;

    std::vector<std::size_t> grid_counts;
    std::vector<CheckKind> checks;

    std::map<std::string, double> tolerances; // filled with defaults

    double frobenius_chart_radius = 0.1;
    double frobenius_step = 1e-4;

    std::string output_path = ".";
    std::string output_format = "csv";
};

/// Default check tolerances, recorded in every summary.
std::map<std::string, double> default_tolerances();

ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const ScenarioConfig& config);

struct CheckOutcome {
    bool pass = false;
    double tolerance = 0.0;
    std::map<std::string, double> max_residuals;
    std::map<std::string, double> mean_residuals;
    Vec worst_point;
    std::string detail;
};

struct RunResult {
    bool pass = false;
    std::map<std::string, CheckOutcome> checks; // keyed by check name
    std::size_t points = 0;
    std::size_t failures = 0;
    std::string csv_path;
    std::string frobenius_csv_path;
    std::string summary_path;
};

struct RunOptions {
    std::optional<std::string> output_override;
    std::size_t jobs = 1;
    bool write_files = true;
};

/// Execute the configured checks, write the CSV report(s) and the JSON
/// summary, and return the aggregate outcome.
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Canned scenarios reproducing the verification-suite numbers.
const std::vector<std::string>& demo_names();

/// Run a canned scenario, print its pass/fail table to `out`, write report
/// files under `output_dir`, and return the outcome.
RunResult run_demo(const std::string& name, const std::string& output_dir, std::ostream& out,
                   std::size_t jobs = 1);

} // namespace periscope
