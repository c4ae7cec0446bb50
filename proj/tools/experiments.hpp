#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace harq::cli {

struct ExperimentConfig {
    std::string case_name;      // see kCaseNames in experiments.cpp
    std::string kind = "inr";   // alo | rtd | inr, where applicable
    int max_rounds = 1;         // M
    int f_levels = 2;           // F
    std::vector<double> snr_grid_db;
    std::uint64_t seed = 1;
    std::uint64_t mc_renewals = 0;  // 0 = analytic only
    std::string output_path = "results.csv";
    double rate_bits = 0.0;     // dp-full-csi only; 0 derives it from outage_full_csi
    int dp_state_levels = 256;
    int dp_fading_levels = 256;
};

enum class Severity { Note, Invalid, Unsupported };

struct Finding {
    Severity severity = Severity::Note;
    std::string message;
};

/// Parse a flat key=value file ('#' comments allowed). Throws on bad syntax.
ExperimentConfig load_config(const std::string& path);

/// Apply one key=value override on top of a loaded config.
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Structural checks against the supported case grid; returns findings
/// without computing anything.
std::vector<Finding> validate(const ExperimentConfig& cfg);

/// Execute the experiment: writes the CSV and a key=value metadata sidecar.
/// Returns the process exit code (0 ok, 2 invalid config, 3 unsupported
/// combination, 4 numerical non-convergence).
int run(const ExperimentConfig& cfg);

std::vector<double> parse_snr_grid(const std::string& text);  // "a:step:b" or "a,b,c"

}  // namespace harq::cli
