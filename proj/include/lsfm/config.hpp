#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lsfm/phantom.hpp"

namespace lsfm {

// Per-solver overrides, set through dotted config keys such as
// "mrnsd.max_iter" or "sart.relaxation".
struct SolverOverrides {
    std::optional<int> max_iter;
    std::optional<double> relaxation;
    std::optional<double> tol_outer;
    std::optional<int> htv_inner;
    std::optional<double> lambda_reg0;
};

// Full experiment description parsed from a flat key=value file.
struct ExperimentConfig {
    int n = 129;
    std::string phantom = "disk_structured";
    std::string lambda_mode = "constant";  // constant | variable
    double c = 1.0;
    double c_hat = 1.0;
    double c_tilde = 0.6;
    double lambda_bg = 1.1;
    double lambda_mu_scale = 0.0;
    double mu_amplitude = 1.0;
    double radius = 0.8;
    double center_x = 1.0;
    double center_y = 0.0;
    // Reconstruction-side coefficients. NaN means "reconstruct with the true
    // maps"; setting them builds a constant-coefficient operator on the true
    // support (the mismatched-model experiment).
    double a_recon = std::numeric_limits<double>::quiet_NaN();
    double lambda_recon = std::numeric_limits<double>::quiet_NaN();
    double beta = 0.01;
    std::uint64_t seed = 1;
    std::vector<std::string> solvers = {"mrnsd", "sart", "fista", "nnfcgls", "htv"};
    std::string output_dir = "out";
    std::string measure_mode = "pure_sum";  // pure_sum | tau
    bool timing_in_summary = true;
    int log_stride = 1;       // per-iteration metric logging stride
    int crossfade = 0;        // fusion blend width in columns
    double eta = 1.01;
    int max_iter = 2000;
    std::map<std::string, SolverOverrides> overrides;

    PhantomSpec phantom_spec() const;
};

// Parses the flat key=value format: '#' starts a comment, blank lines are
// skipped, unknown keys are rejected with the list of valid keys, duplicate
// keys are an error, malformed lines report their line number.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig read_config(const std::string& path);

// Serialization used to keep the shipped preset files in sync with the
// built-in presets.
std::string config_to_text(const ExperimentConfig& cfg);

std::vector<std::string> valid_config_keys();

}  // namespace lsfm
