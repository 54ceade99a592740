#pragma once

#include <string>
#include <vector>

#include "lsfm/config.hpp"

namespace lsfm {

// One line of the summary table written by a reconstruction run.
struct SummaryRow {
    std::string algorithm;
    int iterations = 0;
    double time_s = 0.0;
    double nre = 0.0;
    double ssim = 0.0;
};

// Pipeline stages in execution order; running a stage runs everything before
// it as well.
enum class Stage { phantom, forward, noise, fuse, reconstruct };

// Runs the experiment up to the requested stage, writing artifacts (PGM
// previews, raw CSVs, per-solver logs, summary table, mid-column profiles)
// into the output directory. Returns the summary rows (empty before the
// reconstruct stage). The output directory may be overridden with the
// LSFM_OUTPUT_DIR environment variable.
std::vector<SummaryRow> run_experiment(const ExperimentConfig& cfg,
                                       Stage stage = Stage::reconstruct);

// Heat-reformulation verification on the configured phantom: writes sigma,
// boundary-data and exterior-energy CSVs and returns human-readable check
// lines ("ok: ..." / "FAIL: ...").
std::vector<std::string> run_heat_verification(const ExperimentConfig& cfg);

// Built-in presets mirroring the two benchmark experiments at full
// resolution (N = 257): constant attenuation with beta = 0.01, and variable
// attenuation reconstructed with constant coefficients at beta = 0.001.
ExperimentConfig example1_config();
ExperimentConfig example2_config();

// Resolved output directory (config value or environment override).
std::string resolve_output_dir(const ExperimentConfig& cfg);

}  // namespace lsfm
