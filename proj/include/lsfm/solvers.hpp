#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "lsfm/assembly.hpp"
#include "lsfm/grid.hpp"

namespace lsfm {

// Shared configuration for the iterative reconstruction methods.
struct SolverConfig {
    double eta = 1.01;          // discrepancy safety factor (> 1)
    double noise_level = 0.0;   // relative data noise ||e|| / ||b||
    int max_iter = 1000;        // iteration cap (outer iterations for htv)
    std::vector<double> x0;     // initial guess; empty means zeros
    double tol_outer = 1e-3;    // htv outer-loop stabilization tolerance
    double tv_epsilon = 1e-6;   // smoothing of the TV gradient
    double relaxation = 1.0;    // SART relaxation weight
    int htv_inner = 15;         // inner least-squares steps per outer htv pass
    double lambda_reg0 = -1.0;  // initial htv penalty weight; <0 picks a scale automatically
    // Called after every iteration with (iteration, relative residual, iterate).
    std::function<void(int, double, const std::vector<double>&)> on_iterate;
};

enum class StopReason { discrepancy, max_iter, stabilized };

struct SolverResult {
    std::vector<double> x;
    int iterations = 0;
    std::vector<double> residual_history;  // ||b - A x_k|| / ||b|| per iteration
    StopReason stop_reason = StopReason::max_iter;
    double wall_time = 0.0;
    double nre = std::numeric_limits<double>::quiet_NaN();
    double ssim = std::numeric_limits<double>::quiet_NaN();
};

const char* stop_reason_name(StopReason r);

// True when the relative residual satisfies the discrepancy principle
// res <= eta * noise_level (with a tiny floating-point floor so that
// noise-free runs stop at numerically exact fits).
bool discrepancy_stop(double residual_rel, const SolverConfig& cfg);

// Smoothed isotropic total variation of a column-stacked n*n image with
// forward differences and reflective boundary, and its analytic gradient.
std::pair<double, std::vector<double>> tv(const std::vector<double>& x, const Grid& grid,
                                          double tv_epsilon);

SolverResult solve_mrnsd(const LinearSystem& system, const SolverConfig& cfg);
SolverResult solve_sart(const LinearSystem& system, const SolverConfig& cfg);
SolverResult solve_fista(const LinearSystem& system, const SolverConfig& cfg);
SolverResult solve_nnfcgls(const LinearSystem& system, const SolverConfig& cfg);
SolverResult solve_htv(const LinearSystem& system, const SolverConfig& cfg, const Grid& grid);

// Dispatch by algorithm name ("mrnsd", "sart", "fista", "nnfcgls", "htv").
SolverResult solve_by_name(const std::string& name, const LinearSystem& system,
                           const SolverConfig& cfg, const Grid& grid);

}  // namespace lsfm
