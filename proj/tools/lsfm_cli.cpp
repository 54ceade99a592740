#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lsfm/config.hpp"
#include "lsfm/experiment.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string output_dir;
    bool full = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("-c,--config", opts.config_path, "experiment config file (key=value lines)");
    cmd->add_option("-o,--output-dir", opts.output_dir,
                    "output directory (overrides config; LSFM_OUTPUT_DIR overrides both)");
    cmd->add_flag("--full", opts.full, "run at full resolution (N=257)");
}

lsfm::ExperimentConfig load(const CommonOpts& opts) {
    lsfm::ExperimentConfig cfg =
        opts.config_path.empty() ? lsfm::ExperimentConfig{} : lsfm::read_config(opts.config_path);
    if (!opts.output_dir.empty()) cfg.output_dir = opts.output_dir;
    if (opts.full) cfg.n = 257;
    return cfg;
}

int run_stage(const CommonOpts& opts, lsfm::Stage stage) {
    lsfm::ExperimentConfig cfg = load(opts);
    std::vector<lsfm::SummaryRow> rows = lsfm::run_experiment(cfg, stage);
    if (!rows.empty()) {
        std::printf("%-10s %10s %10s %10s %10s\n", "algorithm", "iterations", "time_s", "nre",
                    "ssim");
        for (const auto& r : rows)
            std::printf("%-10s %10d %10.3f %10.5f %10.5f\n", r.algorithm.c_str(), r.iterations,
                        r.time_s, r.nre, r.ssim);
    }
    std::printf("artifacts written to %s\n", lsfm::resolve_output_dir(cfg).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Light-sheet fluorescence imaging simulator and reconstruction toolkit:\n"
        "pencil-beam excitation, two-sided camera measurements, Poisson noise,\n"
        "and nonnegative iterative reconstruction."};
    app.require_subcommand(1);

    CommonOpts phantom_o, forward_o, noise_o, fuse_o, recon_o, heat_o, report_o;
    CLI::App* cmd_phantom = app.add_subcommand("phantom", "generate the test object and maps");
    add_common(cmd_phantom, phantom_o);
    CLI::App* cmd_forward = app.add_subcommand("forward", "simulate clean measurements");
    add_common(cmd_forward, forward_o);
    CLI::App* cmd_noise = app.add_subcommand("noise", "apply scaled Poisson noise");
    add_common(cmd_noise, noise_o);
    CLI::App* cmd_fuse = app.add_subcommand("fuse", "build the two-sided fused image");
    add_common(cmd_fuse, fuse_o);
    CLI::App* cmd_recon =
        app.add_subcommand("reconstruct", "run the configured iterative solvers");
    add_common(cmd_recon, recon_o);
    CLI::App* cmd_heat = app.add_subcommand(
        "verify-heat", "check the diffusion-equation reading of the measurements");
    add_common(cmd_heat, heat_o);
    CLI::App* cmd_report =
        app.add_subcommand("report", "full pipeline plus the diffusion-equation checks");
    add_common(cmd_report, report_o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_phantom->parsed()) return run_stage(phantom_o, lsfm::Stage::phantom);
        if (cmd_forward->parsed()) return run_stage(forward_o, lsfm::Stage::forward);
        if (cmd_noise->parsed()) return run_stage(noise_o, lsfm::Stage::noise);
        if (cmd_fuse->parsed()) return run_stage(fuse_o, lsfm::Stage::fuse);
        if (cmd_recon->parsed()) return run_stage(recon_o, lsfm::Stage::reconstruct);
        if (cmd_heat->parsed()) {
            lsfm::ExperimentConfig cfg = load(heat_o);
            for (const std::string& line : lsfm::run_heat_verification(cfg))
                std::printf("%s\n", line.c_str());
            std::printf("artifacts written to %s\n", lsfm::resolve_output_dir(cfg).c_str());
            return 0;
        }
        if (cmd_report->parsed()) {
            int rc = run_stage(report_o, lsfm::Stage::reconstruct);
            if (rc != 0) return rc;
            lsfm::ExperimentConfig cfg = load(report_o);
            for (const std::string& line : lsfm::run_heat_verification(cfg))
                std::printf("%s\n", line.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
