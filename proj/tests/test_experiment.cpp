#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsfm/experiment.hpp"

using namespace lsfm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("lsfm_exp_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    bool has(const std::string& name) const { return fs::exists(path / name); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ExperimentConfig small_config(const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.n = 21;
    cfg.beta = 0.01;
    cfg.seed = 3;
    cfg.solvers = {"sart", "fista"};
    cfg.max_iter = 40;
    cfg.output_dir = out_dir;
    cfg.timing_in_summary = false;
    return cfg;
}

std::vector<std::vector<std::string>> read_table(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::vector<std::string>> rows;
    std::string lineText;
    while (std::getline(in, lineText)) {
        if (lineText.empty()) continue;
        std::vector<std::string> row;
        std::size_t start = 0;
        while (start <= lineText.size()) {
            std::size_t comma = lineText.find(',', start);
            std::size_t end = (comma == std::string::npos) ? lineText.size() : comma;
            row.push_back(lineText.substr(start, end - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

TEST_CASE("pipeline stages write their artifacts incrementally") {
    TempDir tmp("stages");
    ExperimentConfig cfg = small_config(tmp.file("run"));

    CHECK(run_experiment(cfg, Stage::phantom).empty());
    for (const char* f : {"mu.csv", "mu.pgm", "lambda.csv", "attenuation.csv", "diffusion.csv",
                          "mask.pgm"})
        CHECK(fs::exists(fs::path(cfg.output_dir) / f));
    CHECK_FALSE(fs::exists(fs::path(cfg.output_dir) / "meas_left.csv"));

    CHECK(run_experiment(cfg, Stage::forward).empty());
    CHECK(fs::exists(fs::path(cfg.output_dir) / "meas_left.csv"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "meas_right.csv"));
    CHECK_FALSE(fs::exists(fs::path(cfg.output_dir) / "noisy_left.csv"));

    CHECK(run_experiment(cfg, Stage::noise).empty());
    CHECK(fs::exists(fs::path(cfg.output_dir) / "noisy_left.csv"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "run_info.csv"));
    CHECK_FALSE(fs::exists(fs::path(cfg.output_dir) / "fused.csv"));

    CHECK(run_experiment(cfg, Stage::fuse).empty());
    CHECK(fs::exists(fs::path(cfg.output_dir) / "fused.csv"));
    CHECK_FALSE(fs::exists(fs::path(cfg.output_dir) / "summary.csv"));

    std::vector<SummaryRow> rows = run_experiment(cfg);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].algorithm == "fused");
    CHECK(rows[0].iterations == 0);
    CHECK(rows[1].algorithm == "sart");
    CHECK(rows[2].algorithm == "fista");
    for (const char* f : {"summary.csv", "profiles.csv", "log_sart.csv", "log_fista.csv",
                          "recon_sart.csv", "recon_fista.csv", "recon_sart.pgm"})
        CHECK(fs::exists(fs::path(cfg.output_dir) / f));
    CHECK_FALSE(fs::exists(fs::path(cfg.output_dir) / "log_mrnsd.csv"));

    // Summary file mirrors the returned rows, fused line first.
    auto table = read_table(cfg.output_dir + "/summary.csv");
    REQUIRE(table.size() == 4);
    CHECK(table[0] == std::vector<std::string>{"algorithm", "iterations", "time_s", "nre", "ssim"});
    CHECK(table[1][0] == "fused");
    CHECK(table[2][0] == "sart");
    for (std::size_t r = 1; r < table.size(); ++r) {
        double e = std::stod(table[r][3]);
        double s = std::stod(table[r][4]);
        CHECK(e > 0.0);
        CHECK(e < 2.0);
        CHECK(s > -1.0);
        CHECK(s <= 1.0);
    }

    // Per-iteration logs: header plus one line per recorded iteration.
    auto log = read_table(cfg.output_dir + "/log_sart.csv");
    REQUIRE(log.size() >= 2);
    CHECK(log[0] == std::vector<std::string>{"iteration", "residual_rel", "nre", "ssim",
                                             "wall_time"});
    CHECK(log[1][0] == "1");
    CHECK(std::stod(log[1][4]) == 0.0);  // timing disabled

    // Profile table: one column per reconstruction after y/true/fused.
    auto prof = read_table(cfg.output_dir + "/profiles.csv");
    REQUIRE(static_cast<int>(prof.size()) == cfg.n + 1);
    CHECK(prof[0] == std::vector<std::string>{"y", "true", "fused", "sart", "fista"});

    // Run metadata records the achieved noise level.
    auto info = read_table(cfg.output_dir + "/run_info.csv");
    REQUIRE(info.size() == 6);
    CHECK(info[1][0] == "n");
    CHECK(info[1][1] == "21");
    CHECK(info[4][0] == "noise_level");
    CHECK(std::stod(info[4][1]) > 0.0);
}

TEST_CASE("reconstructions beat the fused baseline on both metrics") {
    TempDir tmp("baseline");
    ExperimentConfig cfg = small_config(tmp.file("run"));
    cfg.n = 33;
    cfg.solvers = {"fista"};
    cfg.max_iter = 300;
    std::vector<SummaryRow> rows = run_experiment(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].nre < rows[0].nre);
    CHECK(rows[1].ssim > rows[0].ssim);
}

TEST_CASE("disabled timing makes consecutive runs byte-identical") {
    TempDir tmp("determinism");
    ExperimentConfig cfg = small_config(tmp.file("a"));
    run_experiment(cfg);
    ExperimentConfig cfg2 = small_config(tmp.file("b"));
    run_experiment(cfg2);
    for (const char* f : {"summary.csv", "recon_sart.csv", "recon_fista.csv", "log_sart.csv",
                          "log_fista.csv", "fused.csv", "noisy_left.csv", "run_info.csv"}) {
        INFO("file ", std::string(f));
        CHECK(slurp(tmp.file("a/") + f) == slurp(tmp.file("b/") + f));
    }
}

TEST_CASE("environment variable overrides the configured output directory") {
    TempDir tmp("envdir");
    ExperimentConfig cfg = small_config(tmp.file("ignored"));
    CHECK(resolve_output_dir(cfg) == tmp.file("ignored"));

    ::setenv("LSFM_OUTPUT_DIR", tmp.file("actual").c_str(), 1);
    CHECK(resolve_output_dir(cfg) == tmp.file("actual"));
    run_experiment(cfg, Stage::phantom);
    ::unsetenv("LSFM_OUTPUT_DIR");

    CHECK(fs::exists(tmp.file("actual/mu.csv")));
    CHECK_FALSE(fs::exists(tmp.file("ignored/mu.csv")));
    CHECK(resolve_output_dir(cfg) == tmp.file("ignored"));
}

TEST_CASE("an empty object cannot be reconstructed but earlier stages run") {
    TempDir tmp("empty");
    ExperimentConfig cfg = small_config(tmp.file("run"));
    cfg.phantom = "empty";
    CHECK(run_experiment(cfg, Stage::fuse).empty());
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("heat verification: checks pass and artifacts appear") {
    TempDir tmp("heat");
    ExperimentConfig cfg;
    cfg.n = 33;
    cfg.output_dir = tmp.file("run");
    std::vector<std::string> notes = run_heat_verification(cfg);
    REQUIRE(notes.size() == 3);
    // The centered disk is not admissible for one-sided horizontal entry.
    CHECK(notes[0].rfind("note:", 0) == 0);
    CHECK(notes[0].find("no") != std::string::npos);
    CHECK(notes[1].rfind("ok:", 0) == 0);
    CHECK(notes[2].rfind("ok:", 0) == 0);
    for (const char* f : {"sigma.csv", "data_g.csv", "energy.csv"})
        CHECK(fs::exists(fs::path(cfg.output_dir) / f));

    // Both routes are finite sums of the same normal-mass cell terms, so the
    // reported mismatch should sit near roundoff, far below the gate.
    std::size_t at = notes[1].find("mismatch ");
    REQUIRE(at != std::string::npos);
    double worst = std::stod(notes[1].substr(at + 9));
    CHECK(worst < 1e-6);

    auto energy = read_table(cfg.output_dir + "/energy.csv");
    REQUIRE(energy.size() >= 3);
    CHECK(energy[0] == std::vector<std::string>{"t", "energy"});

    // The left half of a disk centered on the right frame edge runs from its
    // curved entry boundary to a common cut column: admissible.
    ExperimentConfig half = cfg;
    half.phantom = "uniform_disk";
    half.center_x = 2.0;
    half.output_dir = tmp.file("half");
    std::vector<std::string> half_notes = run_heat_verification(half);
    CHECK(half_notes[0].rfind("ok:", 0) == 0);
    CHECK(half_notes[1].rfind("ok:", 0) == 0);
}
