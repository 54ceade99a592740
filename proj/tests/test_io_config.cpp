#include <doctest.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsfm/assembly.hpp"
#include "lsfm/config.hpp"
#include "lsfm/grid.hpp"
#include "lsfm/io.hpp"
#include "lsfm/phantom.hpp"

using namespace lsfm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / "lsfm_io_test";
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

bool same_bits(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("format_double survives a parse round trip bit for bit") {
    for (double v : {0.1, 1.0 / 3.0, 2.0 / 258.0, -0.0, 1e-308, 123456789.123456789, 6.02e23}) {
        std::string s = format_double(v);
        double back = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), back);
        REQUIRE(ec == std::errc());
        REQUIRE(ptr == s.data() + s.size());
        CHECK(same_bits(back, v));
    }
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("image and vector CSV round trips are bit exact") {
    TempDir tmp;
    Image img(5);
    double seedv = 0.123;
    for (auto& v : img.raw()) {
        v = seedv;
        seedv = seedv * 3.9 * (1 - seedv);  // logistic scramble: awkward decimals
    }
    img(2, 3) = -0.0;
    img(4, 4) = 1e-17;
    write_csv(img, tmp.file("img.csv"));
    Image back = read_csv_image(tmp.file("img.csv"));
    REQUIRE(back.size() == 5);
    for (std::size_t i = 0; i < img.raw().size(); ++i) CHECK(same_bits(back.raw()[i], img.raw()[i]));

    std::vector<double> vec = {0.1, -2.0 / 7.0, 5e-321, 42.0};
    write_vector_csv(vec, tmp.file("vec.csv"));
    std::vector<double> vback = read_vector_csv(tmp.file("vec.csv"));
    REQUIRE(vback.size() == vec.size());
    for (std::size_t i = 0; i < vec.size(); ++i) CHECK(same_bits(vback[i], vec[i]));
}

TEST_CASE("CSV reader rejects ragged tables, bad numbers, missing files") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("ragged.csv"));
        out << "1,2\n3\n";
    }
    CHECK_THROWS_AS(read_csv_image(tmp.file("ragged.csv")), std::runtime_error);
    {
        std::ofstream out(tmp.file("bad.csv"));
        out << "1,spam\n3,4\n";
    }
    CHECK_THROWS_WITH_AS(read_csv_image(tmp.file("bad.csv")),
                         doctest::Contains("bad number"), std::runtime_error);
    CHECK_THROWS_AS(read_csv_image(tmp.file("missing.csv")), std::runtime_error);
    CHECK_THROWS_AS(read_vector_csv(tmp.file("missing.csv")), std::runtime_error);
}

TEST_CASE("PGM previews are min-max scaled with the expected header") {
    TempDir tmp;
    Image img(2);
    img(0, 0) = 0.0;
    img(0, 1) = 1.0;
    img(1, 0) = 2.0;
    img(1, 1) = 3.0;
    write_pgm(img, tmp.file("img.pgm"));
    std::istringstream in(slurp(tmp.file("img.pgm")));
    std::string magic;
    int w, h, maxval;
    in >> magic >> w >> h >> maxval;
    CHECK(magic == "P2");
    CHECK(w == 2);
    CHECK(h == 2);
    CHECK(maxval == 255);
    int p00, p01, p10, p11;
    in >> p00 >> p01 >> p10 >> p11;
    CHECK(p00 == 0);
    CHECK(p01 == 85);
    CHECK(p10 == 170);
    CHECK(p11 == 255);

    Image flat(2);
    for (auto& v : flat.raw()) v = 7.0;
    write_pgm(flat, tmp.file("flat.pgm"));
    std::istringstream fin(slurp(tmp.file("flat.pgm")));
    fin >> magic >> w >> h >> maxval >> p00 >> p01 >> p10 >> p11;
    CHECK(p00 == 0);
    CHECK(p11 == 0);

    SupportMask mask(2);
    mask.set(0, 1, true);
    write_pgm(mask, tmp.file("mask.pgm"));
    std::istringstream min_(slurp(tmp.file("mask.pgm")));
    min_ >> magic >> w >> h >> maxval >> p00 >> p01 >> p10 >> p11;
    CHECK(p00 == 0);
    CHECK(p01 == 255);
    CHECK(p10 == 0);
    CHECK(p11 == 0);
}

TEST_CASE("matrix market export round trips through a plain text parse") {
    TempDir tmp;
    SparseOperator op = make_dense_operator(2, 3, {1.5, 0.0, 2.5, 0.0, 0.25, 0.0});
    write_matrix_market(op, tmp.file("op.mtx"));
    std::istringstream in(slurp(tmp.file("op.mtx")));
    std::string header;
    std::getline(in, header);
    CHECK(header == "%%MatrixMarket matrix coordinate real general");
    std::int64_t rows, cols, nnz;
    in >> rows >> cols >> nnz;
    CHECK(rows == 2);
    CHECK(cols == 3);
    CHECK(nnz == 3);
    std::vector<double> dense(6, 0.0);
    for (int t = 0; t < nnz; ++t) {
        std::int64_t r, c;
        double v;
        in >> r >> c >> v;
        dense[(r - 1) * 3 + (c - 1)] = v;
    }
    CHECK(dense == std::vector<double>{1.5, 0.0, 2.5, 0.0, 0.25, 0.0});

    // Matrix-free operators have nothing to export.
    Grid g = make_grid(6, 0.0, 2.0, -1.0, 1.0);
    auto [maps, mask] = make_phantom(PhantomSpec{}, g);
    SparseOperator free_op =
        build_system(maps, mask, g, MeasureMode::tau_weighted, /*matrix_free=*/true);
    CHECK_THROWS_AS(write_matrix_market(free_op, tmp.file("free.mtx")), std::invalid_argument);
}

TEST_CASE("empty config text yields the documented defaults") {
    ExperimentConfig cfg = parse_config_text("");
    CHECK(cfg.n == 129);
    CHECK(cfg.phantom == "disk_structured");
    CHECK(cfg.lambda_mode == "constant");
    CHECK(cfg.c == 1.0);
    CHECK(cfg.c_tilde == 0.6);
    CHECK(cfg.lambda_bg == 1.1);
    CHECK(std::isnan(cfg.a_recon));
    CHECK(std::isnan(cfg.lambda_recon));
    CHECK(cfg.beta == 0.01);
    CHECK(cfg.solvers == std::vector<std::string>{"mrnsd", "sart", "fista", "nnfcgls", "htv"});
    CHECK(cfg.measure_mode == "pure_sum");
    CHECK(cfg.eta == 1.01);
    CHECK(cfg.overrides.empty());
}

TEST_CASE("config serialization round trips including solver overrides") {
    ExperimentConfig cfg;
    cfg.n = 65;
    cfg.lambda_mode = "variable";
    cfg.lambda_mu_scale = 0.5;
    cfg.a_recon = 1.1;
    cfg.lambda_recon = 1.1;
    cfg.beta = 0.001;
    cfg.seed = 99;
    cfg.solvers = {"fista", "htv"};
    cfg.output_dir = "runs/demo";
    cfg.timing_in_summary = false;
    cfg.crossfade = 4;
    cfg.overrides["mrnsd"].max_iter = 500;
    cfg.overrides["sart"].relaxation = 0.25;
    cfg.overrides["htv"].htv_inner = 20;
    cfg.overrides["htv"].lambda_reg0 = 0.5;
    cfg.overrides["fista"].tol_outer = 1e-4;

    std::string text = config_to_text(cfg);
    ExperimentConfig back = parse_config_text(text);
    CHECK(config_to_text(back) == text);
    CHECK(back.n == 65);
    CHECK(back.lambda_mu_scale == 0.5);
    CHECK(back.a_recon == 1.1);
    CHECK(back.solvers == std::vector<std::string>{"fista", "htv"});
    CHECK(back.timing_in_summary == false);
    REQUIRE(back.overrides.count("htv") == 1);
    CHECK(*back.overrides.at("htv").htv_inner == 20);
    CHECK(*back.overrides.at("htv").lambda_reg0 == 0.5);
    CHECK(*back.overrides.at("sart").relaxation == 0.25);

    // Unset reconstruction coefficients serialize as nan and parse back.
    ExperimentConfig def;
    ExperimentConfig def_back = parse_config_text(config_to_text(def));
    CHECK(std::isnan(def_back.a_recon));
}

TEST_CASE("config parser reports the offending line and the valid keys") {
    CHECK_THROWS_WITH_AS(parse_config_text("bogus=1"),
                         doctest::Contains("config line 1"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config_text("bogus=1"), doctest::Contains("valid keys"),
                         std::invalid_argument);
    // Comments and blanks still count toward the reported line number.
    CHECK_THROWS_WITH_AS(parse_config_text("# preset\n\n# more\nn=oops\n"),
                         doctest::Contains("config line 4"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config_text("n=5\nn=7\n"), doctest::Contains("duplicate key"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config_text("n 5\n"), doctest::Contains("expected key=value"),
                         std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("c=abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("n=1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("beta=0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("eta=1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("lambda_mode=sideways"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("measure_mode=raw"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("solvers="), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("solvers=mrnsd,banana"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("log_stride=0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("max_iter=0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("timing_in_summary=maybe"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("mrnsd.bogus=1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("banana.max_iter=1"), std::invalid_argument);

    // Valid text with comments, blanks, and inline comments parses fine.
    ExperimentConfig ok = parse_config_text("# preset\nn=33  # desk size\n\nsolvers= sart , htv\n");
    CHECK(ok.n == 33);
    CHECK(ok.solvers == std::vector<std::string>{"sart", "htv"});
}

TEST_CASE("config files read from disk prefix errors with the path") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("good.cfg"));
        out << "n=17\nbeta=0.002\nhtv.inner=9\n";
    }
    ExperimentConfig cfg = read_config(tmp.file("good.cfg"));
    CHECK(cfg.n == 17);
    CHECK(cfg.beta == 0.002);
    CHECK(*cfg.overrides.at("htv").htv_inner == 9);

    {
        std::ofstream out(tmp.file("bad.cfg"));
        out << "n=17\nwhat\n";
    }
    CHECK_THROWS_WITH_AS(read_config(tmp.file("bad.cfg")), doctest::Contains("bad.cfg"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(read_config(tmp.file("bad.cfg")), doctest::Contains("config line 2"),
                         std::invalid_argument);
    CHECK_THROWS_AS(read_config(tmp.file("nope.cfg")), std::runtime_error);
}

TEST_CASE("experiment config maps onto the phantom description") {
    ExperimentConfig cfg;
    cfg.phantom = "uniform_disk";
    cfg.lambda_mode = "variable";
    cfg.lambda_mu_scale = 0.5;
    cfg.radius = 0.6;
    cfg.center_y = -0.1;
    cfg.mu_amplitude = 2.0;
    PhantomSpec spec = cfg.phantom_spec();
    CHECK(spec.shape == "uniform_disk");
    CHECK(spec.lambda_mode == LambdaMode::variable);
    CHECK(spec.lambda_mu_scale == 0.5);
    CHECK(spec.radius == 0.6);
    CHECK(spec.center_y == -0.1);
    CHECK(spec.mu_amplitude == 2.0);
}

TEST_CASE("the advertised key list covers flat and dotted keys") {
    std::vector<std::string> keys = valid_config_keys();
    for (const char* k : {"n", "beta", "solvers", "measure_mode", "mrnsd.max_iter",
                          "sart.relaxation", "htv.inner", "htv.lambda_reg0", "fista.tol_outer"})
        CHECK(std::find(keys.begin(), keys.end(), k) != keys.end());
}
