#include "lsfm/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lsfm/io.hpp"

namespace lsfm {

namespace {

const std::vector<std::string> kSolverNames = {"mrnsd", "sart", "fista", "nnfcgls", "htv"};

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line_no, const std::string& what) {
    throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + what);
}

double to_double(const std::string& v, int line_no) {
    double out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        fail(line_no, "expected a number, got '" + v + "'");
    return out;
}

long long to_int(const std::string& v, int line_no) {
    long long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        fail(line_no, "expected an integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& v, int line_no) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail(line_no, "expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= v.size()) {
        size_t comma = v.find(',', start);
        size_t end = (comma == std::string::npos) ? v.size() : comma;
        std::string item = trim(v.substr(start, end - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string joined_keys() {
    std::string s;
    for (const auto& k : valid_config_keys()) {
        if (!s.empty()) s += ", ";
        s += k;
    }
    return s;
}

}  // namespace

std::vector<std::string> valid_config_keys() {
    std::vector<std::string> keys = {
        "n",          "phantom",        "lambda_mode",  "c",
        "c_hat",      "c_tilde",        "lambda_bg",    "lambda_mu_scale",
        "mu_amplitude", "radius",       "center_x",     "center_y",
        "a_recon",    "lambda_recon",   "beta",         "seed",
        "solvers",    "output_dir",     "measure_mode", "timing_in_summary",
        "log_stride", "crossfade",      "eta",          "max_iter",
    };
    for (const auto& s : kSolverNames) {
        keys.push_back(s + ".max_iter");
        keys.push_back(s + ".relaxation");
        keys.push_back(s + ".tol_outer");
        keys.push_back(s + ".inner");
        keys.push_back(s + ".lambda_reg0");
    }
    return keys;
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string lineText;
    std::set<std::string> seen;
    int line_no = 0;
    while (std::getline(in, lineText)) {
        ++line_no;
        size_t hash = lineText.find('#');
        if (hash != std::string::npos) lineText = lineText.substr(0, hash);
        lineText = trim(lineText);
        if (lineText.empty()) continue;
        size_t eq = lineText.find('=');
        if (eq == std::string::npos) fail(line_no, "expected key=value");
        std::string key = trim(lineText.substr(0, eq));
        std::string value = trim(lineText.substr(eq + 1));
        if (key.empty()) fail(line_no, "empty key");
        if (!seen.insert(key).second) fail(line_no, "duplicate key '" + key + "'");

        size_t dot = key.find('.');
        if (dot != std::string::npos) {
            std::string solver = key.substr(0, dot), field = key.substr(dot + 1);
            if (std::find(kSolverNames.begin(), kSolverNames.end(), solver) == kSolverNames.end())
                fail(line_no, "unknown key '" + key + "'; valid keys: " + joined_keys());
            SolverOverrides& ov = cfg.overrides[solver];
            if (field == "max_iter")
                ov.max_iter = static_cast<int>(to_int(value, line_no));
            else if (field == "relaxation")
                ov.relaxation = to_double(value, line_no);
            else if (field == "tol_outer")
                ov.tol_outer = to_double(value, line_no);
            else if (field == "inner")
                ov.htv_inner = static_cast<int>(to_int(value, line_no));
            else if (field == "lambda_reg0")
                ov.lambda_reg0 = to_double(value, line_no);
            else
                fail(line_no, "unknown key '" + key + "'; valid keys: " + joined_keys());
            continue;
        }

        if (key == "n") {
            cfg.n = static_cast<int>(to_int(value, line_no));
            if (cfg.n < 2) fail(line_no, "n must be at least 2");
        } else if (key == "phantom") {
            cfg.phantom = value;
        } else if (key == "lambda_mode") {
            if (value != "constant" && value != "variable")
                fail(line_no, "lambda_mode must be constant or variable");
            cfg.lambda_mode = value;
        } else if (key == "c") {
            cfg.c = to_double(value, line_no);
        } else if (key == "c_hat") {
            cfg.c_hat = to_double(value, line_no);
        } else if (key == "c_tilde") {
            cfg.c_tilde = to_double(value, line_no);
        } else if (key == "lambda_bg") {
            cfg.lambda_bg = to_double(value, line_no);
        } else if (key == "lambda_mu_scale") {
            cfg.lambda_mu_scale = to_double(value, line_no);
        } else if (key == "mu_amplitude") {
            cfg.mu_amplitude = to_double(value, line_no);
        } else if (key == "radius") {
            cfg.radius = to_double(value, line_no);
        } else if (key == "center_x") {
            cfg.center_x = to_double(value, line_no);
        } else if (key == "center_y") {
            cfg.center_y = to_double(value, line_no);
        } else if (key == "a_recon") {
            cfg.a_recon = to_double(value, line_no);
        } else if (key == "lambda_recon") {
            cfg.lambda_recon = to_double(value, line_no);
        } else if (key == "beta") {
            cfg.beta = to_double(value, line_no);
            if (!(cfg.beta > 0)) fail(line_no, "beta must be positive");
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(to_int(value, line_no));
        } else if (key == "solvers") {
            cfg.solvers = split_list(value);
            if (cfg.solvers.empty()) fail(line_no, "solvers list is empty");
            for (const auto& s : cfg.solvers)
                if (std::find(kSolverNames.begin(), kSolverNames.end(), s) == kSolverNames.end())
                    fail(line_no, "unknown solver '" + s +
                                      "' (expected mrnsd, sart, fista, nnfcgls, htv)");
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else if (key == "measure_mode") {
            if (value != "pure_sum" && value != "tau")
                fail(line_no, "measure_mode must be pure_sum or tau");
            cfg.measure_mode = value;
        } else if (key == "timing_in_summary") {
            cfg.timing_in_summary = to_bool(value, line_no);
        } else if (key == "log_stride") {
            cfg.log_stride = static_cast<int>(to_int(value, line_no));
            if (cfg.log_stride < 1) fail(line_no, "log_stride must be >= 1");
        } else if (key == "crossfade") {
            cfg.crossfade = static_cast<int>(to_int(value, line_no));
        } else if (key == "eta") {
            cfg.eta = to_double(value, line_no);
            if (!(cfg.eta > 1)) fail(line_no, "eta must be > 1");
        } else if (key == "max_iter") {
            cfg.max_iter = static_cast<int>(to_int(value, line_no));
            if (cfg.max_iter < 1) fail(line_no, "max_iter must be >= 1");
        } else {
            fail(line_no, "unknown key '" + key + "'; valid keys: " + joined_keys());
        }
    }
    return cfg;
}

ExperimentConfig read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config_text(buf.str());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

std::string config_to_text(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "n=" << cfg.n << "\n";
    out << "phantom=" << cfg.phantom << "\n";
    out << "lambda_mode=" << cfg.lambda_mode << "\n";
    out << "c=" << format_double(cfg.c) << "\n";
    out << "c_hat=" << format_double(cfg.c_hat) << "\n";
    out << "c_tilde=" << format_double(cfg.c_tilde) << "\n";
    out << "lambda_bg=" << format_double(cfg.lambda_bg) << "\n";
    out << "lambda_mu_scale=" << format_double(cfg.lambda_mu_scale) << "\n";
    out << "mu_amplitude=" << format_double(cfg.mu_amplitude) << "\n";
    out << "radius=" << format_double(cfg.radius) << "\n";
    out << "center_x=" << format_double(cfg.center_x) << "\n";
    out << "center_y=" << format_double(cfg.center_y) << "\n";
    out << "a_recon=" << format_double(cfg.a_recon) << "\n";
    out << "lambda_recon=" << format_double(cfg.lambda_recon) << "\n";
    out << "beta=" << format_double(cfg.beta) << "\n";
    out << "seed=" << cfg.seed << "\n";
    std::string solvers;
    for (const auto& s : cfg.solvers) {
        if (!solvers.empty()) solvers += ",";
        solvers += s;
    }
    out << "solvers=" << solvers << "\n";
    out << "output_dir=" << cfg.output_dir << "\n";
    out << "measure_mode=" << cfg.measure_mode << "\n";
    out << "timing_in_summary=" << (cfg.timing_in_summary ? "true" : "false") << "\n";
    out << "log_stride=" << cfg.log_stride << "\n";
    out << "crossfade=" << cfg.crossfade << "\n";
    out << "eta=" << format_double(cfg.eta) << "\n";
    out << "max_iter=" << cfg.max_iter << "\n";
    for (const auto& [solver, ov] : cfg.overrides) {
        if (ov.max_iter) out << solver << ".max_iter=" << *ov.max_iter << "\n";
        if (ov.relaxation) out << solver << ".relaxation=" << format_double(*ov.relaxation) << "\n";
        if (ov.tol_outer) out << solver << ".tol_outer=" << format_double(*ov.tol_outer) << "\n";
        if (ov.htv_inner) out << solver << ".inner=" << *ov.htv_inner << "\n";
        if (ov.lambda_reg0)
            out << solver << ".lambda_reg0=" << format_double(*ov.lambda_reg0) << "\n";
    }
    return out.str();
}

PhantomSpec ExperimentConfig::phantom_spec() const {
    PhantomSpec spec;
    spec.shape = phantom;
    spec.lambda_mode = (lambda_mode == "variable") ? LambdaMode::variable : LambdaMode::constant;
    spec.c = c;
    spec.c_hat = c_hat;
    spec.c_tilde = c_tilde;
    spec.lambda_bg = lambda_bg;
    spec.lambda_mu_scale = lambda_mu_scale;
    spec.mu_amplitude = mu_amplitude;
    spec.radius = radius;
    spec.center_x = center_x;
    spec.center_y = center_y;
    return spec;
}

}  // namespace lsfm
