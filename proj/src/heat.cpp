#include "lsfm/heat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lsfm/detection.hpp"

namespace lsfm {

int Line::index_of(double yv) const {
    int i = static_cast<int>(std::lround((yv - y0) / dy));
    return std::clamp(i, 0, m - 1);
}

Line padded_line(const Grid& grid, double pad_width) {
    Line line;
    line.dy = grid.tau_y;
    int pad = static_cast<int>(std::ceil(pad_width / grid.tau_y));
    line.y0 = grid.y(grid.n - 1) - pad * grid.tau_y;  // lowest grid row minus padding
    line.m = grid.n + 2 * pad;
    return line;
}

std::vector<double> sigma_profile(const CoefficientMaps& maps, const SupportMask& mask, int s_col,
                                  const Grid& grid) {
    const int n = grid.n;
    if (s_col < 0 || s_col >= n) throw std::invalid_argument("sigma_profile: column out of range");
    std::vector<double> sigma(n, 0.0);
    const double xs = grid.x(s_col);
    for (int i = 0; i < n; ++i) {
        auto entry = entry_depth(mask, i);
        if (!entry || *entry > s_col) continue;  // row outside Y_s
        double acc = 0.0;
        for (int j = *entry; j < s_col; ++j) {
            double d = xs - grid.x(j);
            acc += d * d * maps.psi(i, j) * grid.tau;
        }
        sigma[i] = 0.5 * acc;
    }
    return sigma;
}

std::pair<Line, std::vector<double>> heat_initial_profile(const CoefficientMaps& maps, int s_col,
                                                          const Grid& grid, double pad_width) {
    Line line = padded_line(grid, pad_width);
    std::vector<double> f(line.m, 0.0);
    const Image d = cumulative_attenuation(maps.a, grid);
    for (int i = 0; i < grid.n; ++i) {
        int at = line.index_of(grid.y(i));
        f[at] = maps.c * maps.mu(i, s_col) * std::exp(-d(i, s_col));
    }
    return {line, std::move(f)};
}

namespace {

double heat_kernel(double u, double t) {
    return std::exp(-u * u / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t);
}

}  // namespace

double gaussian_data(const std::vector<double>& f, const Line& line, double sigma_val, double h) {
    if (sigma_val < 0) throw std::invalid_argument("gaussian_data: negative sigma");
    if (sigma_val == 0) return f[line.index_of(h)];
    double acc = 0.0;
    for (int i = 0; i < line.m; ++i)
        if (f[i] != 0.0) acc += f[i] * heat_kernel(line.y(i) - h, sigma_val);
    return acc * line.dy;
}

std::vector<double> heat_evolve(const std::vector<double>& f, const Line& line, double t) {
    if (t < 0) throw std::invalid_argument("heat_evolve: negative time");
    if (static_cast<int>(f.size()) != line.m)
        throw std::invalid_argument("heat_evolve: length mismatch");
    if (t == 0) return f;
    std::vector<double> u(line.m, 0.0);
    // Kernel values depend only on the index offset on the uniform line.
    const double width = 8.0 * std::sqrt(2.0 * t);
    const int reach = std::min(line.m - 1, static_cast<int>(std::ceil(width / line.dy)));
    std::vector<double> k(reach + 1);
    for (int d = 0; d <= reach; ++d) k[d] = heat_kernel(d * line.dy, t) * line.dy;
    for (int j = 0; j < line.m; ++j) {
        double fj = f[j];
        if (fj == 0.0) continue;
        int lo = std::max(0, j - reach), hi = std::min(line.m - 1, j + reach);
        for (int i = lo; i <= hi; ++i) u[i] += fj * k[std::abs(i - j)];
    }
    return u;
}

double heat_evolve_exact_at(const std::vector<double>& f, const Line& line, double t, double yv) {
    if (t < 0) throw std::invalid_argument("heat_evolve_exact_at: negative time");
    if (t == 0) return f[line.index_of(yv)];
    const double s = std::sqrt(4.0 * t);
    double acc = 0.0;
    // f is piecewise constant on the node-centered cells; the heat solution
    // is a sum of erf differences over the cell edges.
    for (int i = 0; i < line.m; ++i) {
        if (f[i] == 0.0) continue;
        double a = line.y(i) - 0.5 * line.dy;
        double b = line.y(i) + 0.5 * line.dy;
        acc += f[i] * 0.5 * (std::erf((yv - a) / s) - std::erf((yv - b) / s));
    }
    return acc;
}

std::vector<double> exterior_energy(const std::vector<double>& f, const Line& line,
                                    const std::vector<double>& rho,
                                    const std::vector<double>& times) {
    if (rho.size() != times.size())
        throw std::invalid_argument("exterior_energy: rho/times length mismatch");
    std::vector<double> energy(times.size(), 0.0);
    for (size_t k = 0; k < times.size(); ++k) {
        std::vector<double> u = heat_evolve(f, line, times[k]);
        double acc = 0.0;
        for (int i = 0; i < line.m; ++i)
            if (line.y(i) < rho[k]) acc += u[i] * u[i];
        energy[k] = 0.5 * acc * line.dy;
    }
    return energy;
}

}  // namespace lsfm
