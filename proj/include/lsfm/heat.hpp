#pragma once

#include <utility>
#include <vector>

#include "lsfm/grid.hpp"
#include "lsfm/phantom.hpp"

namespace lsfm {

// Uniform 1D grid for the heat-equation checks, padded beyond the imaging
// frame so the decay-at-infinity boundary condition holds numerically.
struct Line {
    double y0 = 0;  // first node
    double dy = 0;  // spacing
    int m = 0;      // node count
    double y(int i) const { return y0 + i * dy; }
    int index_of(double yv) const;  // nearest node, clamped
};

// Line matching the grid's row nodes (same spacing, same orientation as
// increasing y), padded on both sides by pad_width.
Line padded_line(const Grid& grid, double pad_width);

// Diffusion-time profile sigma(h) = alpha_h^2(s) / 2 for each pixel row:
// half the tau-weighted second moment of psi along the row from the entry to
// column s; zero for rows that do not reach column s.
std::vector<double> sigma_profile(const CoefficientMaps& maps, const SupportMask& mask, int s_col,
                                  const Grid& grid);

// Initial heat profile f(y) = c * mu(y, s) * exp(-D(y, s)) sampled on the
// padded line (zero in the padding).
std::pair<Line, std::vector<double>> heat_initial_profile(const CoefficientMaps& maps, int s_col,
                                                          const Grid& grid, double pad_width);

// Heat-kernel value g = int f(r) (4 pi sigma)^{-1/2} exp(-(r-h)^2/(4 sigma)) dr
// by dy-weighted quadrature; sigma = 0 returns f at the node nearest h.
double gaussian_data(const std::vector<double>& f, const Line& line, double sigma_val, double h);

// Heat evolution U(t, .) from initial data f by kernel-quadrature
// convolution; t = 0 copies f.
std::vector<double> heat_evolve(const std::vector<double>& f, const Line& line, double t);

// Heat evolution treating f as piecewise constant on the node-centered cells
// (exact erf-difference convolution); stable for arbitrarily small t.
double heat_evolve_exact_at(const std::vector<double>& f, const Line& line, double t, double yv);

// One-sided exterior energy I(t_k) = 1/2 sum_{y < rho_k} U(t_k, y)^2 dy.
std::vector<double> exterior_energy(const std::vector<double>& f, const Line& line,
                                    const std::vector<double>& rho,
                                    const std::vector<double>& times);

}  // namespace lsfm
