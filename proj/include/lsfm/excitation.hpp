#pragma once

#include <optional>
#include <vector>

#include "lsfm/grid.hpp"
#include "lsfm/image.hpp"
#include "lsfm/phantom.hpp"

namespace lsfm {

enum class Side { left, right };

// Pencil-beam intensity for one excitation height and side, on the pixel
// grid. v(i,j) is the bin-averaged beam density in row i of column j, so the
// tau-weighted column sum equals the in-frame beam mass. log_attenuation[j]
// is the accumulated excitation attenuation integral up to column j, and
// alpha_sq_col[j] the beam variance at column j (both in the frame of the
// stored v, i.e. already mirrored back for right-side fields).
struct ExcitationField {
    Image v;
    int h_index = 0;
    Side side = Side::left;
    std::optional<int> entry_col;
    std::vector<double> log_attenuation;
    std::vector<double> alpha_sq_col;
};

struct Moments {
    double e0 = 0, e1 = 0, e2 = 0;
};

// Left-Riemann path moments of psi along one row, from the entry node to
// node x_col: E_k = sum_{j=entry}^{x_col-1} (x_j - x_entry)^k psi_j tau.
Moments moments(const std::vector<double>& psi_row, int entry, int x_col, const Grid& grid);

// Beam variance alpha^2 = sum (x_{x_col} - x_j)^2 psi_j tau over the same
// range; equals E2 - 2 L E1 + L^2 E0 with L the travelled depth.
double alpha_sq(const std::vector<double>& psi_row, int entry, int x_col, const Grid& grid);

// Full beam intensity field for the excitation height at pixel row h_index.
// Right-side fields are computed by mirroring the maps, running the left
// solver and mirroring back.
ExcitationField excitation_field(const CoefficientMaps& maps, const SupportMask& mask, int h_index,
                                 Side side, const Grid& grid);

// Angular beam intensity u_h(x, y, omega) of the closed-form pencil-beam
// solution, evaluated in a continuum model whose coefficients are piecewise
// constant per forward cell [x_j, x_{j+1}) along the beam row. Requires a
// position past the entry with positive variance.
double angular_intensity(const CoefficientMaps& maps, const SupportMask& mask, int h_index,
                         double x, double y, double omega, const Grid& grid);

// Marginal (omega-integrated) intensity of the same continuum model; used as
// the closed-form counterpart in angular quadrature checks.
double marginal_intensity(const CoefficientMaps& maps, const SupportMask& mask, int h_index,
                          double x, double y, const Grid& grid);

// Fluorescence source w = c * v .* mu excited by the beam.
Image excited_source(const ExcitationField& field, const CoefficientMaps& maps);

}  // namespace lsfm
