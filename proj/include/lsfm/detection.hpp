#pragma once

#include "lsfm/excitation.hpp"
#include "lsfm/grid.hpp"
#include "lsfm/image.hpp"
#include "lsfm/phantom.hpp"

namespace lsfm {

// Camera data for both illumination sides: entry (l, k) is the measurement
// for excitation height l (pixel row l) at camera pixel column k, stored in
// the common unmirrored frame. noise_level is ||noisy - clean|| / ||clean||
// when noise was applied, else 0.
struct MeasurementSet {
    Image left;
    Image right;
    double noise_level = 0.0;
};

// Weight applied to the fluorescence sum over rows: tau_weighted makes the
// sums converge to line integrals with resolution; pure_sum reproduces the
// plain unweighted pixel sums.
enum class MeasureMode { tau_weighted, pure_sum };

// Accumulated fluorescence attenuation toward the camera (above row 0):
// D(i,k) = sum_{z<=i} a(z,k) * tau.
Image cumulative_attenuation(const Image& a, const Grid& grid);

// Single-line measurement p = c * sum_i mu(i,k) v(i,k) exp(-D(i,k)) * w.
double measure_line(const Image& mu, const ExcitationField& field, const Image& D, int k,
                    const Grid& grid, double c, MeasureMode mode);

// All 2N measurements lines: for every height and both sides.
MeasurementSet measure_all(const CoefficientMaps& maps, const SupportMask& mask, const Image& mu,
                           const Grid& grid, MeasureMode mode);

}  // namespace lsfm
