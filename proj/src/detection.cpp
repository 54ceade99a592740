#include "lsfm/detection.hpp"

#include <cmath>
#include <stdexcept>

namespace lsfm {

Image cumulative_attenuation(const Image& a, const Grid& grid) {
    const int n = a.size();
    Image d(n);
    for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            // Partial column sums from the camera side (row 0), own row
            // included: the farther a pixel is from the camera, the greater
            // the accumulated value.
            acc += a(i, k) * grid.tau_y;
            d(i, k) = acc;
        }
    }
    return d;
}

double measure_line(const Image& mu, const ExcitationField& field, const Image& D, int k,
                    const Grid& grid, double c, MeasureMode mode) {
    const int n = mu.size();
    if (k < 0 || k >= n) throw std::invalid_argument("measure_line: column out of range");
    const double w = (mode == MeasureMode::tau_weighted) ? grid.tau_y : 1.0;
    double p = 0.0;
    for (int i = 0; i < n; ++i) {
        double vi = field.v(i, k);
        if (vi != 0.0) p += mu(i, k) * vi * std::exp(-D(i, k));
    }
    return c * w * p;
}

MeasurementSet measure_all(const CoefficientMaps& maps, const SupportMask& mask, const Image& mu,
                           const Grid& grid, MeasureMode mode) {
    const int n = grid.n;
    MeasurementSet meas;
    meas.left = Image(n);
    meas.right = Image(n);

    const Image d = cumulative_attenuation(maps.a, grid);
    for (int l = 0; l < n; ++l) {
        ExcitationField f = excitation_field(maps, mask, l, Side::left, grid);
        if (!f.entry_col) continue;
        for (int k = 0; k < n; ++k) meas.left(l, k) = measure_line(mu, f, d, k, grid, maps.c, mode);
    }

    // Right side: run the mirrored geometry, then store back in the common
    // frame (measurement for camera column k comes from mirrored column
    // n-1-k).
    const CoefficientMaps mm = maps.mirrored_columns();
    const SupportMask mmask = mask.mirrored_columns();
    const Image mmu = mu.mirrored_columns();
    const Image md = cumulative_attenuation(mm.a, grid);
    for (int l = 0; l < n; ++l) {
        ExcitationField f = excitation_field(mm, mmask, l, Side::left, grid);
        if (!f.entry_col) continue;
        for (int k = 0; k < n; ++k)
            meas.right(l, n - 1 - k) = measure_line(mmu, f, md, k, grid, mm.c, mode);
    }
    return meas;
}

}  // namespace lsfm
