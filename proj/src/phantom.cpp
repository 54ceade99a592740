#include "lsfm/phantom.hpp"

#include <cmath>
#include <stdexcept>

namespace lsfm {

CoefficientMaps CoefficientMaps::mirrored_columns() const {
    CoefficientMaps out;
    out.mu = mu.mirrored_columns();
    out.lambda = lambda.mirrored_columns();
    out.a = a.mirrored_columns();
    out.psi = psi.mirrored_columns();
    out.c = c;
    out.c_hat = c_hat;
    out.c_tilde = c_tilde;
    return out;
}

namespace {

bool in_disk(double x, double y, double cx, double cy, double r) {
    double dx = x - cx, dy = y - cy;
    return dx * dx + dy * dy <= r * r;
}

// Cell-like density pattern inside the unit-scaled disk: dim cytoplasm, a
// bright rim, a nucleus blob with a brighter core, and three small spots.
double structured_density(double px, double py, double r) {
    // (px, py): offset from the disk center; r: disk radius.
    double rr = std::sqrt(px * px + py * py) / r;
    double value = 0.35;                    // cytoplasm
    if (rr >= 0.82) value = 1.0;            // rim
    double nx = px + 0.30 * r, ny = py - 0.18 * r;
    if (nx * nx + ny * ny <= (0.34 * r) * (0.34 * r)) {
        value = 0.75;                       // nucleus
        if (nx * nx + ny * ny <= (0.12 * r) * (0.12 * r)) value = 1.0;  // core
    }
    const double sx[3] = {0.38, 0.10, 0.42};
    const double sy[3] = {0.34, -0.48, -0.18};
    for (int s = 0; s < 3; ++s) {
        double dx = px - sx[s] * r, dy = py - sy[s] * r;
        if (dx * dx + dy * dy <= (0.09 * r) * (0.09 * r)) value = 0.9;
    }
    return value;
}

}  // namespace

std::pair<CoefficientMaps, SupportMask> make_phantom(const PhantomSpec& spec, const Grid& grid) {
    const int n = grid.n;
    if (spec.shape != "disk_structured" && spec.shape != "uniform_disk" && spec.shape != "empty" &&
        spec.shape != "off_center_disk")
        throw std::invalid_argument("make_phantom: unknown shape '" + spec.shape +
                                    "' (expected disk_structured, uniform_disk, empty, "
                                    "off_center_disk)");

    CoefficientMaps maps;
    maps.mu = Image(n);
    maps.lambda = Image(n);
    maps.a = Image(n);
    maps.psi = Image(n);
    maps.c = spec.c;
    maps.c_hat = spec.c_hat;
    maps.c_tilde = spec.c_tilde;
    SupportMask mask(n);

    for (int i = 0; i < n; ++i) {
        double y = grid.y(i);
        for (int j = 0; j < n; ++j) {
            double x = grid.x(j);
            if (!in_disk(x, y, spec.center_x, spec.center_y, spec.radius)) continue;
            mask.set(i, j, true);
            double mu = 0.0;
            if (spec.shape == "disk_structured")
                mu = spec.mu_amplitude *
                     structured_density(x - spec.center_x, y - spec.center_y, spec.radius);
            else if (spec.shape == "uniform_disk" || spec.shape == "off_center_disk")
                mu = spec.mu_amplitude;
            maps.mu(i, j) = mu;
            double lambda = spec.lambda_bg;
            if (spec.lambda_mode == LambdaMode::variable) lambda += spec.lambda_mu_scale * mu;
            maps.lambda(i, j) = lambda;
            maps.psi(i, j) = spec.c_tilde * lambda;
            maps.a(i, j) = spec.c_hat * lambda;
        }
    }
    return {std::move(maps), std::move(mask)};
}

}  // namespace lsfm
