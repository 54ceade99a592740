#include "lsfm/excitation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lsfm {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Standard normal CDF.
double phi(double t) { return 0.5 * std::erfc(-t / kSqrt2); }

std::vector<double> row_of(const Image& img, int i) {
    std::vector<double> row(img.size());
    for (int j = 0; j < img.size(); ++j) row[j] = img(i, j);
    return row;
}

}  // namespace

Moments moments(const std::vector<double>& psi_row, int entry, int x_col, const Grid& grid) {
    if (x_col < entry) throw std::invalid_argument("moments: x_col before entry");
    if (entry < 0 || x_col >= static_cast<int>(psi_row.size()))
        throw std::invalid_argument("moments: index out of range");
    const double xe = grid.x(entry);
    Moments m;
    for (int j = entry; j < x_col; ++j) {
        double t = grid.x(j) - xe;
        double w = psi_row[j] * grid.tau;
        m.e0 += w;
        m.e1 += t * w;
        m.e2 += t * t * w;
    }
    return m;
}

double alpha_sq(const std::vector<double>& psi_row, int entry, int x_col, const Grid& grid) {
    if (x_col < entry) throw std::invalid_argument("alpha_sq: x_col before entry");
    if (entry < 0 || x_col >= static_cast<int>(psi_row.size()))
        throw std::invalid_argument("alpha_sq: index out of range");
    const double xc = grid.x(x_col);
    double s = 0.0;
    for (int j = entry; j < x_col; ++j) {
        double d = xc - grid.x(j);
        s += d * d * psi_row[j] * grid.tau;
    }
    return s;
}

ExcitationField excitation_field(const CoefficientMaps& maps, const SupportMask& mask, int h_index,
                                 Side side, const Grid& grid) {
    const int n = grid.n;
    if (h_index < 0 || h_index >= n) throw std::invalid_argument("excitation_field: bad h_index");

    if (side == Side::right) {
        ExcitationField mirrored =
            excitation_field(maps.mirrored_columns(), mask.mirrored_columns(), h_index, Side::left,
                             grid);
        ExcitationField field;
        field.v = mirrored.v.mirrored_columns();
        field.h_index = h_index;
        field.side = Side::right;
        if (mirrored.entry_col) field.entry_col = n - 1 - *mirrored.entry_col;
        field.log_attenuation.assign(n, 0.0);
        field.alpha_sq_col.assign(n, 0.0);
        for (int j = 0; j < n; ++j) {
            field.log_attenuation[j] = mirrored.log_attenuation[n - 1 - j];
            field.alpha_sq_col[j] = mirrored.alpha_sq_col[n - 1 - j];
        }
        return field;
    }

    ExcitationField field;
    field.v = Image(n);
    field.h_index = h_index;
    field.side = Side::left;
    field.log_attenuation.assign(n, 0.0);
    field.alpha_sq_col.assign(n, 0.0);
    field.entry_col = entry_depth(mask, h_index);
    if (!field.entry_col) return field;

    const int entry = *field.entry_col;
    const double h = grid.y(h_index);
    const double xe = grid.x(entry);
    const std::vector<double> psi_row = row_of(maps.psi, h_index);
    const std::vector<double> lambda_row = row_of(maps.lambda, h_index);

    double e0 = 0, e1 = 0, e2 = 0, log_att = 0;
    for (int j = entry; j < n; ++j) {
        if (j > entry) {
            // Left-Riemann updates with the previous column's coefficients.
            double t = grid.x(j - 1) - xe;
            double w = psi_row[j - 1] * grid.tau;
            e0 += w;
            e1 += t * w;
            e2 += t * t * w;
            log_att += lambda_row[j - 1] * grid.tau;
        }
        field.log_attenuation[j] = log_att;
        double L = grid.x(j) - xe;
        double asq = e2 - 2.0 * L * e1 + L * L * e0;
        if (asq < 0) asq = 0;  // guard rounding
        field.alpha_sq_col[j] = asq;
        const double amp = std::exp(-log_att);
        if (asq == 0.0) {
            // Unspread beam: all mass in the excitation row's bin.
            field.v(h_index, j) = amp / grid.tau_y;
            continue;
        }
        const double alpha = std::sqrt(asq);
        // Bin-averaged Gaussian profile: the tau-weighted column sum equals
        // the in-frame mass. Rows beyond 6 alpha carry < 1e-9 of it.
        const double cut = 6.0 * alpha + grid.tau_y;
        int i_lo = grid.row_of(h + cut), i_hi = grid.row_of(h - cut);
        double cdf_hi = phi((grid.y(i_lo) + 0.5 * grid.tau_y - h) / alpha);
        for (int i = i_lo; i <= i_hi; ++i) {
            double cdf_lo = phi((grid.y(i) - 0.5 * grid.tau_y - h) / alpha);
            field.v(i, j) = amp * (cdf_hi - cdf_lo) / grid.tau_y;
            cdf_hi = cdf_lo;
        }
    }
    return field;
}

namespace {

// Integrals of the continuum coefficient model along the beam row: the
// coefficient equals its node value on each forward cell [x_j, x_{j+1}).
struct PathIntegrals {
    double lambda_int;       // int lambda
    double e0, e1, e2;       // int (x'-xe)^k psi
    double psi_at, lambda_at;  // cell values at the evaluation point
};

PathIntegrals continuum_path(const std::vector<double>& psi_row,
                             const std::vector<double>& lambda_row, int entry, double x,
                             const Grid& grid) {
    PathIntegrals p{0, 0, 0, 0, 0, 0};
    const double xe = grid.x(entry);
    if (x <= xe) {
        p.psi_at = psi_row[entry];
        p.lambda_at = lambda_row[entry];
        return p;
    }
    const int n = static_cast<int>(psi_row.size());
    for (int j = entry; j < n; ++j) {
        double a = grid.x(j);
        double b = (j + 1 < n) ? grid.x(j + 1) : x;
        bool last = x <= b;
        if (last) b = x;
        double ta = a - xe, tb = b - xe;
        p.lambda_int += lambda_row[j] * (tb - ta);
        p.e0 += psi_row[j] * (tb - ta);
        p.e1 += psi_row[j] * (tb * tb - ta * ta) / 2.0;
        p.e2 += psi_row[j] * (tb * tb * tb - ta * ta * ta) / 3.0;
        if (last) {
            p.psi_at = psi_row[j];
            p.lambda_at = lambda_row[j];
            break;
        }
    }
    return p;
}

}  // namespace

double angular_intensity(const CoefficientMaps& maps, const SupportMask& mask, int h_index,
                         double x, double y, double omega, const Grid& grid) {
    auto entry = entry_depth(mask, h_index);
    if (!entry) throw std::invalid_argument("angular_intensity: beam row misses the object");
    PathIntegrals p = continuum_path(row_of(maps.psi, h_index), row_of(maps.lambda, h_index),
                                     *entry, x, grid);
    double det = p.e0 * p.e2 - p.e1 * p.e1;
    if (det <= 0) throw std::domain_error("angular_intensity: degenerate beam covariance");
    const double h = grid.y(h_index);
    const double L = x - grid.x(*entry);
    const double z1 = (y - h) - omega * L;
    const double z2 = omega;
    const double q = (p.e0 * z1 * z1 + 2.0 * p.e1 * z1 * z2 + p.e2 * z2 * z2) / det;
    return std::exp(-p.lambda_int) * std::exp(-0.5 * q) / (kTwoPi * std::sqrt(det));
}

double marginal_intensity(const CoefficientMaps& maps, const SupportMask& mask, int h_index,
                          double x, double y, const Grid& grid) {
    auto entry = entry_depth(mask, h_index);
    if (!entry) throw std::invalid_argument("marginal_intensity: beam row misses the object");
    PathIntegrals p = continuum_path(row_of(maps.psi, h_index), row_of(maps.lambda, h_index),
                                     *entry, x, grid);
    const double L = x - grid.x(*entry);
    const double asq = p.e2 - 2.0 * L * p.e1 + L * L * p.e0;
    if (asq <= 0) throw std::domain_error("marginal_intensity: zero beam variance");
    const double h = grid.y(h_index);
    const double d = y - h;
    return std::exp(-p.lambda_int) * std::exp(-0.5 * d * d / asq) /
           (std::sqrt(asq) * std::sqrt(kTwoPi));
}

Image excited_source(const ExcitationField& field, const CoefficientMaps& maps) {
    const int n = field.v.size();
    if (maps.mu.size() != n) throw std::invalid_argument("excited_source: shape mismatch");
    Image w(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w(i, j) = maps.c * field.v(i, j) * maps.mu(i, j);
    return w;
}

}  // namespace lsfm
