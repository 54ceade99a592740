#include "lsfm/noise_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace lsfm {

namespace {

void poisson_image(Image& img, double beta, std::mt19937_64& rng) {
    for (double& p : img.raw()) {
        if (p < 0) throw std::invalid_argument("add_poisson_noise: negative measurement");
        if (p == 0) continue;  // Pois(0) = 0 surely
        std::poisson_distribution<long long> pois(p / beta);
        p = beta * static_cast<double>(pois(rng));
    }
}

}  // namespace

MeasurementSet add_poisson_noise(const MeasurementSet& meas, const NoiseSpec& spec) {
    if (!(spec.beta > 0)) throw std::invalid_argument("add_poisson_noise: beta must be positive");
    MeasurementSet noisy = meas;
    std::mt19937_64 rng(spec.seed);
    poisson_image(noisy.left, spec.beta, rng);
    poisson_image(noisy.right, spec.beta, rng);

    double num = 0.0, den = 0.0;
    auto accumulate = [&](const Image& clean, const Image& dirty) {
        for (size_t i = 0; i < clean.raw().size(); ++i) {
            double d = dirty.raw()[i] - clean.raw()[i];
            num += d * d;
            den += clean.raw()[i] * clean.raw()[i];
        }
    };
    accumulate(meas.left, noisy.left);
    accumulate(meas.right, noisy.right);
    noisy.noise_level = den > 0 ? std::sqrt(num / den) : 0.0;
    return noisy;
}

Image fuse(const MeasurementSet& meas, int crossfade_width) {
    const int n = meas.left.size();
    if (meas.right.size() != n) throw std::invalid_argument("fuse: shape mismatch");
    const int split = (n + 1) / 2;  // columns [0, split) from the left side
    Image out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double t;  // weight of the right-side value
            if (crossfade_width > 0) {
                double u = (j - (split - 1 - crossfade_width / 2.0)) / crossfade_width;
                t = std::clamp(u, 0.0, 1.0);
            } else {
                t = (j < split) ? 0.0 : 1.0;
            }
            out(i, j) = (1.0 - t) * meas.left(i, j) + t * meas.right(i, j);
        }
    return out;
}

double nre(const std::vector<double>& x_ref, const std::vector<double>& x) {
    if (x_ref.size() != x.size()) throw std::invalid_argument("nre: length mismatch");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double d = x_ref[i] - x[i];
        num += d * d;
        den += x_ref[i] * x_ref[i];
    }
    if (den == 0) throw std::invalid_argument("nre: zero reference");
    return std::sqrt(num / den);
}

double nre(const Image& x_ref, const Image& x) { return nre(x_ref.raw(), x.raw()); }

namespace {

// 11-tap Gaussian window, sigma 1.5, normalized.
std::vector<double> ssim_window() {
    std::vector<double> w(11);
    double s = 0.0;
    for (int i = 0; i < 11; ++i) {
        double d = i - 5;
        w[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
        s += w[i];
    }
    for (double& v : w) v /= s;
    return w;
}

// Separable windowed filtering with symmetric (reflective) padding.
Image filter(const Image& img, const std::vector<double>& w) {
    const int n = img.size();
    const int half = static_cast<int>(w.size()) / 2;
    auto reflect = [&](int t) {
        while (t < 0 || t >= n) t = (t < 0) ? -t - 1 : 2 * n - 1 - t;
        return t;
    };
    Image tmp(n), out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int k = -half; k <= half; ++k) acc += w[k + half] * img(i, reflect(j + k));
            tmp(i, j) = acc;
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int k = -half; k <= half; ++k) acc += w[k + half] * tmp(reflect(i + k), j);
            out(i, j) = acc;
        }
    return out;
}

}  // namespace

double ssim(const Image& x_ref, const Image& x) {
    const int n = x_ref.size();
    if (x.size() != n) throw std::invalid_argument("ssim: shape mismatch");
    double lo = x_ref.raw()[0], hi = x_ref.raw()[0];
    for (double v : x_ref.raw()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double range = hi - lo;
    if (range <= 0) throw std::invalid_argument("ssim: reference has zero dynamic range");
    const double c1 = (0.01 * range) * (0.01 * range);
    const double c2 = (0.03 * range) * (0.03 * range);

    const std::vector<double> w = ssim_window();
    Image mu1 = filter(x_ref, w), mu2 = filter(x, w);
    Image sq1(n), sq2(n), prod(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            sq1(i, j) = x_ref(i, j) * x_ref(i, j);
            sq2(i, j) = x(i, j) * x(i, j);
            prod(i, j) = x_ref(i, j) * x(i, j);
        }
    Image m11 = filter(sq1, w), m22 = filter(sq2, w), m12 = filter(prod, w);

    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double u1 = mu1(i, j), u2 = mu2(i, j);
            double v1 = m11(i, j) - u1 * u1;
            double v2 = m22(i, j) - u2 * u2;
            double cov = m12(i, j) - u1 * u2;
            acc += ((2 * u1 * u2 + c1) * (2 * cov + c2)) /
                   ((u1 * u1 + u2 * u2 + c1) * (v1 + v2 + c2));
        }
    return acc / (static_cast<double>(n) * n);
}

}  // namespace lsfm
