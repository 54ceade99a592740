#pragma once

#include <cstdint>

#include "lsfm/detection.hpp"
#include "lsfm/grid.hpp"
#include "lsfm/image.hpp"

namespace lsfm {

// Scaled Poisson photon noise: each pixel p is replaced by beta * Pois(p / beta).
struct NoiseSpec {
    double beta = 0.01;
    std::uint64_t seed = 0;
};

// Applies the noise model to both sides and records the achieved relative
// noise level ||noisy - clean|| / ||clean|| on the stacked data.
MeasurementSet add_poisson_noise(const MeasurementSet& meas, const NoiseSpec& spec);

// Two-sided fusion: the left half of the columns (1..ceil(N/2)) comes from
// the left-illumination array, the rest from the right one. crossfade_width
// > 0 blends linearly over that many columns around the split.
Image fuse(const MeasurementSet& meas, int crossfade_width = 0);

// Relative 2-norm error ||x_ref - x|| / ||x_ref||.
double nre(const std::vector<double>& x_ref, const std::vector<double>& x);
double nre(const Image& x_ref, const Image& x);

// Mean structural similarity with an 11x11 Gaussian window (sigma 1.5),
// K1 = 0.01, K2 = 0.03, dynamic range max(x_ref) - min(x_ref).
double ssim(const Image& x_ref, const Image& x);

}  // namespace lsfm
