#pragma once

#include <string>
#include <utility>

#include "lsfm/grid.hpp"
#include "lsfm/image.hpp"

namespace lsfm {

// Physical coefficient maps on the pixel grid. All maps are nonnegative and
// vanish outside the object support. When built from a phantom description,
// psi = c_tilde * lambda and a = c_hat * lambda hold elementwise.
struct CoefficientMaps {
    Image mu;      // fluorophore density (reconstruction target)
    Image lambda;  // excitation attenuation
    Image a;       // fluorescence attenuation
    Image psi;     // beam diffusion
    double c = 1.0;        // activation constant
    double c_hat = 1.0;    // a / lambda ratio
    double c_tilde = 0.6;  // psi / lambda ratio

    CoefficientMaps mirrored_columns() const;
};

// Attenuation model used when building coefficient maps:
//  - constant: lambda = lambda_bg inside the support;
//  - variable: lambda = lambda_bg + lambda_mu_scale * mu (density-dependent).
enum class LambdaMode { constant, variable };

// Catalogue-driven phantom description. Shapes:
//  - "disk_structured": disk with a bright rim, an interior blob and spots
//    (cell-like test object);
//  - "uniform_disk": disk with constant density;
//  - "empty": disk support with zero density;
//  - "off_center_disk": uniform disk placed away from the domain center.
struct PhantomSpec {
    std::string shape = "disk_structured";
    LambdaMode lambda_mode = LambdaMode::constant;
    double c = 1.0;
    double c_hat = 1.0;
    double c_tilde = 0.6;
    double lambda_bg = 1.1;
    double lambda_mu_scale = 0.0;  // only used in variable mode
    double mu_amplitude = 1.0;
    double radius = 0.8;     // disk radius in domain units
    double center_x = 1.0;   // disk center
    double center_y = 0.0;
};

std::pair<CoefficientMaps, SupportMask> make_phantom(const PhantomSpec& spec, const Grid& grid);

}  // namespace lsfm
