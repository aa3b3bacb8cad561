#pragma once

#include "vpp/types.hpp"

#include <cmath>
#include <stdexcept>

namespace vpp {

/// Epipolar match of reference pixel (x, y): target column x' = x - d and the
/// splatting weight beta = x' - floor(x').
struct Correspondence {
    int x = 0;
    int y = 0;
    double x_prime = 0.0;
    double beta = 0.0;

    bool in_target(int width) const { return x_prime >= 0.0 && x_prime < width; }
    bool out_of_target() const { return x_prime < 0.0; }
};

/// d = b*f/z - doffs, clamped at 0. Depth unit must match the baseline unit.
inline double depth_to_disparity(double z, const Calibration& calib) {
    calib.validate();
    if (!(z > 0.0)) throw std::domain_error("depth_to_disparity: z must be > 0");
    const double d = calib.baseline * calib.focal_length_px / z - calib.disparity_offset;
    return d < 0.0 ? 0.0 : d;
}

/// z = b*f/(d + doffs); inverse of depth_to_disparity away from the clamp.
inline double disparity_to_depth(double d, const Calibration& calib) {
    calib.validate();
    const double denom = d + calib.disparity_offset;
    if (!(denom > 0.0)) throw std::domain_error("disparity_to_depth: d + doffs must be > 0");
    return calib.baseline * calib.focal_length_px / denom;
}

inline Correspondence correspondence(int x, int y, double d) {
    if (!(d >= 0.0)) throw std::invalid_argument("correspondence: d must be >= 0");
    Correspondence c;
    c.x = x;
    c.y = y;
    c.x_prime = static_cast<double>(x) - d;
    c.beta = c.x_prime - std::floor(c.x_prime);
    return c;
}

}  // namespace vpp
