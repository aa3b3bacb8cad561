#pragma once

#include "vpp/types.hpp"

namespace vpp {

/// Occlusion-heuristic hyperparameters. A warped hint is occluded when some
/// nearby warped hint sits enough disparity levels in front of it:
///   W(x,y) - W(xo,yo) - lambda*(gamma*|x-xo| + (1-gamma)*|y-yo|) > t
struct OcclusionParams {
    double lambda = 2.0;
    double gamma = 0.4375;
    double t = 1.0;
    int rx = 9;  // patch width, odd
    int ry = 7;  // patch height, odd

    void validate() const {
        if (rx < 1 || ry < 1 || rx % 2 == 0 || ry % 2 == 0)
            throw std::invalid_argument("OcclusionParams: rx, ry must be odd and >= 1");
        if (gamma < 0.0 || gamma > 1.0)
            throw std::invalid_argument("OcclusionParams: gamma must be in [0, 1]");
    }
};

/// Hints warped into the target frame. Each filled cell keeps the disparity of
/// the surviving hint (largest d wins a collision) and the index of that hint.
struct WarpGrid {
    PlaneF disp;                // kInvalidDisparity where empty
    Plane<std::int32_t> origin; // hint index, -1 where empty

    int width() const { return static_cast<int>(disp.cols()); }
    int height() const { return static_cast<int>(disp.rows()); }
    bool filled(int y, int x) const { return disparity_valid(disp(y, x)); }
};

/// Warps each hint to (round_even(x - d), y). Collisions keep the largest d,
/// ties the smallest source x. Hints landing outside [0, width) are left out
/// of the grid and flagged out_of_target in place.
WarpGrid build_warp_grid(HintSet& hints, int width, int height);

/// Marks hints occluded per the patch heuristic above; the center cell itself
/// is not a candidate neighbor. Flags of out-of-target hints are untouched.
void classify_occlusions(const WarpGrid& grid, const OcclusionParams& params, HintSet& hints);

}  // namespace vpp
