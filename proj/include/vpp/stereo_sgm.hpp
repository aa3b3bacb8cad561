#pragma once

#include "vpp/types.hpp"

#include <cstdint>
#include <vector>

namespace vpp {

/// Dense per-pixel matching costs over disparity levels [0, dmax).
/// Contiguous in d so path sweeps touch one small span per pixel.
template <typename Scalar>
struct CostVolume {
    int width = 0;
    int height = 0;
    int dmax = 0;
    std::vector<Scalar> cost;

    CostVolume() = default;
    CostVolume(int w, int h, int d)
        : width(w), height(h), dmax(d),
          cost(static_cast<std::size_t>(w) * h * d, Scalar{0}) {}

    std::size_t index(int x, int y, int d) const {
        return (static_cast<std::size_t>(y) * width + x) * dmax + d;
    }
    Scalar& at(int x, int y, int d) { return cost[index(x, y, d)]; }
    Scalar at(int x, int y, int d) const { return cost[index(x, y, d)]; }
};

struct SgmParams {
    int p1 = 11;
    int p2_min = 17;
    double p2_alpha = 0.5;
    double p2_gamma = 35.0;
    int paths = 8;               // 4 or 8
    int census_window = 5;       // odd, <= 7
    int max_disparity = 192;
    double lr_threshold = 1.0;   // px
    double speckle_max_diff = 1.0;
    int speckle_min_region = 200;

    void validate() const;
};

/// Cost-volume modulation from sparse hints: costs away from the hinted
/// disparity are inflated by up to a factor (1 + k).
struct GuideParams {
    double k = 10.0;
    double w = 10.0;  // Gaussian width in disparity levels
};

/// BT.601 luma; 1-channel images pass through.
PlaneU8 to_grayscale(const ImageBuffer& img);

/// Per-pixel binary descriptor: bit set where the neighbor is darker than the
/// center, window scanned row-major, borders replicated.
Plane<std::uint64_t> census_transform(const PlaneU8& img, int window);

/// Hamming distance between census descriptors at (x, y) and (x - d, y);
/// disparities past the left border cost the full bit count.
CostVolume<std::uint16_t> census_cost(const ImageBuffer& left, const ImageBuffer& right,
                                      int dmax, int window);

/// cost'(d) = cost(d) * (1 + k * (1 - exp(-(d - hint)^2 / (2 w^2)))) at each
/// hinted pixel; everything else is untouched.
void guide_cost_volume(CostVolume<std::uint16_t>& vol, const HintSet& hints,
                       const GuideParams& guide);

/// P2(p, r) = max(p2_min, round(p2_gamma - p2_alpha * |I(p) - I(p-r)|)).
int adaptive_p2(const SgmParams& params, int abs_intensity_diff);

/// Sum of the normalized SGM path recurrence over 4 or 8 directions.
CostVolume<std::uint32_t> sgm_aggregate(const CostVolume<std::uint16_t>& vol,
                                        const PlaneU8& gray_left, const SgmParams& params);

/// Per-pixel argmin with parabola refinement; winners at d = 0 or dmax-1 stay
/// integer. Ties take the smallest d.
DisparityMap wta_subpixel(const CostVolume<std::uint32_t>& vol);

/// Right-view disparities from the same aggregated volume, re-indexed along
/// the diagonal: dR(x, y) = argmin_d S(x + d, y, d).
DisparityMap wta_right_view(const CostVolume<std::uint32_t>& vol);

/// Left-right check, speckle removal, then scanline background filling
/// (min of nearest valid neighbors; empty rows copy the nearest filled row).
DisparityMap lr_check_speckle_fill(const DisparityMap& disp_left,
                                   const DisparityMap& disp_right, const SgmParams& params);

/// Full matcher: census cost, optional hint guidance, aggregation, WTA with
/// subpixel refinement, and outlier cleanup.
DisparityMap match_stereo(const ImageBuffer& left, const ImageBuffer& right,
                          const SgmParams& params, const HintSet* guide_hints = nullptr,
                          const GuideParams& guide = {});

}  // namespace vpp
