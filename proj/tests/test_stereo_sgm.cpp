#include "vpp/stereo_sgm.hpp"

#include "vpp/rng.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>

using namespace vpp;

namespace {

ImageBuffer gray_image(const PlaneU8& plane) {
    ImageBuffer img(static_cast<int>(plane.cols()), static_cast<int>(plane.rows()), 1);
    img.plane(0) = plane;
    return img;
}

}  // namespace

TEST_CASE("census: 5x5 descriptor has 24 comparison bits") {
    PlaneU8 img = PlaneU8::Zero(9, 9);
    img(4, 4) = 200;  // center brighter than every neighbor
    const auto census = census_transform(img, 5);
    CHECK(std::popcount(census(4, 4)) == 24);
    CHECK(census(0, 0) == 0);  // flat corner, replicated border
}

TEST_CASE("census cost: identical images cost zero in range, max out of range") {
    const ImageBuffer img = gray_image(PlaneU8::Constant(8, 12, 50));
    const auto vol = census_cost(img, img, 6, 5);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 12; ++x)
            for (int d = 0; d < 6; ++d) {
                if (d <= x) CHECK(vol.at(x, y, d) == 0);
                else CHECK(vol.at(x, y, d) == 24);
            }
}

TEST_CASE("adaptive P2: hand-evaluated clamp") {
    const SgmParams params;
    CHECK(adaptive_p2(params, 0) == 35);   // 35 - 0.5*0
    CHECK(adaptive_p2(params, 36) == 17);  // 35 - 18, exactly at the floor
    CHECK(adaptive_p2(params, 200) == 17); // clamped
    CHECK(params.p1 < params.p2_min);
}

TEST_CASE("aggregation: spatially uniform costs keep the per-pixel argmin") {
    const int w = 20, h = 10, dmax = 16;
    Rng rng(41);
    std::vector<std::uint16_t> curve(dmax);
    for (auto& c : curve) c = static_cast<std::uint16_t>(1 + rng.below(24));
    int true_min = 0;
    for (int d = 1; d < dmax; ++d)
        if (curve[static_cast<std::size_t>(d)] < curve[static_cast<std::size_t>(true_min)])
            true_min = d;

    CostVolume<std::uint16_t> vol(w, h, dmax);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int d = 0; d < dmax; ++d) vol.at(x, y, d) = curve[static_cast<std::size_t>(d)];

    const PlaneU8 gray = PlaneU8::Constant(h, w, 100);
    for (int paths : {4, 8}) {
        SgmParams params;
        params.paths = paths;
        params.max_disparity = dmax;
        const auto agg = sgm_aggregate(vol, gray, params);
        const DisparityMap disp = wta_subpixel(agg);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                CHECK(std::lround(disp.at(y, x)) == true_min);
    }
}

TEST_CASE("wta subpixel: parabola refinement") {
    auto volume_with = [](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        CostVolume<std::uint32_t> vol(1, 1, 3);
        vol.at(0, 0, 0) = a;
        vol.at(0, 0, 1) = b;
        vol.at(0, 0, 2) = c;
        return vol;
    };
    CHECK(wta_subpixel(volume_with(4, 1, 4)).at(0, 0) == 1.0f);          // symmetric
    CHECK(wta_subpixel(volume_with(4, 1, 2)).at(0, 0) == 1.25f);         // (4-2)/(2*(4-2+2))
    CHECK(wta_subpixel(volume_with(1, 4, 9)).at(0, 0) == 0.0f);          // border winner
}

TEST_CASE("wta: adding a per-pixel constant never moves the argmin") {
    Rng rng(83);
    CostVolume<std::uint32_t> vol(6, 4, 24);
    for (auto& c : vol.cost) c = static_cast<std::uint32_t>(rng.below(200));
    CostVolume<std::uint32_t> shifted = vol;
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 6; ++x) {
            const std::uint32_t offset = static_cast<std::uint32_t>(rng.below(500));
            for (int d = 0; d < 24; ++d) shifted.at(x, y, d) += offset;
        }
    const DisparityMap a = wta_subpixel(vol);
    const DisparityMap b = wta_subpixel(shifted);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 6; ++x)
            CHECK(std::lround(a.at(y, x)) == std::lround(b.at(y, x)));
}

TEST_CASE("wta right view: diagonal re-indexing") {
    // cost(x,y,d) minimal exactly where x = xr + d for a planted disparity
    const int w = 12, dmax = 6, planted = 3;
    CostVolume<std::uint32_t> vol(w, 1, dmax);
    for (int x = 0; x < w; ++x)
        for (int d = 0; d < dmax; ++d) vol.at(x, 0, d) = 50;
    for (int xr = 0; xr + planted < w; ++xr) vol.at(xr + planted, 0, planted) = 1;
    const DisparityMap right = wta_right_view(vol);
    for (int xr = 0; xr + planted < w; ++xr) CHECK(right.at(0, xr) == 3.0f);
}

TEST_CASE("lr/speckle/fill: consistent constant maps pass through unchanged") {
    DisparityMap left(16, 8), right(16, 8);
    left.values.setConstant(4.0f);
    right.values.setConstant(4.0f);
    SgmParams params;
    params.speckle_min_region = 8;
    const DisparityMap out = lr_check_speckle_fill(left, right, params);
    // columns 0..3 fail the range check (x - 4 < 0) and are refilled with 4
    CHECK((out.values == 4.0f).all());
}

TEST_CASE("lr/speckle/fill: isolated spike is removed and refilled") {
    // 5x5 toy grid: all 1, spike 3 at (2,3); LR passes with a loose threshold,
    // the spike region (size 1 < 3) is speckle-invalidated, then the hole is
    // refilled with min(1, 1) = 1.
    DisparityMap left(5, 5), right(5, 5);
    left.values.setConstant(1.0f);
    left.at(2, 3) = 3.0f;
    right.values.setConstant(1.0f);
    SgmParams params;
    params.lr_threshold = 5.0;
    params.speckle_max_diff = 1.0;
    params.speckle_min_region = 3;
    const DisparityMap out = lr_check_speckle_fill(left, right, params);
    CHECK((out.values == 1.0f).all());
}

TEST_CASE("fill: hole takes the smaller (background) neighbor") {
    // valid 10 at x=10, hole at x=11, valid 4 at x=12..13 (x >= d keeps the
    // LR range check out of the way); the left band has only a right neighbor
    DisparityMap left(14, 1), right(14, 1);
    left.values.setConstant(kInvalidDisparity);
    left.at(0, 10) = 10.0f;
    left.at(0, 12) = 4.0f;
    left.at(0, 13) = 4.0f;
    right.values.setConstant(0.0f);
    SgmParams params;
    params.lr_threshold = 1e9;  // disable
    params.speckle_min_region = 1;
    const DisparityMap out = lr_check_speckle_fill(left, right, params);
    CHECK(out.at(0, 11) == 4.0f);   // min(10, 4)
    CHECK(out.at(0, 0) == 10.0f);   // only a right-side neighbor exists
    CHECK(out.at(0, 13) == 4.0f);
}

TEST_CASE("fill: never invents values outside the surviving row range") {
    Rng rng(59);
    DisparityMap left(40, 12), right(40, 12);
    right.values.setConstant(0.0f);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 40; ++x)
            left.at(y, x) = rng.byte() < 100 ? kInvalidDisparity
                                             : static_cast<float>(rng.below(64));
    SgmParams params;
    params.lr_threshold = 1e9;
    params.speckle_min_region = 1;
    const DisparityMap out = lr_check_speckle_fill(left, right, params);
    for (int y = 0; y < 12; ++y) {
        float lo = std::numeric_limits<float>::max(), hi = -1.0f;
        bool any = false;
        for (int x = 0; x < 40; ++x)
            if (disparity_valid(left.at(y, x))) {
                any = true;
                lo = std::min(lo, left.at(y, x));
                hi = std::max(hi, left.at(y, x));
            }
        if (!any) continue;
        for (int x = 0; x < 40; ++x) {
            CHECK(out.at(y, x) >= lo);
            CHECK(out.at(y, x) <= hi);
        }
    }
}

TEST_CASE("guide: peak untouched, k=0 identity, asymptote 1+k") {
    CostVolume<std::uint16_t> vol(4, 2, 64);
    for (auto& c : vol.cost) c = 10;
    HintSet hints = {{1, 1, 20.0f}};

    CostVolume<std::uint16_t> zero_k = vol;
    guide_cost_volume(zero_k, hints, {0.0, 10.0});
    CHECK(zero_k.cost == vol.cost);

    CostVolume<std::uint16_t> guided = vol;
    guide_cost_volume(guided, hints, {10.0, 1.0});
    CHECK(guided.at(1, 1, 20) == 10);               // exact hit: Gaussian = 1
    CHECK(guided.at(1, 1, 63) == 110);              // far away: factor -> 1 + k
    CHECK(guided.at(0, 0, 63) == 10);               // unhinted pixel untouched
}

TEST_CASE("guide: large k steers the argmin within 1 px of the hint") {
    const int w = 16, h = 8, dmax = 48;
    Rng rng(67);
    CostVolume<std::uint16_t> vol(w, h, dmax);
    for (auto& c : vol.cost) c = static_cast<std::uint16_t>(1 + rng.below(24));

    HintSet hints;
    for (int i = 0; i < 20; ++i)
        hints.push_back({static_cast<int>(rng.below(w)), static_cast<int>(rng.below(h)),
                         static_cast<float>(rng.below(dmax))});
    // drop duplicate pixels
    std::sort(hints.begin(), hints.end(), [](const Hint& a, const Hint& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    hints.erase(std::unique(hints.begin(), hints.end(),
                            [](const Hint& a, const Hint& b) {
                                return a.x == b.x && a.y == b.y;
                            }),
                hints.end());

    guide_cost_volume(vol, hints, {100.0, 1.0});
    for (const Hint& hint : hints) {
        int best = 0;
        for (int d = 1; d < dmax; ++d)
            if (vol.at(hint.x, hint.y, d) < vol.at(hint.x, hint.y, best)) best = d;
        CHECK(std::abs(best - static_cast<int>(hint.d)) <= 1);
    }
}

TEST_CASE("aggregation: noise-free random-dot stereogram recovers the plane") {
    const auto [left, right] = testing::random_dot_pair(160, 120, 6, 4242);
    SgmParams params;
    params.max_disparity = 32;
    const DisparityMap disp = match_stereo(left, right, params);

    // interior: full census window and a valid correspondence
    int total = 0, correct = 0;
    for (int y = 4; y < 116; ++y)
        for (int x = 12; x < 156; ++x) {
            ++total;
            if (std::abs(disp.at(y, x) - 6.0f) <= 1.0f) ++correct;
        }
    CHECK(static_cast<double>(correct) / total >= 0.99);
}

TEST_CASE("sgm params validation") {
    SgmParams params;
    params.p1 = 20;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
    params.p1 = 11;
    params.paths = 5;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
    params.paths = 8;
    params.census_window = 4;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
}
