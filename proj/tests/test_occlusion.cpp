#include "vpp/occlusion.hpp"

#include "vpp/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>

using namespace vpp;

TEST_CASE("warp grid: collision keeps the largest disparity") {
    HintSet hints = {{10, 5, 4.0f}, {9, 5, 3.0f}};  // both land on column 6
    const WarpGrid grid = build_warp_grid(hints, 16, 8);
    CHECK(grid.filled(5, 6));
    CHECK(grid.disp(5, 6) == 4.0f);
    CHECK(grid.origin(5, 6) == 0);
    CHECK_FALSE(hints[0].out_of_target);
    CHECK_FALSE(hints[1].out_of_target);
}

TEST_CASE("warp grid: zero disparity warps in place") {
    HintSet hints = {{10, 5, 0.0f}};
    const WarpGrid grid = build_warp_grid(hints, 16, 8);
    CHECK(grid.disp(5, 10) == 0.0f);
}

TEST_CASE("warp grid: out-of-target hints are excluded and flagged") {
    HintSet hints = {{2, 0, 5.0f}};
    const WarpGrid grid = build_warp_grid(hints, 16, 8);
    CHECK(hints[0].out_of_target);
    CHECK((grid.disp.isFinite()).count() == 0);
}

TEST_CASE("warp grid: equal-disparity tie keeps the smaller source x") {
    // 8 - 0.5 and 9 - 0.5 both round (half to even) to column 8
    HintSet a = {{8, 0, 0.5f}, {9, 0, 0.5f}};
    HintSet b = {{9, 0, 0.5f}, {8, 0, 0.5f}};
    const WarpGrid ga = build_warp_grid(a, 16, 4);
    const WarpGrid gb = build_warp_grid(b, 16, 4);
    REQUIRE(ga.filled(0, 8));
    CHECK(a[static_cast<std::size_t>(ga.origin(0, 8))].x == 8);
    CHECK(b[static_cast<std::size_t>(gb.origin(0, 8))].x == 8);
}

TEST_CASE("classify: hand-evaluated inequality with the default constants") {
    // cells (10,5)=40 and (11,5)=20: 40-20-2*(0.4375*1) = 19.125 > 1
    HintSet hints = {{50, 5, 40.0f}, {31, 5, 20.0f}};
    const WarpGrid grid = build_warp_grid(hints, 64, 12);
    REQUIRE(grid.disp(5, 10) == 40.0f);
    REQUIRE(grid.disp(5, 11) == 20.0f);
    classify_occlusions(grid, OcclusionParams{}, hints);
    CHECK_FALSE(hints[0].occluded);  // nothing in front of the 40
    CHECK(hints[1].occluded);
}

TEST_CASE("classify: equal disparities never occlude each other") {
    HintSet hints = {{10, 5, 7.0f}, {12, 5, 7.0f}, {11, 7, 7.0f}};
    const WarpGrid grid = build_warp_grid(hints, 32, 12);
    classify_occlusions(grid, OcclusionParams{}, hints);
    for (const Hint& h : hints) CHECK_FALSE(h.occluded);
}

TEST_CASE("classify: isolated hint stays visible") {
    HintSet hints = {{16, 6, 9.0f}};
    const WarpGrid grid = build_warp_grid(hints, 32, 12);
    classify_occlusions(grid, OcclusionParams{}, hints);
    CHECK_FALSE(hints[0].occluded);
}

namespace {

HintSet random_hints(int width, int height, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::map<std::pair<int, int>, float> unique;
    while (static_cast<int>(unique.size()) < count) {
        const int x = static_cast<int>(rng.below(static_cast<std::uint64_t>(width)));
        const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(height)));
        unique[{x, y}] = static_cast<float>(rng.below(64));
    }
    HintSet hints;
    for (const auto& [k, d] : unique) hints.push_back({k.first, k.second, d});
    return hints;
}

}  // namespace

TEST_CASE("classify: independent of hint insertion order") {
    HintSet hints = random_hints(96, 64, 300, 31);
    HintSet shuffled = hints;
    Rng rng(77);
    for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[static_cast<std::size_t>(rng.below(i))]);

    auto flags = [](HintSet set, int w, int h) {
        const WarpGrid grid = build_warp_grid(set, w, h);
        classify_occlusions(grid, OcclusionParams{}, set);
        std::map<std::pair<int, int>, bool> out;
        for (const Hint& hint : set) out[{hint.x, hint.y}] = hint.occluded;
        return out;
    };
    CHECK(flags(hints, 96, 64) == flags(shuffled, 96, 64));
}

TEST_CASE("classify: raising t only shrinks the occluded set") {
    HintSet hints = random_hints(128, 96, 600, 13);
    const WarpGrid grid = build_warp_grid(hints, 128, 96);

    auto occluded_set = [&](double t) {
        OcclusionParams params;
        params.t = t;
        HintSet copy = hints;
        classify_occlusions(grid, params, copy);
        std::vector<std::pair<int, int>> out;
        for (const Hint& h : copy)
            if (h.occluded) out.emplace_back(h.x, h.y);
        return out;
    };

    auto prev = occluded_set(0.5);
    for (double t : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        const auto cur = occluded_set(t);
        CHECK(cur.size() <= prev.size());
        for (const auto& p : cur)
            CHECK(std::find(prev.begin(), prev.end(), p) != prev.end());
        prev = cur;
    }
}
