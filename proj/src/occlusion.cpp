#include "vpp/occlusion.hpp"

#include <cmath>

namespace vpp {

namespace {

// Round-to-nearest-even, independent of the runtime FP rounding mode.
int round_even(double v) {
    const double fl = std::floor(v);
    if (v - fl == 0.5) {
        const int lo = static_cast<int>(fl);
        return lo % 2 == 0 ? lo : lo + 1;
    }
    return static_cast<int>(std::lround(v));
}

}  // namespace

WarpGrid build_warp_grid(HintSet& hints, int width, int height) {
    validate_hints(hints, width, height);
    WarpGrid grid;
    grid.disp = PlaneF::Constant(height, width, kInvalidDisparity);
    grid.origin = Plane<std::int32_t>::Constant(height, width, -1);

    for (std::size_t i = 0; i < hints.size(); ++i) {
        Hint& h = hints[i];
        const int xt = round_even(static_cast<double>(h.x) - static_cast<double>(h.d));
        if (xt < 0 || xt >= width) {
            h.out_of_target = true;
            continue;
        }
        h.out_of_target = false;
        float& cell = grid.disp(h.y, xt);
        std::int32_t& org = grid.origin(h.y, xt);
        const bool wins = !disparity_valid(cell) || h.d > cell ||
                          (h.d == cell && h.x < hints[static_cast<std::size_t>(org)].x);
        if (wins) {
            cell = h.d;
            org = static_cast<std::int32_t>(i);
        }
    }
    return grid;
}

void classify_occlusions(const WarpGrid& grid, const OcclusionParams& params, HintSet& hints) {
    params.validate();
    for (Hint& h : hints)
        if (!h.out_of_target) h.occluded = false;

    const int hx = (params.rx - 1) / 2;
    const int hy = (params.ry - 1) / 2;
    const int w = grid.width(), hgt = grid.height();

    for (int yo = 0; yo < hgt; ++yo) {
        for (int xo = 0; xo < w; ++xo) {
            if (!grid.filled(yo, xo)) continue;
            const double wo = grid.disp(yo, xo);
            bool occluded = false;
            for (int dy = -hy; dy <= hy && !occluded; ++dy) {
                const int y = yo + dy;
                if (y < 0 || y >= hgt) continue;
                for (int dx = -hx; dx <= hx; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int x = xo + dx;
                    if (x < 0 || x >= w || !grid.filled(y, x)) continue;
                    const double penalty =
                        params.lambda *
                        (params.gamma * std::abs(dx) + (1.0 - params.gamma) * std::abs(dy));
                    if (grid.disp(y, x) - wo - penalty > params.t) {
                        occluded = true;
                        break;
                    }
                }
            }
            if (occluded)
                hints[static_cast<std::size_t>(grid.origin(yo, xo))].occluded = true;
        }
    }
}

}  // namespace vpp
