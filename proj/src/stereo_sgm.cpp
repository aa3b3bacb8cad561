#include "vpp/stereo_sgm.hpp"

#include "vpp/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace vpp {

void SgmParams::validate() const {
    if (p1 >= p2_min) throw std::invalid_argument("SgmParams: p1 must be < p2_min");
    if (paths != 4 && paths != 8) throw std::invalid_argument("SgmParams: paths must be 4 or 8");
    if (census_window < 3 || census_window > 7 || census_window % 2 == 0)
        throw std::invalid_argument("SgmParams: census window must be odd, 3..7");
    if (max_disparity < 1) throw std::invalid_argument("SgmParams: max_disparity must be >= 1");
}

PlaneU8 to_grayscale(const ImageBuffer& img) {
    if (img.channels() == 1) return img.plane(0);
    PlaneU8 gray(img.height(), img.width());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const double luma = 0.299 * img.at(0, y, x) + 0.587 * img.at(1, y, x) +
                                0.114 * img.at(2, y, x);
            gray(y, x) = static_cast<std::uint8_t>(std::lround(luma));
        }
    return gray;
}

Plane<std::uint64_t> census_transform(const PlaneU8& img, int window) {
    const int w = static_cast<int>(img.cols());
    const int h = static_cast<int>(img.rows());
    const int half = window / 2;
    Plane<std::uint64_t> census(h, w);

    parallel_for(0, h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            const std::uint8_t center = img(y, x);
            std::uint64_t code = 0;
            for (int dy = -half; dy <= half; ++dy) {
                const int yy = std::clamp(y + dy, 0, h - 1);
                for (int dx = -half; dx <= half; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int xx = std::clamp(x + dx, 0, w - 1);
                    code = (code << 1) | static_cast<std::uint64_t>(img(yy, xx) < center);
                }
            }
            census(y, x) = code;
        }
    });
    return census;
}

CostVolume<std::uint16_t> census_cost(const ImageBuffer& left, const ImageBuffer& right,
                                      int dmax, int window) {
    if (!left.same_size(right))
        throw std::invalid_argument("census_cost: image sizes/channels differ");
    const auto census_l = census_transform(to_grayscale(left), window);
    const auto census_r = census_transform(to_grayscale(right), window);

    const int w = left.width(), h = left.height();
    const auto max_cost = static_cast<std::uint16_t>(window * window - 1);
    CostVolume<std::uint16_t> vol(w, h, dmax);

    parallel_for(0, h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            const std::uint64_t cl = census_l(y, x);
            std::uint16_t* cell = &vol.cost[vol.index(x, y, 0)];
            const int in_range = std::min(dmax, x + 1);
            for (int d = 0; d < in_range; ++d)
                cell[d] = static_cast<std::uint16_t>(std::popcount(cl ^ census_r(y, x - d)));
            for (int d = in_range; d < dmax; ++d) cell[d] = max_cost;
        }
    });
    return vol;
}

void guide_cost_volume(CostVolume<std::uint16_t>& vol, const HintSet& hints,
                       const GuideParams& guide) {
    if (!(guide.w > 0.0)) throw std::invalid_argument("guide_cost_volume: w must be > 0");
    if (guide.k < 0.0) throw std::invalid_argument("guide_cost_volume: k must be >= 0");
    validate_hints(hints, vol.width, vol.height);

    const double inv_two_w2 = 1.0 / (2.0 * guide.w * guide.w);
    for (const Hint& h : hints) {
        std::uint16_t* cell = &vol.cost[vol.index(h.x, h.y, 0)];
        for (int d = 0; d < vol.dmax; ++d) {
            const double delta = static_cast<double>(d) - static_cast<double>(h.d);
            const double factor = 1.0 + guide.k * (1.0 - std::exp(-delta * delta * inv_two_w2));
            const double scaled = std::round(static_cast<double>(cell[d]) * factor);
            cell[d] = static_cast<std::uint16_t>(std::min(scaled, 65535.0));
        }
    }
}

int adaptive_p2(const SgmParams& params, int abs_intensity_diff) {
    const double p2 = params.p2_gamma - params.p2_alpha * abs_intensity_diff;
    return std::max(params.p2_min, static_cast<int>(std::lround(p2)));
}

namespace {

struct PathDir {
    int dx;
    int dy;
};

// One 1-D sweep from a start cell; disjoint lines per direction, so sweeps
// can run in parallel and accumulate without races.
void sweep_line(const CostVolume<std::uint16_t>& vol, const PlaneU8& gray,
                const SgmParams& params, PathDir dir, int x0, int y0,
                CostVolume<std::uint32_t>& agg, std::vector<std::uint16_t>& prev,
                std::vector<std::uint16_t>& cur) {
    const int dmax = vol.dmax;
    const int p1 = params.p1;

    int x = x0, y = y0;
    bool first = true;
    int prev_min = 0;
    int prev_intensity = 0;

    while (x >= 0 && x < vol.width && y >= 0 && y < vol.height) {
        const std::uint16_t* c = &vol.cost[vol.index(x, y, 0)];
        std::uint32_t* out = &agg.cost[agg.index(x, y, 0)];
        int cur_min = std::numeric_limits<int>::max();

        if (first) {
            for (int d = 0; d < dmax; ++d) {
                cur[d] = c[d];
                cur_min = std::min<int>(cur_min, cur[d]);
                out[d] += cur[d];
            }
            first = false;
        } else {
            const int diff = std::abs(static_cast<int>(gray(y, x)) - prev_intensity);
            const int jump = prev_min + adaptive_p2(params, diff);
            for (int d = 0; d < dmax; ++d) {
                int best = prev[d];
                if (d > 0) best = std::min(best, prev[d - 1] + p1);
                if (d + 1 < dmax) best = std::min(best, prev[d + 1] + p1);
                best = std::min(best, jump);
                const int v = std::min(c[d] + best - prev_min, 65535);
                cur[d] = static_cast<std::uint16_t>(v);
                cur_min = std::min(cur_min, v);
                out[d] += static_cast<std::uint32_t>(v);
            }
        }
        prev.swap(cur);
        prev_min = cur_min;
        prev_intensity = gray(y, x);
        x += dir.dx;
        y += dir.dy;
    }
}

}  // namespace

CostVolume<std::uint32_t> sgm_aggregate(const CostVolume<std::uint16_t>& vol,
                                        const PlaneU8& gray_left, const SgmParams& params) {
    params.validate();
    if (gray_left.cols() != vol.width || gray_left.rows() != vol.height)
        throw std::invalid_argument("sgm_aggregate: guidance image size mismatch");

    static constexpr PathDir kDirs8[8] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                          {1, 1},  {-1, -1}, {1, -1}, {-1, 1}};
    CostVolume<std::uint32_t> agg(vol.width, vol.height, vol.dmax);

    for (int p = 0; p < params.paths; ++p) {
        const PathDir dir = kDirs8[p];
        // Start cells: pixels whose predecessor along the path is outside.
        std::vector<std::pair<int, int>> starts;
        for (int y = 0; y < vol.height; ++y)
            for (int x = 0; x < vol.width; ++x) {
                const int px = x - dir.dx, py = y - dir.dy;
                if (px < 0 || px >= vol.width || py < 0 || py >= vol.height)
                    starts.emplace_back(x, y);
            }
        parallel_for(0, static_cast<int>(starts.size()), [&](int i) {
            std::vector<std::uint16_t> prev(static_cast<std::size_t>(vol.dmax));
            std::vector<std::uint16_t> cur(static_cast<std::size_t>(vol.dmax));
            sweep_line(vol, gray_left, params, dir, starts[static_cast<std::size_t>(i)].first,
                       starts[static_cast<std::size_t>(i)].second, agg, prev, cur);
        });
    }
    return agg;
}

DisparityMap wta_subpixel(const CostVolume<std::uint32_t>& vol) {
    DisparityMap disp(vol.width, vol.height);
    parallel_for(0, vol.height, [&](int y) {
        for (int x = 0; x < vol.width; ++x) {
            const std::uint32_t* c = &vol.cost[vol.index(x, y, 0)];
            int best = 0;
            for (int d = 1; d < vol.dmax; ++d)
                if (c[d] < c[best]) best = d;
            double value = best;
            if (best > 0 && best + 1 < vol.dmax) {
                const double cm = c[best - 1], c0 = c[best], cp = c[best + 1];
                const double denom = cm - 2.0 * c0 + cp;
                if (denom > 0.0) {
                    const double offset = (cm - cp) / (2.0 * denom);
                    value += std::clamp(offset, -0.5, 0.5);
                }
            }
            disp.at(y, x) = static_cast<float>(value);
        }
    });
    return disp;
}

DisparityMap wta_right_view(const CostVolume<std::uint32_t>& vol) {
    DisparityMap disp(vol.width, vol.height);
    parallel_for(0, vol.height, [&](int y) {
        for (int x = 0; x < vol.width; ++x) {
            int best = -1;
            std::uint32_t best_cost = 0;
            for (int d = 0; d < vol.dmax && x + d < vol.width; ++d) {
                const std::uint32_t c = vol.at(x + d, y, d);
                if (best < 0 || c < best_cost) {
                    best = d;
                    best_cost = c;
                }
            }
            disp.at(y, x) = best < 0 ? kInvalidDisparity : static_cast<float>(best);
        }
    });
    return disp;
}

namespace {

void apply_lr_check(DisparityMap& disp, const DisparityMap& right, double threshold) {
    const int w = disp.width(), h = disp.height();
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const float dl = disp.at(y, x);
            if (!disparity_valid(dl)) continue;
            const int xr = x - static_cast<int>(std::lround(dl));
            if (xr < 0 || xr >= w) {
                disp.at(y, x) = kInvalidDisparity;
                continue;
            }
            const float dr = right.at(y, xr);
            if (!disparity_valid(dr) || std::abs(dl - dr) > threshold)
                disp.at(y, x) = kInvalidDisparity;
        }
}

void apply_speckle_filter(DisparityMap& disp, double max_diff, int min_region) {
    if (min_region <= 1) return;
    const int w = disp.width(), h = disp.height();
    Plane<std::int32_t> label = Plane<std::int32_t>::Constant(h, w, -1);
    std::vector<std::pair<int, int>> stack, region;
    std::int32_t next_label = 0;

    for (int sy = 0; sy < h; ++sy)
        for (int sx = 0; sx < w; ++sx) {
            if (label(sy, sx) >= 0 || !disparity_valid(disp.at(sy, sx))) continue;
            region.clear();
            stack.assign(1, {sx, sy});
            label(sy, sx) = next_label;
            while (!stack.empty()) {
                const auto [x, y] = stack.back();
                stack.pop_back();
                region.emplace_back(x, y);
                const float d = disp.at(y, x);
                constexpr int nx[4] = {1, -1, 0, 0};
                constexpr int ny[4] = {0, 0, 1, -1};
                for (int n = 0; n < 4; ++n) {
                    const int xx = x + nx[n], yy = y + ny[n];
                    if (xx < 0 || xx >= w || yy < 0 || yy >= h) continue;
                    if (label(yy, xx) >= 0 || !disparity_valid(disp.at(yy, xx))) continue;
                    if (std::abs(disp.at(yy, xx) - d) > max_diff) continue;
                    label(yy, xx) = next_label;
                    stack.emplace_back(xx, yy);
                }
            }
            if (static_cast<int>(region.size()) < min_region)
                for (const auto& [x, y] : region) disp.at(y, x) = kInvalidDisparity;
            ++next_label;
        }
}

void fill_background(DisparityMap& disp) {
    const int w = disp.width(), h = disp.height();
    std::vector<int> empty_rows;
    for (int y = 0; y < h; ++y) {
        // nearest valid value to the left/right of every pixel
        std::vector<float> left_val(static_cast<std::size_t>(w), kInvalidDisparity);
        std::vector<float> right_val(static_cast<std::size_t>(w), kInvalidDisparity);
        float run = kInvalidDisparity;
        for (int x = 0; x < w; ++x) {
            if (disparity_valid(disp.at(y, x))) run = disp.at(y, x);
            left_val[static_cast<std::size_t>(x)] = run;
        }
        run = kInvalidDisparity;
        for (int x = w - 1; x >= 0; --x) {
            if (disparity_valid(disp.at(y, x))) run = disp.at(y, x);
            right_val[static_cast<std::size_t>(x)] = run;
        }
        if (!disparity_valid(left_val[static_cast<std::size_t>(w - 1)])) {
            empty_rows.push_back(y);  // no valid pixel anywhere in this row
            continue;
        }
        for (int x = 0; x < w; ++x) {
            if (disparity_valid(disp.at(y, x))) continue;
            const float l = left_val[static_cast<std::size_t>(x)];
            const float r = right_val[static_cast<std::size_t>(x)];
            float v;
            if (disparity_valid(l) && disparity_valid(r)) v = std::min(l, r);
            else v = disparity_valid(l) ? l : r;
            disp.at(y, x) = v;
        }
    }
    if (empty_rows.size() == static_cast<std::size_t>(h)) return;  // nothing to copy from
    for (int y : empty_rows) {
        int src = -1;
        for (int off = 1; off < h; ++off) {  // prefer the nearer row, above on ties
            const int up = y - off, down = y + off;
            if (up >= 0 && !std::binary_search(empty_rows.begin(), empty_rows.end(), up)) {
                src = up;
                break;
            }
            if (down < h && !std::binary_search(empty_rows.begin(), empty_rows.end(), down)) {
                src = down;
                break;
            }
        }
        disp.values.row(y) = disp.values.row(src);
    }
}

}  // namespace

DisparityMap lr_check_speckle_fill(const DisparityMap& disp_left,
                                   const DisparityMap& disp_right, const SgmParams& params) {
    if (disp_left.width() != disp_right.width() || disp_left.height() != disp_right.height())
        throw std::invalid_argument("lr_check_speckle_fill: size mismatch");
    DisparityMap out = disp_left;
    apply_lr_check(out, disp_right, params.lr_threshold);
    apply_speckle_filter(out, params.speckle_max_diff, params.speckle_min_region);
    fill_background(out);
    return out;
}

DisparityMap match_stereo(const ImageBuffer& left, const ImageBuffer& right,
                          const SgmParams& params, const HintSet* guide_hints,
                          const GuideParams& guide) {
    params.validate();
    auto vol = census_cost(left, right, params.max_disparity, params.census_window);
    if (guide_hints) guide_cost_volume(vol, *guide_hints, guide);
    const PlaneU8 gray = to_grayscale(left);
    const auto agg = sgm_aggregate(vol, gray, params);
    vol.cost.clear();
    vol.cost.shrink_to_fit();
    const DisparityMap disp_left = wta_subpixel(agg);
    const DisparityMap disp_right = wta_right_view(agg);
    return lr_check_speckle_fill(disp_left, disp_right, params);
}

}  // namespace vpp
