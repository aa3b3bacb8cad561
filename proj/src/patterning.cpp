#include "vpp/patterning.hpp"

#include "vpp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vpp {

namespace {

// Round-half-up storage for 8-bit planes; pass-through for float planes.
template <typename Scalar>
Scalar store_value(double v) {
    if constexpr (std::is_integral_v<Scalar>) {
        const double r = std::floor(v + 0.5);
        return static_cast<Scalar>(std::clamp(r, 0.0, 255.0));
    } else {
        return static_cast<Scalar>(v);
    }
}

template <typename Scalar>
void blend_pixel(Plane<Scalar>& plane, int y, int x, double value, double alpha) {
    const double old = static_cast<double>(plane(y, x));
    plane(y, x) = store_value<Scalar>((1.0 - alpha) * old + alpha * value);
}

}  // namespace

std::array<std::uint8_t, 3> random_color(Rng& rng, int channels) {
    std::array<std::uint8_t, 3> color{};
    for (int c = 0; c < channels; ++c) color[static_cast<std::size_t>(c)] = rng.byte();
    return color;
}

std::uint8_t hdist_color(const Histogram256& hist) {
    bool all_filled = true;
    for (int i = 0; i < 256; ++i)
        if (!hist.filled(i)) {
            all_filled = false;
            break;
        }
    if (all_filled) {
        int best = 0;
        for (int i = 1; i < 256; ++i)
            if (hist.bins[static_cast<std::size_t>(i)] < hist.bins[static_cast<std::size_t>(best)])
                best = i;
        return static_cast<std::uint8_t>(best);
    }

    // Distance to the nearest filled bin in each direction; a filled bin is
    // at distance 0 from itself, so occupied colors never win the argmax.
    constexpr int kUnbounded = 1 << 20;  // empty histogram only
    std::array<int, 256> below{}, above{};
    int last = -1;
    for (int i = 0; i < 256; ++i) {
        if (hist.filled(i)) last = i;
        below[static_cast<std::size_t>(i)] = last < 0 ? kUnbounded : i - last;
    }
    last = -1;
    for (int i = 255; i >= 0; --i) {
        if (hist.filled(i)) last = i;
        above[static_cast<std::size_t>(i)] = last < 0 ? kUnbounded : last - i;
    }

    int best = 0, best_dist = -1;
    for (int i = 0; i < 256; ++i) {
        const int dist = std::min(below[static_cast<std::size_t>(i)],
                                  above[static_cast<std::size_t>(i)]);
        if (dist > best_dist) {
            best_dist = dist;
            best = i;
        }
    }
    return static_cast<std::uint8_t>(best);
}

std::vector<Histogram256> gather_histogram(const ImageBuffer& left, const ImageBuffer& right,
                                           int x, double x_prime, int y, int window_length) {
    std::vector<Histogram256> hists(static_cast<std::size_t>(left.channels()));
    const int half = window_length / 2;

    auto accumulate = [&](const ImageBuffer& img, int cx) {
        const int x0 = std::max(cx - half, 0);
        const int x1 = std::min(cx - half + window_length - 1, img.width() - 1);
        const int y0 = std::max(y - 1, 0);
        const int y1 = std::min(y + 1, img.height() - 1);
        if (x0 > x1 || y0 > y1) return;
        for (int c = 0; c < img.channels(); ++c)
            for (int yy = y0; yy <= y1; ++yy)
                for (int xx = x0; xx <= x1; ++xx)
                    hists[static_cast<std::size_t>(c)].add(img.at(c, yy, xx));
    };

    accumulate(left, x);
    accumulate(right, static_cast<int>(std::lround(x_prime)));
    return hists;
}

// The splat distributes the alpha-blended pattern: each target column blends
// its own content toward `value` first, then the splat weights apply. With
// alpha = 1 the floor/ceil updates reduce to the plain weighted splat.
template <typename Scalar>
void splat_right(Plane<Scalar>& plane, double x_prime, int y, double value, double alpha) {
    if (y < 0 || y >= plane.rows()) return;
    const double fl = std::floor(x_prime);
    const double beta = x_prime - fl;
    const int c0 = static_cast<int>(fl);
    const int width = static_cast<int>(plane.cols());

    if (beta == 0.0) {
        // Degenerate splat: single column, full weight.
        if (c0 >= 0 && c0 < width) blend_pixel(plane, y, c0, value, alpha);
        return;
    }
    if (c0 >= 0 && c0 < width) {
        const double old = static_cast<double>(plane(y, c0));
        const double blended = (1.0 - alpha) * old + alpha * value;
        plane(y, c0) = store_value<Scalar>(beta * old + (1.0 - beta) * blended);
    }
    const int c1 = c0 + 1;
    if (c1 >= 0 && c1 < width) {
        const double old = static_cast<double>(plane(y, c1));
        const double blended = (1.0 - alpha) * old + alpha * value;
        plane(y, c1) = store_value<Scalar>((1.0 - beta) * old + beta * blended);
    }
}

template void splat_right<std::uint8_t>(Plane<std::uint8_t>&, double, int, double, double);
template void splat_right<float>(Plane<float>&, double, int, double, double);
template void splat_right<double>(Plane<double>&, double, int, double, double);

namespace {

// Linear interpolation along row y of the right image at real column xs.
double sample_row(const ImageBuffer& img, int c, int y, double xs) {
    const double fl = std::floor(xs);
    const int c0 = static_cast<int>(fl);
    const double b = xs - fl;
    if (b == 0.0) return static_cast<double>(img.at(c, y, c0));
    return (1.0 - b) * img.at(c, y, c0) + b * img.at(c, y, c0 + 1);
}

class PatternEngine {
public:
    PatternEngine(ImageBuffer& left, ImageBuffer& right, const VppConfig& config)
        : left_(left), right_(right), config_(config), rng_(config.rng_seed) {}

    void project(const Hint& hint) {
        const Correspondence corr = correspondence(hint.x, hint.y, hint.d);
        const bool left_only = corr.out_of_target();  // left-border rule wins

        if (!left_only && hint.occluded) {
            switch (config_.strategy) {
                case OcclusionStrategy::No:
                    return;
                case OcclusionStrategy::Fgd:
                    replace_with_target_content(hint, corr);
                    return;
                case OcclusionStrategy::Bkgd:
                    break;  // project as if visible
            }
        }
        project_pattern(hint, corr, left_only);
    }

private:
    void project_pattern(const Hint& hint, const Correspondence& corr, bool left_only) {
        const int half = (config_.patch - 1) / 2;
        const int channels = left_.channels();

        std::array<std::uint8_t, 3> color{};
        const bool uniform = config_.uniform_patch && config_.patch > 1;
        if (uniform) color = pick_color(hint.x, corr.x_prime, hint.y);

        for (int dy = -half; dy <= half; ++dy) {
            const int ly = hint.y + dy;
            if (ly < 0 || ly >= left_.height()) continue;
            for (int dx = -half; dx <= half; ++dx) {
                const int lx = hint.x + dx;
                if (lx < 0 || lx >= left_.width()) continue;
                const double xr = corr.x_prime + dx;  // same disparity across the patch
                if (!uniform) color = pick_color(lx, xr, ly);
                for (int c = 0; c < channels; ++c) {
                    const double a = color[static_cast<std::size_t>(c)];
                    blend_pixel(left_.plane(c), ly, lx, a, config_.alpha);
                    if (!left_only) splat_right(right_.plane(c), xr, ly, a, config_.alpha);
                }
            }
        }
    }

    // FGD: stimulate a second match by copying the occluder's appearance from
    // the target image over the occluded reference patch. No blending.
    void replace_with_target_content(const Hint& hint, const Correspondence& corr) {
        const int half = (config_.patch - 1) / 2;
        for (int dy = -half; dy <= half; ++dy) {
            const int ly = hint.y + dy;
            if (ly < 0 || ly >= left_.height()) continue;
            for (int dx = -half; dx <= half; ++dx) {
                const int lx = hint.x + dx;
                if (lx < 0 || lx >= left_.width()) continue;
                const double xs = corr.x_prime + dx;
                if (xs < 0.0 || xs > right_.width() - 1.0) continue;
                for (int c = 0; c < left_.channels(); ++c)
                    left_.plane(c)(ly, lx) =
                        store_value<std::uint8_t>(sample_row(right_, c, ly, xs));
            }
        }
    }

    std::array<std::uint8_t, 3> pick_color(int x, double x_prime, int y) {
        if (config_.source == PatternSource::Random)
            return random_color(rng_, left_.channels());
        const auto hists = gather_histogram(left_, right_, x, x_prime, y, config_.window_length);
        std::array<std::uint8_t, 3> color{};
        for (std::size_t c = 0; c < hists.size(); ++c) color[c] = hdist_color(hists[c]);
        return color;
    }

    ImageBuffer& left_;
    ImageBuffer& right_;
    const VppConfig& config_;
    Rng rng_;
};

}  // namespace

std::pair<ImageBuffer, ImageBuffer> apply_vpp(const ImageBuffer& left, const ImageBuffer& right,
                                              const HintSet& hints, const VppConfig& config) {
    config.validate();
    if (!left.same_size(right))
        throw std::invalid_argument("apply_vpp: image sizes/channels differ");
    validate_hints(hints, left.width(), left.height());

    ImageBuffer out_left = left;
    ImageBuffer out_right = right;

    // Histogram variants read back what earlier hints painted, so the
    // processing order is part of the contract: ascending (y, x).
    std::vector<std::size_t> order(hints.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Hint& ha = hints[a];
        const Hint& hb = hints[b];
        return ha.y != hb.y ? ha.y < hb.y : ha.x < hb.x;
    });

    PatternEngine engine(out_left, out_right, config);
    for (std::size_t i : order) engine.project(hints[i]);
    return {std::move(out_left), std::move(out_right)};
}

}  // namespace vpp
