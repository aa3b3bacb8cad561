#include "vpp/sampling_eval.hpp"

#include "vpp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vpp {

HintSet sample_hints(const DisparityMap& gt, double density, std::uint64_t seed) {
    if (!(density >= 0.0 && density <= 1.0))
        throw std::domain_error("sample_hints: density must be in [0, 1]");

    std::vector<std::int64_t> valid;
    const int w = gt.width(), h = gt.height();
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (disparity_valid(gt.at(y, x))) valid.push_back(static_cast<std::int64_t>(y) * w + x);

    const auto count =
        static_cast<std::size_t>(std::llround(density * static_cast<double>(valid.size())));

    // Partial Fisher-Yates: the first `count` entries are a uniform sample
    // without replacement.
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(valid.size() - i));
        std::swap(valid[i], valid[j]);
    }
    valid.resize(count);
    std::sort(valid.begin(), valid.end());  // ascending (y, x)

    HintSet hints;
    hints.reserve(count);
    for (std::int64_t idx : valid) {
        Hint hint;
        hint.x = static_cast<int>(idx % w);
        hint.y = static_cast<int>(idx / w);
        hint.d = gt.at(hint.y, hint.x);
        hints.push_back(hint);
    }
    return hints;
}

MetricsReport evaluate(const DisparityMap& disp, const DisparityMap& gt, const PlaneU8* mask) {
    if (disp.width() != gt.width() || disp.height() != gt.height())
        throw std::invalid_argument("evaluate: prediction and GT sizes differ");
    if (mask && (mask->cols() != gt.values.cols() || mask->rows() != gt.values.rows()))
        throw std::invalid_argument("evaluate: mask size differs");

    std::int64_t n = 0, valid_pred = 0;
    std::int64_t bad[4] = {0, 0, 0, 0};
    double err_sum = 0.0;

    for (int y = 0; y < gt.height(); ++y)
        for (int x = 0; x < gt.width(); ++x) {
            const float g = gt.at(y, x);
            if (!disparity_valid(g)) continue;
            if (mask && (*mask)(y, x) == 0) continue;
            ++n;
            const float d = disp.at(y, x);
            if (!disparity_valid(d)) {
                for (auto& b : bad) ++b;  // invalid prediction is bad at every tau
                continue;
            }
            ++valid_pred;
            const double err = std::abs(static_cast<double>(d) - static_cast<double>(g));
            err_sum += err;
            for (int t = 0; t < 4; ++t)
                if (err > t + 1) ++bad[t];
        }

    MetricsReport report;
    report.evaluated_count = n;
    if (n > 0) {
        report.bad1 = 100.0 * static_cast<double>(bad[0]) / static_cast<double>(n);
        report.bad2 = 100.0 * static_cast<double>(bad[1]) / static_cast<double>(n);
        report.bad3 = 100.0 * static_cast<double>(bad[2]) / static_cast<double>(n);
        report.bad4 = 100.0 * static_cast<double>(bad[3]) / static_cast<double>(n);
        report.coverage = static_cast<double>(valid_pred) / static_cast<double>(n);
    }
    if (valid_pred > 0) report.avg_px = err_sum / static_cast<double>(valid_pred);
    return report;
}

}  // namespace vpp
