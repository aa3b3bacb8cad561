#pragma once

#include "vpp/types.hpp"

#include <cstdint>
#include <optional>

namespace vpp {

/// bad-tau error rates in percent plus mean absolute error. Invalid
/// predictions count as bad at every tau and are excluded from avg_px;
/// coverage reports the valid-prediction fraction.
struct MetricsReport {
    double bad1 = 0.0;
    double bad2 = 0.0;
    double bad3 = 0.0;
    double bad4 = 0.0;
    double avg_px = 0.0;
    std::int64_t evaluated_count = 0;
    double coverage = 0.0;
};

/// Uniform sample of round(density * valid_count) distinct valid-GT pixels,
/// returned in ascending (y, x) order; deterministic for a fixed seed.
HintSet sample_hints(const DisparityMap& gt, double density, std::uint64_t seed);

/// Scores a prediction over pixels with valid GT (optionally intersected
/// with a nonzero mask). Thresholds are strict: an error of exactly tau is
/// not bad.
MetricsReport evaluate(const DisparityMap& disp, const DisparityMap& gt,
                       const PlaneU8* mask = nullptr);

}  // namespace vpp
