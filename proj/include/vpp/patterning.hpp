#pragma once

#include "vpp/rng.hpp"
#include "vpp/types.hpp"

#include <array>
#include <cstdint>
#include <utility>

namespace vpp {

enum class PatternSource { Random, Histogram };

/// What to do with hints classified as occluded in the target view.
enum class OcclusionStrategy { No, Bkgd, Fgd };

struct VppConfig {
    PatternSource source = PatternSource::Random;
    int patch = 3;              // odd; 1 = pointwise
    bool uniform_patch = false; // one color per patch instead of per pixel
    double alpha = 0.4;
    OcclusionStrategy strategy = OcclusionStrategy::Fgd;
    int window_length = 64;     // histogram scanline window L
    std::uint64_t rng_seed = 7;

    void validate() const {
        if (patch < 1 || patch % 2 == 0)
            throw std::invalid_argument("VppConfig: patch must be odd and >= 1");
        if (alpha < 0.0 || alpha > 1.0)
            throw std::invalid_argument("VppConfig: alpha must be in [0, 1]");
        if (window_length < patch)
            throw std::invalid_argument("VppConfig: window length must be >= patch");
    }
};

/// Intensity occurrence counts over [0, 255].
struct Histogram256 {
    std::array<std::uint32_t, 256> bins{};

    void add(std::uint8_t v) { ++bins[v]; }
    bool filled(int i) const { return bins[static_cast<std::size_t>(i)] > 0; }
};

/// One i.i.d. uniform intensity per channel.
std::array<std::uint8_t, 3> random_color(Rng& rng, int channels);

/// Color maximizing the distance to the nearest filled bin (an occupied
/// color is at distance 0 from itself, so it cannot win). If every bin is
/// filled, the least frequent color wins instead. Ties break toward the
/// smallest intensity; the empty histogram returns 0.
std::uint8_t hdist_color(const Histogram256& hist);

/// Sums intensity histograms over two 3-row windows of length L, centered at
/// (x, y) in the left image and (round(x_prime), y) in the right; windows are
/// clipped at the borders. One histogram per channel.
std::vector<Histogram256> gather_histogram(const ImageBuffer& left, const ImageBuffer& right,
                                           int x, double x_prime, int y, int window_length);

/// Distributes `value` over the two columns bracketing x_prime on row y:
/// floor gets weight (1-beta), ceil gets beta, beta = frac(x_prime). `alpha`
/// additionally blends against the original content (alpha = 1 recovers the
/// pure splat). Integer x_prime writes the single column. Columns outside the
/// plane are dropped.
template <typename Scalar>
void splat_right(Plane<Scalar>& plane, double x_prime, int y, double value, double alpha = 1.0);

/// Paints the configured virtual pattern into both views for every hint,
/// honoring occlusion flags and the left-border rule. Hints are processed in
/// ascending (y, x) order; the result is deterministic for a fixed seed.
std::pair<ImageBuffer, ImageBuffer> apply_vpp(const ImageBuffer& left, const ImageBuffer& right,
                                              const HintSet& hints, const VppConfig& config);

}  // namespace vpp
