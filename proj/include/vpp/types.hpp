#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace vpp {

/// Dense row-major raster plane, (row, col) == (y, x).
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using PlaneU8 = Plane<std::uint8_t>;
using PlaneF = Plane<float>;

/// 8-bit raster with 1 (gray) or 3 (RGB) planes.
template <typename Scalar>
class Image {
public:
    Image() = default;

    Image(int width, int height, int channels) {
        if (width <= 0 || height <= 0)
            throw std::invalid_argument("Image: dimensions must be positive");
        if (channels != 1 && channels != 3)
            throw std::invalid_argument("Image: channels must be 1 or 3");
        planes_.resize(channels);
        for (auto& p : planes_) p = Plane<Scalar>::Zero(height, width);
    }

    int width() const { return planes_.empty() ? 0 : static_cast<int>(planes_[0].cols()); }
    int height() const { return planes_.empty() ? 0 : static_cast<int>(planes_[0].rows()); }
    int channels() const { return static_cast<int>(planes_.size()); }

    Plane<Scalar>& plane(int c) { return planes_.at(c); }
    const Plane<Scalar>& plane(int c) const { return planes_.at(c); }

    Scalar& at(int c, int y, int x) { return planes_[c](y, x); }
    Scalar at(int c, int y, int x) const { return planes_[c](y, x); }

    bool same_size(const Image& other) const {
        return width() == other.width() && height() == other.height() &&
               channels() == other.channels();
    }

    friend bool operator==(const Image& a, const Image& b) {
        if (!a.same_size(b)) return false;
        for (int c = 0; c < a.channels(); ++c)
            if (!(a.plane(c) == b.plane(c)).all()) return false;
        return true;
    }

private:
    std::vector<Plane<Scalar>> planes_;
};

using ImageBuffer = Image<std::uint8_t>;

/// Sentinel for unknown disparity; PFM convention stores it as +inf.
inline constexpr float kInvalidDisparity = std::numeric_limits<float>::infinity();

inline bool disparity_valid(float d) { return std::isfinite(d); }

/// Per-pixel disparity in the reference (left) view, kInvalidDisparity where unknown.
struct DisparityMap {
    PlaneF values;

    DisparityMap() = default;
    DisparityMap(int width, int height)
        : values(PlaneF::Constant(height, width, kInvalidDisparity)) {}

    int width() const { return static_cast<int>(values.cols()); }
    int height() const { return static_cast<int>(values.rows()); }

    float& at(int y, int x) { return values(y, x); }
    float at(int y, int x) const { return values(y, x); }

    Eigen::Index valid_count() const { return values.isFinite().count(); }
};

/// Rectified-rig intrinsics; baseline in the same length unit as depth inputs.
struct Calibration {
    double focal_length_px = 0.0;
    double baseline = 0.0;
    double disparity_offset = 0.0;

    void validate() const {
        if (!(focal_length_px > 0.0)) throw std::invalid_argument("Calibration: focal must be > 0");
        if (!(baseline > 0.0)) throw std::invalid_argument("Calibration: baseline must be > 0");
    }
};

/// One sparse disparity seed at an integer reference-image pixel.
struct Hint {
    int x = 0;
    int y = 0;
    float d = 0.0f;
    bool occluded = false;
    bool out_of_target = false;  // warps left of the target image
};

using HintSet = std::vector<Hint>;

/// Bounds check against a reference raster; call when hints meet an image.
inline void validate_hints(const HintSet& hints, int width, int height) {
    for (const Hint& h : hints) {
        if (h.x < 0 || h.x >= width || h.y < 0 || h.y >= height)
            throw std::invalid_argument("hint out of image bounds");
        if (!(h.d >= 0.0f) || !std::isfinite(h.d))
            throw std::invalid_argument("hint disparity must be finite and >= 0");
    }
}

}  // namespace vpp
