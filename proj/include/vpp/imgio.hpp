#pragma once

#include "vpp/types.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace vpp {

struct MetricsReport;  // sampling_eval.hpp

// ---- PFM (grayscale "Pf", float32, bottom-up rows, scale sign = endianness) ----

DisparityMap read_pfm(const std::string& path);

/// Writes scale -1.0 (little-endian); invalid pixels stored as +inf.
void write_pfm(const DisparityMap& map, const std::string& path);

// ---- 16-bit PNG disparity (value / 256, stored 0 = invalid) ----

DisparityMap read_disparity_png16(const std::string& path);
void write_disparity_png16(const DisparityMap& map, const std::string& path);

/// Dispatch on extension: .pfm or .png.
DisparityMap read_disparity(const std::string& path);
void write_disparity(const DisparityMap& map, const std::string& path);

// ---- 8-bit PNG images ----

/// Gray stays 1-channel; palette/RGB/RGBA are folded to 3 channels, 16-bit to 8.
ImageBuffer read_image_png(const std::string& path);
void write_image_png(const ImageBuffer& img, const std::string& path);

// ---- Hint CSV ("x,y,d" header, one hint per line) ----

HintSet read_hints(const std::string& path);
void write_hints(const HintSet& hints, const std::string& path);

// ---- Middlebury calib.txt (key=value lines) ----

Calibration read_calibration(const std::string& path);

// ---- Metrics JSON (fixed key order) ----

nlohmann::ordered_json metrics_to_json(const MetricsReport& report);
void write_text_file(const std::string& text, const std::string& path);

}  // namespace vpp
