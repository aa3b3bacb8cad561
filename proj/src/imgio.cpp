#include "vpp/imgio.hpp"

#include "vpp/error.hpp"
#include "vpp/sampling_eval.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace vpp {

namespace {

float byteswap_f32(float v) {
    auto u = std::bit_cast<std::uint32_t>(v);
    u = (u >> 24) | ((u >> 8) & 0x0000FF00u) | ((u << 8) & 0x00FF0000u) | (u << 24);
    return std::bit_cast<float>(u);
}

constexpr bool host_little_endian() {
    return std::endian::native == std::endian::little;
}

std::string format_float(float v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// PFM
// ---------------------------------------------------------------------------

DisparityMap read_pfm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);

    std::string magic;
    is >> magic;
    if (magic == "PF") throw FormatError(path + ": color PFM is not a disparity map");
    if (magic != "Pf") throw FormatError(path + ": bad PFM magic");

    long long w = 0, h = 0;
    double scale = 0.0;
    is >> w >> h >> scale;
    if (!is || w <= 0 || h <= 0 || scale == 0.0 || w * h > (1ll << 31))
        throw FormatError(path + ": bad PFM header");
    is.get();  // single whitespace before the payload

    const bool file_little = scale < 0.0;
    DisparityMap map(static_cast<int>(w), static_cast<int>(h));
    std::vector<float> row(static_cast<size_t>(w));
    // PFM rows are stored bottom-up.
    for (long long r = h - 1; r >= 0; --r) {
        is.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(w * 4));
        if (!is) throw IoError(path + ": truncated PFM payload");
        for (long long c = 0; c < w; ++c) {
            float v = row[static_cast<size_t>(c)];
            if (file_little != host_little_endian()) v = byteswap_f32(v);
            map.at(static_cast<int>(r), static_cast<int>(c)) =
                (std::isfinite(v) && v >= 0.0f) ? v : kInvalidDisparity;
        }
    }
    return map;
}

void write_pfm(const DisparityMap& map, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");

    os << "Pf\n" << map.width() << " " << map.height() << "\n-1.0\n";
    std::vector<float> row(static_cast<size_t>(map.width()));
    for (int r = map.height() - 1; r >= 0; --r) {
        for (int c = 0; c < map.width(); ++c) {
            float v = map.at(r, c);
            if (!disparity_valid(v)) v = std::numeric_limits<float>::infinity();
            if (!host_little_endian()) v = byteswap_f32(v);
            row[static_cast<size_t>(c)] = v;
        }
        os.write(reinterpret_cast<const char*>(row.data()),
                 static_cast<std::streamsize>(row.size() * 4));
    }
    if (!os) throw IoError(path + ": short write");
}

// ---------------------------------------------------------------------------
// PNG
// ---------------------------------------------------------------------------

namespace {

struct PngReader {
    FILE* fp = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;

    explicit PngReader(const std::string& path) {
        fp = std::fopen(path.c_str(), "rb");
        if (!fp) throw IoError("cannot open " + path);
        unsigned char sig[8];
        if (std::fread(sig, 1, 8, fp) != 8 || png_sig_cmp(sig, 0, 8)) {
            std::fclose(fp);
            fp = nullptr;
            throw FormatError(path + ": not a PNG file");
        }
        png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        info = png ? png_create_info_struct(png) : nullptr;
        if (!png || !info) {
            close();
            throw IoError(path + ": libpng init failed");
        }
        png_init_io(png, fp);
        png_set_sig_bytes(png, 8);
    }

    ~PngReader() { close(); }

    void close() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
        png = nullptr;
        info = nullptr;
        fp = nullptr;
    }
};

struct PngWriter {
    FILE* fp = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;

    explicit PngWriter(const std::string& path) {
        fp = std::fopen(path.c_str(), "wb");
        if (!fp) throw IoError("cannot open " + path + " for writing");
        png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        info = png ? png_create_info_struct(png) : nullptr;
        if (!png || !info) {
            close();
            throw IoError(path + ": libpng init failed");
        }
        png_init_io(png, fp);
    }

    ~PngWriter() { close(); }

    void close() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
        png = nullptr;
        info = nullptr;
        fp = nullptr;
    }
};

}  // namespace

ImageBuffer read_image_png(const std::string& path) {
    PngReader r(path);
    if (setjmp(png_jmpbuf(r.png))) throw FormatError(path + ": PNG decode error");

    png_read_info(r.png, r.info);
    const png_uint_32 w = png_get_image_width(r.png, r.info);
    const png_uint_32 h = png_get_image_height(r.png, r.info);
    const int color = png_get_color_type(r.png, r.info);

    if (png_get_bit_depth(r.png, r.info) == 16) png_set_strip_16(r.png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(r.png, r.info) < 8)
        png_set_expand_gray_1_2_4_to_8(r.png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(r.png);
    png_read_update_info(r.png, r.info);

    const int ch = png_get_channels(r.png, r.info);
    if (ch != 1 && ch != 3) throw FormatError(path + ": unsupported channel count");

    ImageBuffer img(static_cast<int>(w), static_cast<int>(h), ch);
    std::vector<std::uint8_t> row(static_cast<size_t>(w) * ch);
    for (png_uint_32 y = 0; y < h; ++y) {
        png_read_row(r.png, row.data(), nullptr);
        for (png_uint_32 x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c)
                img.at(c, static_cast<int>(y), static_cast<int>(x)) = row[x * ch + c];
    }
    png_read_end(r.png, nullptr);
    return img;
}

void write_image_png(const ImageBuffer& img, const std::string& path) {
    PngWriter w(path);
    if (setjmp(png_jmpbuf(w.png))) throw IoError(path + ": PNG encode error");

    const int color =
        img.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(img.width()),
                 static_cast<png_uint_32>(img.height()), 8, color,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);

    std::vector<std::uint8_t> row(static_cast<size_t>(img.width()) * img.channels());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < img.channels(); ++c)
                row[static_cast<size_t>(x) * img.channels() + c] = img.at(c, y, x);
        png_write_row(w.png, row.data());
    }
    png_write_end(w.png, nullptr);
}

DisparityMap read_disparity_png16(const std::string& path) {
    PngReader r(path);
    if (setjmp(png_jmpbuf(r.png))) throw FormatError(path + ": PNG decode error");

    png_read_info(r.png, r.info);
    if (png_get_bit_depth(r.png, r.info) != 16)
        throw FormatError(path + ": disparity PNG must be 16-bit");
    if (png_get_channels(r.png, r.info) != 1)
        throw FormatError(path + ": disparity PNG must be single-channel");
    if (host_little_endian()) png_set_swap(r.png);  // PNG samples are big-endian
    png_read_update_info(r.png, r.info);

    const int w = static_cast<int>(png_get_image_width(r.png, r.info));
    const int h = static_cast<int>(png_get_image_height(r.png, r.info));
    DisparityMap map(w, h);
    std::vector<std::uint16_t> row(static_cast<size_t>(w));
    for (int y = 0; y < h; ++y) {
        png_read_row(r.png, reinterpret_cast<png_bytep>(row.data()), nullptr);
        for (int x = 0; x < w; ++x) {
            const std::uint16_t v = row[static_cast<size_t>(x)];
            map.at(y, x) = v == 0 ? kInvalidDisparity : static_cast<float>(v) / 256.0f;
        }
    }
    png_read_end(r.png, nullptr);
    return map;
}

void write_disparity_png16(const DisparityMap& map, const std::string& path) {
    PngWriter w(path);
    if (setjmp(png_jmpbuf(w.png))) throw IoError(path + ": PNG encode error");

    png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(map.width()),
                 static_cast<png_uint_32>(map.height()), 16, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    if (host_little_endian()) png_set_swap(w.png);

    std::vector<std::uint16_t> row(static_cast<size_t>(map.width()));
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            const float d = map.at(y, x);
            std::uint16_t stored = 0;
            if (disparity_valid(d)) {
                long long q = std::llround(static_cast<double>(d) * 256.0);
                q = std::max(1ll, std::min(q, 65535ll));  // 0 is reserved for invalid
                stored = static_cast<std::uint16_t>(q);
            }
            row[static_cast<size_t>(x)] = stored;
        }
        png_write_row(w.png, reinterpret_cast<png_bytep>(row.data()));
    }
    png_write_end(w.png, nullptr);
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

DisparityMap read_disparity(const std::string& path) {
    if (ends_with(path, ".pfm") || ends_with(path, ".PFM")) return read_pfm(path);
    if (ends_with(path, ".png") || ends_with(path, ".PNG")) return read_disparity_png16(path);
    throw FormatError(path + ": unknown disparity extension (want .pfm or .png)");
}

void write_disparity(const DisparityMap& map, const std::string& path) {
    if (ends_with(path, ".pfm") || ends_with(path, ".PFM")) return write_pfm(map, path);
    if (ends_with(path, ".png") || ends_with(path, ".PNG"))
        return write_disparity_png16(map, path);
    throw FormatError(path + ": unknown disparity extension (want .pfm or .png)");
}

// ---------------------------------------------------------------------------
// Hints CSV
// ---------------------------------------------------------------------------

HintSet read_hints(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);

    std::string line;
    if (!std::getline(is, line)) throw FormatError(path + ": empty hints file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,y,d") throw FormatError(path + ": expected header 'x,y,d'");

    HintSet hints;
    std::set<std::pair<int, int>> seen;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        Hint h;
        char extra = 0;
        if (std::sscanf(line.c_str(), "%d,%d,%f%c", &h.x, &h.y, &h.d, &extra) < 3)
            throw FormatError(path + ": bad hint at line " + std::to_string(lineno));
        if (!(h.d >= 0.0f) || !std::isfinite(h.d))
            throw std::invalid_argument(path + ": hint disparity must be >= 0 at line " +
                                        std::to_string(lineno));
        if (!seen.insert({h.x, h.y}).second)
            throw std::invalid_argument(path + ": duplicate hint pixel at line " +
                                        std::to_string(lineno));
        hints.push_back(h);
    }
    return hints;
}

void write_hints(const HintSet& hints, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << "x,y,d\n";
    for (const Hint& h : hints)
        os << h.x << ',' << h.y << ',' << format_float(h.d) << '\n';
    if (!os) throw IoError(path + ": short write");
}

// ---------------------------------------------------------------------------
// Middlebury calib.txt
// ---------------------------------------------------------------------------

Calibration read_calibration(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);

    Calibration calib;
    bool have_focal = false, have_baseline = false;
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        if (key == "cam0") {
            // cam0=[f 0 cx; 0 f cy; 0 0 1] -> first number is the focal length
            const auto open = value.find('[');
            if (open != std::string::npos) value = value.substr(open + 1);
            std::istringstream vs(value);
            double f = 0.0;
            if (vs >> f) {
                calib.focal_length_px = f;
                have_focal = true;
            }
        } else if (key == "baseline") {
            calib.baseline = std::atof(value.c_str());
            have_baseline = true;
        } else if (key == "doffs") {
            calib.disparity_offset = std::atof(value.c_str());
        }
    }
    if (!have_focal || !have_baseline)
        throw FormatError(path + ": calib.txt missing cam0 or baseline");
    calib.validate();
    return calib;
}

// ---------------------------------------------------------------------------
// Metrics JSON
// ---------------------------------------------------------------------------

nlohmann::ordered_json metrics_to_json(const MetricsReport& report) {
    nlohmann::ordered_json j;
    j["bad1"] = report.bad1;
    j["bad2"] = report.bad2;
    j["bad3"] = report.bad3;
    j["bad4"] = report.bad4;
    j["avg_px"] = report.avg_px;
    j["evaluated_count"] = report.evaluated_count;
    j["coverage"] = report.coverage;
    return j;
}

void write_text_file(const std::string& text, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << text;
    if (!os) throw IoError(path + ": short write");
}

}  // namespace vpp
