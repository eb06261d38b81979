#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sigkit/error.hpp"

namespace sigkit {

/// 8-bit grayscale raster, row-major. 0 = black ink, 255 = white background.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 255)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill)
    {
        if (w < 1 || h < 1)
            raise(Errc::InvalidArgument, "image dimensions must be >= 1");
    }

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

    bool operator==(const GrayImage&) const = default;
};

/// Real-valued raster; the transform code and test harnesses work on this
/// before any byte quantization.
struct RealImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    RealImage() = default;
    RealImage(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Tight bounding box of ink pixels; indices are inclusive.
struct InkBox {
    int left = 0;
    int top = 0;
    int right = 0;
    int bottom = 0;

    int box_width() const { return right - left + 1; }
    int box_height() const { return bottom - top + 1; }

    bool operator==(const InkBox&) const = default;
};

/// Pixels strictly below this intensity count as ink.
inline constexpr int kInkThreshold = 128;

/// Reads a binary PGM (P5, maxval 255) or an 8-bit grayscale PNG.
/// Color or alpha inputs are rejected.
GrayImage load_image(const std::filesystem::path& path);

/// Writes the canonical P5 form: "P5\n<w> <h>\n255\n" followed by raw bytes.
void save_image(const GrayImage& img, const std::filesystem::path& path);

/// Rotates about the image center with bilinear interpolation. The output
/// canvas is the bounding box of the rotated input, so no ink is clipped;
/// uncovered pixels are background (255). rotate(img, 0) is the exact identity.
GrayImage rotate(const GrayImage& img, double angle_deg);

/// Tightest box containing all pixels darker than `threshold`.
/// Throws NoInk when no pixel qualifies.
InkBox ink_bbox(const GrayImage& img, int threshold = kInkThreshold);

GrayImage crop(const GrayImage& img, const InkBox& box);

/// Bilinear resampling to exactly new_width x new_height.
GrayImage resize(const GrayImage& img, int new_width, int new_height);

RealImage to_real(const GrayImage& img);
GrayImage to_gray(const RealImage& img);

} // namespace sigkit
