#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sigkit/image.hpp"

namespace sigkit {

/// 2D transform coefficients, row-major, same grid shape as the source image.
struct DctCoeffs {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double at(int col, int row) const { return values[static_cast<std::size_t>(row) * width + col]; }
    double& at(int col, int row) { return values[static_cast<std::size_t>(row) * width + col]; }
};

/// 64 normalized features describing one signature.
struct FeatureVector {
    std::vector<double> values; // exactly kFeatureDim entries in [0, 1]
    std::string source_id;
};

inline constexpr int kFeatureDim = 64;
inline constexpr int kAnalysisSize = 64; // images are resampled here before the transform
inline constexpr int kFeatureBlock = 8;  // low-frequency block side

/// Orthonormal DCT-II over both dimensions: per dimension of length n the
/// scale factors are sqrt(1/n) for the DC term and sqrt(2/n) otherwise.
/// Computed separably (rows then columns).
DctCoeffs dct2(const RealImage& img);
DctCoeffs dct2(const GrayImage& img);

/// Exact inverse of dct2 up to floating-point error.
RealImage idct2(const DctCoeffs& coeffs);

/// (row, col) visit order of the diagonal low-frequency scan for a k x k block.
std::vector<std::pair<int, int>> zigzag_order(int k);

/// Top-left k x k block of the coefficient grid flattened in zig-zag order,
/// DC coefficient first. Throws BlockTooLarge when the grid is smaller than k.
std::vector<double> zigzag_block(const DctCoeffs& coeffs, int k);

enum class FeatureMode {
    Dct8x8, // 64x64 resample -> DCT -> 8x8 low-frequency block (default)
    Raw8x8, // 8x8 resample -> raw intensities (A/B alternative)
};

/// Fixed pipeline from an aligned (ink-tight) image to 64 features:
/// resample, transform per `mode`, then min-max normalize.
FeatureVector extract_features(const GrayImage& aligned, FeatureMode mode = FeatureMode::Dct8x8);

} // namespace sigkit
