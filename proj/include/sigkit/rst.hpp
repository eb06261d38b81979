#pragma once

#include <span>
#include <utility>
#include <vector>

#include "sigkit/image.hpp"

namespace sigkit {

/// Geometric distortion estimated between a probe and a reference.
struct RstParams {
    double rotation_deg = 0.0; // detected tilt, [-60, 60]
    int translation_x = 0;     // blank columns left of the ink
    int translation_y = 0;     // blank rows below the ink
    double scale_ratio = 1.0;  // reference height / probe height
};

/// Correlation score per candidate angle of the coarse sweep,
/// min-max normalized to [0, 1].
struct CorrelationProfile {
    std::vector<double> angles;
    std::vector<double> scores;
};

/// Side-channel numbers that are informative but never applied.
struct RstDiagnostics {
    double width_ratio = 1.0;
    int reference_crop_width = 0;
    int reference_crop_height = 0;
};

// Search geometry of the rotation sweep.
inline constexpr int kAngleRangeDeg = 60; // candidates span [-60, 60]
inline constexpr int kCoarseStepDeg = 5;
inline constexpr int kFineRadiusDeg = 3;  // 1-degree steps around the coarse peak
inline constexpr int kComparisonSize = 64; // candidates are compared on this square frame

/// Pearson correlation of two equally sized images over all pixels.
/// Throws DimensionMismatch on shape disagreement and ConstantImage when
/// either argument has zero intensity variance.
double ncc(const GrayImage& p, const GrayImage& q);

/// Same correlation on real-valued data; used by the rotation search
/// internals and by test harnesses that need to bypass byte quantization.
double ncc_real(std::span<const double> p, std::span<const double> q);

/// Rescales values so min maps to 0 and max maps to 1.
/// Throws DegenerateRange when all values are equal (or fewer than 2 given).
std::vector<double> minmax_normalize(std::span<const double> xs);

/// Two-stage correlation search for the probe's tilt: a coarse sweep every
/// 5 degrees over [-60, 60], then 1-degree steps within +/-3 of the coarse
/// peak. Each candidate is scored by derotating the probe, cropping both
/// images to their ink boxes and correlating on a common 64x64 frame.
/// Returns the detected angle (clamped to [-60, 60]) and the normalized
/// coarse profile. Ties resolve toward the smaller absolute angle.
std::pair<double, CorrelationProfile> estimate_rotation(const GrayImage& reference,
                                                        const GrayImage& probe,
                                                        int ink_threshold = kInkThreshold);

struct Translation {
    GrayImage cropped;
    int tx = 0; // blank columns from the left edge
    int ty = 0; // blank rows from the bottom edge
};

/// Crops to the ink box and reports the left/bottom margins that were removed.
Translation remove_translation(const GrayImage& img, int ink_threshold = kInkThreshold);

/// Height ratio reference/probe of two ink-tight crops. Height is the axis
/// that moves most under tilt, so it is the one applied downstream.
double estimate_scale(const GrayImage& reference_cropped, const GrayImage& probe_cropped);

struct Alignment {
    GrayImage aligned;     // probe at exactly the reference's tight-crop size
    RstParams params;
    CorrelationProfile coarse_profile;
};

/// Full correction pipeline, rotation first: derotate the probe, strip the
/// translation margins from both images, then rescale the probe onto the
/// reference's tight-crop dimensions.
Alignment correct_rst(const GrayImage& reference, const GrayImage& probe,
                      RstDiagnostics* diag = nullptr, int ink_threshold = kInkThreshold);

} // namespace sigkit
