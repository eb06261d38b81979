#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sigkit/features.hpp"
#include "sigkit/image.hpp"

namespace sigkit {

/// Ground-truth geometric distortion applied to a synthetic sample.
struct Distortion {
    double rotation_deg = 0.0; // [-60, 60]
    double scale = 1.0;        // [0.25, 1.8]
    int translate_x = 0;       // left margin of the placed ink, >= 0
    int translate_y = 0;       // bottom margin of the placed ink, >= 0
    double noise_sigma = 0.0;  // Gaussian pixel noise
};

/// Recipe for one synthetic signature render.
struct SyntheticSpec {
    std::uint64_t subject_seed = 0;
    int canvas_width = 256;
    int canvas_height = 128;
    int stroke_count = 3; // 2..6
    int sample_index = 0; // > 0 adds per-sample control-point jitter
    std::optional<Distortion> distortion;
};

/// Renders smooth dark strokes (cubic segments through seeded random control
/// points) on a white canvas. Byte-deterministic for a given spec. The same
/// subject seed with different sample indices gives small per-sample shape
/// jitter, mimicking how one person's signatures vary.
GrayImage generate_signature(const SyntheticSpec& spec);

/// Applies scale, then rotation, then placement with the requested left and
/// bottom margins on a white canvas sized to fit, then seeded Gaussian noise
/// clamped to [0, 255]. Throws InkClipped when the margins are negative.
GrayImage distort(const GrayImage& img, double rotation_deg, double scale, int translate_x,
                  int translate_y, double noise_sigma, std::uint64_t seed);

struct GalleryEntry {
    std::string subject_id;
    FeatureVector features;
    std::string source_path;
};

/// Enrolled reference features, one training sample per subject.
struct Gallery {
    std::vector<GalleryEntry> entries;
    std::string manifest_path;
};

/// Walks subjects/<id>/<nn>.pgm, enrolls each subject's lowest-numbered
/// sample, and writes the manifest CSV (subject_id, sample_path, 64 feature
/// columns). Unreadable files are reported on stderr and skipped; an empty
/// directory raises EmptyDirectory.
Gallery build_gallery(const std::filesystem::path& image_dir,
                      const std::filesystem::path& out_manifest,
                      FeatureMode mode = FeatureMode::Dct8x8);

Gallery load_gallery(const std::filesystem::path& manifest);

} // namespace sigkit
