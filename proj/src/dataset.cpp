#include "sigkit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sigkit/format.hpp"
#include "sigkit/rng.hpp"
#include "sigkit/rst.hpp"

namespace sigkit {

namespace fs = std::filesystem;

namespace {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Darkens a soft disk at (px, py); overlapping stamps keep the darkest value.
void stamp(GrayImage& img, double px, double py, double radius)
{
    const int x_lo = std::max(0, static_cast<int>(std::floor(px - radius - 1)));
    const int x_hi = std::min(img.width - 1, static_cast<int>(std::ceil(px + radius + 1)));
    const int y_lo = std::max(0, static_cast<int>(std::floor(py - radius - 1)));
    const int y_hi = std::min(img.height - 1, static_cast<int>(std::ceil(py + radius + 1)));
    for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
            const double d = std::hypot(x - px, y - py);
            const double cover = std::clamp(radius + 0.5 - d, 0.0, 1.0);
            if (cover <= 0.0)
                continue;
            const auto v = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - cover)));
            if (v < img.at(x, y))
                img.at(x, y) = v;
        }
    }
}

// Catmull-Rom segment between p1 and p2 with neighbor tangents.
Point spline_point(const Point& p0, const Point& p1, const Point& p2, const Point& p3, double t)
{
    const double t2 = t * t;
    const double t3 = t2 * t;
    auto axis = [&](double a0, double a1, double a2, double a3) {
        return 0.5 * ((2.0 * a1) + (-a0 + a2) * t + (2.0 * a0 - 5.0 * a1 + 4.0 * a2 - a3) * t2 +
                      (-a0 + 3.0 * a1 - 3.0 * a2 + a3) * t3);
    };
    return Point{axis(p0.x, p1.x, p2.x, p3.x), axis(p0.y, p1.y, p2.y, p3.y)};
}

void draw_stroke(GrayImage& img, const std::vector<Point>& pts, double radius)
{
    for (std::size_t seg = 0; seg + 1 < pts.size(); ++seg) {
        const Point& p0 = pts[seg == 0 ? 0 : seg - 1];
        const Point& p1 = pts[seg];
        const Point& p2 = pts[seg + 1];
        const Point& p3 = pts[std::min(seg + 2, pts.size() - 1)];
        const double span = std::hypot(p2.x - p1.x, p2.y - p1.y);
        const int steps = std::max(8, static_cast<int>(std::ceil(span * 2.0)));
        for (int s = 0; s <= steps; ++s) {
            const Point p = spline_point(p0, p1, p2, p3, double(s) / steps);
            stamp(img, p.x, p.y, radius);
        }
    }
}

} // namespace

GrayImage generate_signature(const SyntheticSpec& spec)
{
    if (spec.stroke_count < 2 || spec.stroke_count > 6)
        raise(Errc::InvalidArgument, "stroke_count must be in [2, 6]");
    if (spec.canvas_width < 32 || spec.canvas_height < 32)
        raise(Errc::InvalidArgument, "canvas too small");

    const double w = spec.canvas_width;
    const double h = spec.canvas_height;
    Rng subject_rng(spec.subject_seed);

    struct Stroke {
        std::vector<Point> pts;
        double radius;
    };
    std::vector<Stroke> strokes;
    for (int s = 0; s < spec.stroke_count; ++s) {
        Stroke stroke;
        const int n = 4 + subject_rng.uniform_int(0, 3);
        for (int i = 0; i < n; ++i) {
            // progress left to right with jittered spacing, free vertical placement
            const double fx = (i + subject_rng.uniform(-0.35, 0.35)) / (n - 1);
            stroke.pts.push_back(Point{w * (0.12 + 0.76 * std::clamp(fx, 0.0, 1.0)),
                                       h * subject_rng.uniform(0.18, 0.82)});
        }
        stroke.radius = subject_rng.uniform(1.5, 2.4);
        strokes.push_back(std::move(stroke));
    }

    if (spec.sample_index > 0) {
        Rng jitter(mix_seed(spec.subject_seed, static_cast<std::uint64_t>(spec.sample_index)));
        for (auto& stroke : strokes)
            for (auto& p : stroke.pts) {
                p.x = std::clamp(p.x + jitter.uniform(-2.5, 2.5), 2.0, w - 3.0);
                p.y = std::clamp(p.y + jitter.uniform(-2.5, 2.5), 2.0, h - 3.0);
            }
    }

    GrayImage img(spec.canvas_width, spec.canvas_height, 255);
    for (const auto& stroke : strokes)
        draw_stroke(img, stroke.pts, stroke.radius);
    return img;
}

GrayImage distort(const GrayImage& img, double rotation_deg, double scale, int translate_x,
                  int translate_y, double noise_sigma, std::uint64_t seed)
{
    if (std::abs(rotation_deg) > 60.0)
        raise(Errc::InvalidArgument, "rotation outside [-60, 60]");
    if (!(scale >= 0.25 && scale <= 1.8))
        raise(Errc::InvalidArgument, "scale outside [0.25, 1.8]");
    if (noise_sigma < 0.0)
        raise(Errc::InvalidArgument, "noise sigma must be >= 0");
    if (translate_x < 0 || translate_y < 0)
        raise(Errc::InkClipped, "translation places ink outside the canvas");

    const GrayImage ink = crop(img, ink_bbox(img));
    const int sw = std::max(1, static_cast<int>(std::lround(ink.width * scale)));
    const int sh = std::max(1, static_cast<int>(std::lround(ink.height * scale)));
    const GrayImage rotated = rotate(resize(ink, sw, sh), rotation_deg);
    const GrayImage core = crop(rotated, ink_bbox(rotated));

    constexpr int pad = 8; // far-side breathing room
    GrayImage out(core.width + translate_x + pad, core.height + translate_y + pad, 255);
    const int y0 = out.height - core.height - translate_y;
    for (int y = 0; y < core.height; ++y)
        for (int x = 0; x < core.width; ++x)
            out.at(translate_x + x, y0 + y) = core.at(x, y);

    if (noise_sigma > 0.0) {
        Rng rng(seed);
        for (auto& p : out.pixels)
            p = static_cast<std::uint8_t>(
                std::clamp(std::lround(p + rng.normal(0.0, noise_sigma)), 0L, 255L));
    }
    return out;
}

Gallery build_gallery(const fs::path& image_dir, const fs::path& out_manifest, FeatureMode mode)
{
    if (!fs::exists(image_dir))
        raise(Errc::FileNotFound, image_dir.string());
    if (!fs::is_directory(image_dir))
        raise(Errc::InvalidArgument, image_dir.string() + " is not a directory");

    std::vector<fs::path> subject_dirs;
    for (const auto& entry : fs::directory_iterator(image_dir))
        if (entry.is_directory())
            subject_dirs.push_back(entry.path());
    std::sort(subject_dirs.begin(), subject_dirs.end());

    Gallery gallery;
    gallery.manifest_path = out_manifest.string();
    for (const auto& dir : subject_dirs) {
        std::vector<fs::path> images;
        for (const auto& entry : fs::directory_iterator(dir)) {
            const auto ext = entry.path().extension();
            if (entry.is_regular_file() && (ext == ".pgm" || ext == ".png"))
                images.push_back(entry.path());
        }
        if (images.empty())
            continue;
        std::sort(images.begin(), images.end());
        const fs::path& training = images.front(); // lowest-numbered sample enrolls

        try {
            const GrayImage img = load_image(training);
            const GrayImage tight = crop(img, ink_bbox(img));
            FeatureVector features = extract_features(tight, mode);
            features.source_id = training.string();
            gallery.entries.push_back(
                GalleryEntry{dir.filename().string(), std::move(features), training.string()});
        } catch (const Error& e) {
            std::cerr << "gallery: skipping " << training.string() << " (" << e.what() << ")\n";
        }
    }
    if (gallery.entries.empty())
        raise(Errc::EmptyDirectory, "no usable training images under " + image_dir.string());

    // write-then-rename keeps a crashed run from leaving a torn manifest
    const fs::path tmp = out_manifest.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            raise(Errc::IoFailure, "cannot open " + tmp.string() + " for writing");
        out << "subject_id,sample_path";
        for (int i = 0; i < kFeatureDim; ++i)
            out << ",f" << (i < 10 ? "0" : "") << i;
        out << "\n";
        for (const auto& entry : gallery.entries) {
            out << entry.subject_id << ',' << entry.source_path;
            for (double v : entry.features.values)
                out << ',' << g17(v);
            out << "\n";
        }
        if (!out)
            raise(Errc::IoFailure, "short write to " + tmp.string());
    }
    fs::rename(tmp, out_manifest);
    return gallery;
}

Gallery load_gallery(const fs::path& manifest)
{
    if (!fs::exists(manifest))
        raise(Errc::FileNotFound, manifest.string());
    std::ifstream in(manifest, std::ios::binary);
    if (!in)
        raise(Errc::IoFailure, "cannot open " + manifest.string());

    Gallery gallery;
    gallery.manifest_path = manifest.string();
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string cell;
        GalleryEntry entry;
        if (!std::getline(ss, entry.subject_id, ',') || !std::getline(ss, entry.source_path, ','))
            raise(Errc::InvalidArgument, "malformed gallery manifest row");
        while (std::getline(ss, cell, ','))
            entry.features.values.push_back(std::stod(cell));
        if (static_cast<int>(entry.features.values.size()) != kFeatureDim)
            raise(Errc::InvalidArgument, "gallery row does not have 64 features");
        entry.features.source_id = entry.source_path;
        gallery.entries.push_back(std::move(entry));
    }
    if (gallery.entries.empty())
        raise(Errc::EmptyDirectory, "gallery manifest has no entries");
    return gallery;
}

} // namespace sigkit
