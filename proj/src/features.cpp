#include "sigkit/features.hpp"

#include <cmath>
#include <numbers>

#include "sigkit/rst.hpp"

namespace sigkit {

namespace {

// cos(pi * (2x + 1) * k / (2n)) for k, x in [0, n), row-major in k.
std::vector<double> cosine_table(int n)
{
    std::vector<double> t(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k)
        for (int x = 0; x < n; ++x)
            t[static_cast<std::size_t>(k) * n + x] =
                std::cos(std::numbers::pi * (2.0 * x + 1.0) * k / (2.0 * n));
    return t;
}

double alpha(int k, int n)
{
    return k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
}

} // namespace

DctCoeffs dct2(const RealImage& img)
{
    const int w = img.width;
    const int h = img.height;
    const std::vector<double> cw = cosine_table(w);
    const std::vector<double> ch = cosine_table(h);

    // Row pass: transform along x for every row.
    RealImage mid(w, h);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int u = 0; u < w; ++u) {
            double acc = 0.0;
            for (int x = 0; x < w; ++x)
                acc += img.at(x, y) * cw[static_cast<std::size_t>(u) * w + x];
            mid.at(u, y) = alpha(u, w) * acc;
        }
    }

    // Column pass: transform along y for every column.
    DctCoeffs out{w, h, std::vector<double>(static_cast<std::size_t>(w) * h)};
#pragma omp parallel for schedule(static)
    for (int u = 0; u < w; ++u) {
        for (int v = 0; v < h; ++v) {
            double acc = 0.0;
            for (int y = 0; y < h; ++y)
                acc += mid.at(u, y) * ch[static_cast<std::size_t>(v) * h + y];
            out.at(u, v) = alpha(v, h) * acc;
        }
    }
    return out;
}

DctCoeffs dct2(const GrayImage& img)
{
    return dct2(to_real(img));
}

RealImage idct2(const DctCoeffs& coeffs)
{
    const int w = coeffs.width;
    const int h = coeffs.height;
    const std::vector<double> cw = cosine_table(w);
    const std::vector<double> ch = cosine_table(h);

    // Invert the column pass.
    RealImage mid(w, h);
#pragma omp parallel for schedule(static)
    for (int u = 0; u < w; ++u) {
        for (int y = 0; y < h; ++y) {
            double acc = 0.0;
            for (int v = 0; v < h; ++v)
                acc += alpha(v, h) * coeffs.at(u, v) * ch[static_cast<std::size_t>(v) * h + y];
            mid.at(u, y) = acc;
        }
    }

    // Invert the row pass.
    RealImage out(w, h);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int u = 0; u < w; ++u)
                acc += alpha(u, w) * mid.at(u, y) * cw[static_cast<std::size_t>(u) * w + x];
            out.at(x, y) = acc;
        }
    }
    return out;
}

std::vector<std::pair<int, int>> zigzag_order(int k)
{
    std::vector<std::pair<int, int>> order;
    order.reserve(static_cast<std::size_t>(k) * k);
    for (int s = 0; s <= 2 * (k - 1); ++s) {
        if (s % 2 == 0) {
            // up-right: start at the highest row on this diagonal
            for (int r = std::min(s, k - 1); r >= std::max(0, s - k + 1); --r)
                order.emplace_back(r, s - r);
        } else {
            // down-left
            for (int r = std::max(0, s - k + 1); r <= std::min(s, k - 1); ++r)
                order.emplace_back(r, s - r);
        }
    }
    return order;
}

std::vector<double> zigzag_block(const DctCoeffs& coeffs, int k)
{
    if (k < 1 || k > coeffs.width || k > coeffs.height)
        raise(Errc::BlockTooLarge, "coefficient grid smaller than requested block");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(k) * k);
    for (const auto& [row, col] : zigzag_order(k))
        out.push_back(coeffs.at(col, row));
    return out;
}

FeatureVector extract_features(const GrayImage& aligned, FeatureMode mode)
{
    ink_bbox(aligned); // NoInk guard

    std::vector<double> raw;
    if (mode == FeatureMode::Raw8x8) {
        const GrayImage block = resize(aligned, kFeatureBlock, kFeatureBlock);
        raw.assign(block.pixels.begin(), block.pixels.end());
    } else {
        const GrayImage frame = resize(aligned, kAnalysisSize, kAnalysisSize);
        raw = zigzag_block(dct2(frame), kFeatureBlock);
    }

    FeatureVector out;
    out.values = minmax_normalize(raw);
    return out;
}

} // namespace sigkit
