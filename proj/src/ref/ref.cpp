#include "sigkit/ref.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sigkit::ref {

namespace {

inline std::uint8_t quantize(double v)
{
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

double pixel_or_background(const GrayImage& img, int x, int y)
{
    if (x < 0 || y < 0 || x >= img.width || y >= img.height)
        return 255.0;
    return img.at(x, y);
}

double alpha(int k, int n)
{
    return k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
}

} // namespace

GrayImage rotate(const GrayImage& img, double angle_deg)
{
    if (angle_deg == 0.0)
        return img;
    const double rad = angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(rad);
    const double s = std::sin(rad);
    const int w = img.width;
    const int h = img.height;
    const int out_w = std::max(1, static_cast<int>(std::ceil(std::abs(c) * w + std::abs(s) * h - 1e-9)));
    const int out_h = std::max(1, static_cast<int>(std::ceil(std::abs(s) * w + std::abs(c) * h - 1e-9)));
    const double cx = 0.5 * (w - 1);
    const double cy = 0.5 * (h - 1);
    const double ocx = 0.5 * (out_w - 1);
    const double ocy = 0.5 * (out_h - 1);

    GrayImage out(out_w, out_h, 255);
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            const double dx = x - ocx;
            const double dy = y - ocy;
            const double sx = c * dx + s * dy + cx;
            const double sy = -s * dx + c * dy + cy;
            const int x0 = static_cast<int>(std::floor(sx));
            const int y0 = static_cast<int>(std::floor(sy));
            if (x0 < -1 || y0 < -1 || x0 >= w || y0 >= h)
                continue;
            const double fx = sx - x0;
            const double fy = sy - y0;
            const double p00 = pixel_or_background(img, x0, y0);
            const double p10 = pixel_or_background(img, x0 + 1, y0);
            const double p01 = pixel_or_background(img, x0, y0 + 1);
            const double p11 = pixel_or_background(img, x0 + 1, y0 + 1);
            const double top = p00 + fx * (p10 - p00);
            const double bot = p01 + fx * (p11 - p01);
            out.at(x, y) = quantize(top + fy * (bot - top));
        }
    }
    return out;
}

GrayImage resize(const GrayImage& img, int new_width, int new_height)
{
    const double x_ratio = static_cast<double>(img.width) / new_width;
    const double y_ratio = static_cast<double>(img.height) / new_height;
    GrayImage out(new_width, new_height);
    for (int y = 0; y < new_height; ++y) {
        for (int x = 0; x < new_width; ++x) {
            const double sx = std::clamp((x + 0.5) * x_ratio - 0.5, 0.0, double(img.width - 1));
            const double sy = std::clamp((y + 0.5) * y_ratio - 0.5, 0.0, double(img.height - 1));
            const int x0 = static_cast<int>(sx);
            const int y0 = static_cast<int>(sy);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const int y1 = std::min(y0 + 1, img.height - 1);
            const double fx = sx - x0;
            const double fy = sy - y0;
            const double top = img.at(x0, y0) + fx * (img.at(x1, y0) - img.at(x0, y0));
            const double bot = img.at(x0, y1) + fx * (img.at(x1, y1) - img.at(x0, y1));
            out.at(x, y) = quantize(top + fy * (bot - top));
        }
    }
    return out;
}

double ncc_real(std::span<const double> p, std::span<const double> q)
{
    const std::size_t count = p.size();
    double p0 = 0.0, q0 = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        p0 += p[i];
        q0 += q[i];
    }
    p0 /= double(count);
    q0 /= double(count);

    double num = 0.0, dp = 0.0, dq = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        num += (p[i] - p0) * (q[i] - q0);
        dp += (p[i] - p0) * (p[i] - p0);
        dq += (q[i] - q0) * (q[i] - q0);
    }
    return num / std::sqrt(dp * dq);
}

double ncc(const GrayImage& p, const GrayImage& q)
{
    std::vector<double> pv(p.pixels.begin(), p.pixels.end());
    std::vector<double> qv(q.pixels.begin(), q.pixels.end());
    return ncc_real(pv, qv);
}

DctCoeffs dct2_direct(const RealImage& img)
{
    const int w = img.width;
    const int h = img.height;
    DctCoeffs out{w, h, std::vector<double>(static_cast<std::size_t>(w) * h)};
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            double acc = 0.0;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    acc += img.at(x, y) *
                           std::cos(std::numbers::pi * u * (2.0 * x + 1.0) / (2.0 * w)) *
                           std::cos(std::numbers::pi * v * (2.0 * y + 1.0) / (2.0 * h));
            out.at(u, v) = alpha(u, w) * alpha(v, h) * acc;
        }
    }
    return out;
}

RealImage idct2_direct(const DctCoeffs& coeffs)
{
    const int w = coeffs.width;
    const int h = coeffs.height;
    RealImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int v = 0; v < h; ++v)
                for (int u = 0; u < w; ++u)
                    acc += alpha(u, w) * alpha(v, h) * coeffs.at(u, v) *
                           std::cos(std::numbers::pi * u * (2.0 * x + 1.0) / (2.0 * w)) *
                           std::cos(std::numbers::pi * v * (2.0 * y + 1.0) / (2.0 * h));
            out.at(x, y) = acc;
        }
    }
    return out;
}

std::vector<double> rbfn_forward(const RbfnModel& model, std::span<const double> x)
{
    std::vector<double> scores(model.classes(), 0.0);
    for (int l = 0; l < model.classes(); ++l) {
        for (int i = 0; i < model.units(); ++i) {
            double d2 = 0.0;
            for (int d = 0; d < model.dim; ++d) {
                const double diff = x[d] - model.centers[static_cast<std::size_t>(i) * model.dim + d];
                d2 += diff * diff;
            }
            const double g = std::exp(-d2 / (2.0 * model.widths[i] * model.widths[i]));
            scores[l] += model.weights[static_cast<std::size_t>(i) * model.classes() + l] * g;
        }
    }
    return scores;
}

double rbfn_cost(const RbfnModel& model, std::span<const LabeledFeature> samples)
{
    double cost = 0.0;
    for (const auto& sample : samples) {
        const std::vector<double> scores = rbfn_forward(model, sample.features);
        for (int l = 0; l < model.classes(); ++l) {
            const double target = model.class_labels[l] == sample.label ? 1.0 : 0.0;
            const double e = target - scores[l];
            cost += 0.5 * e * e;
        }
    }
    return cost;
}

double rbfn_mse(const RbfnModel& model, std::span<const LabeledFeature> samples)
{
    return 2.0 * rbfn_cost(model, samples) / double(samples.size());
}

std::vector<double> rbfn_responses(const RbfnModel& model, std::span<const LabeledFeature> samples)
{
    const int N = static_cast<int>(samples.size());
    const int M = model.units();
    std::vector<double> G(static_cast<std::size_t>(N) * M);
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < M; ++i) {
            double d2 = 0.0;
            for (int d = 0; d < model.dim; ++d) {
                const double diff =
                    samples[j].features[d] - model.centers[static_cast<std::size_t>(i) * model.dim + d];
                d2 += diff * diff;
            }
            G[static_cast<std::size_t>(j) * M + i] =
                std::exp(-d2 / (2.0 * model.widths[i] * model.widths[i]));
        }
    }
    return G;
}

} // namespace sigkit::ref
