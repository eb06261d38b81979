#include "sigkit/rst.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace sigkit {

namespace {

// Ink-tight crop resized onto the square comparison frame.
GrayImage comparison_frame(const GrayImage& img, int ink_threshold)
{
    return resize(crop(img, ink_bbox(img, ink_threshold)), kComparisonSize, kComparisonSize);
}

// Score one candidate tilt: derotate the probe by it and correlate with the
// reference frame. Higher is better.
double rotation_score(const GrayImage& ref_frame, const GrayImage& probe, double candidate_deg,
                      int ink_threshold)
{
    const GrayImage derotated = rotate(probe, -candidate_deg);
    return ncc(ref_frame, comparison_frame(derotated, ink_threshold));
}

// argmax with ties resolved toward the smaller absolute angle.
std::size_t best_candidate(const std::vector<double>& angles, const std::vector<double>& scores)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best] ||
            (scores[i] == scores[best] && std::abs(angles[i]) < std::abs(angles[best])))
            best = i;
    }
    return best;
}

// Evaluates all candidates; failed candidates (degenerate crops) score below
// any real correlation. Rethrows only if every candidate failed.
std::vector<double> sweep(const GrayImage& ref_frame, const GrayImage& probe,
                          const std::vector<double>& angles, int ink_threshold)
{
    std::vector<double> scores(angles.size(), -2.0);
    std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(angles.size()); ++i) {
        try {
            scores[i] = rotation_score(ref_frame, probe, angles[i], ink_threshold);
        } catch (...) {
#pragma omp critical(sigkit_sweep_error)
            {
                if (!first_error)
                    first_error = std::current_exception();
            }
        }
    }
    const bool any_ok = std::any_of(scores.begin(), scores.end(),
                                    [](double s) { return s > -2.0; });
    if (!any_ok && first_error)
        std::rethrow_exception(first_error);
    return scores;
}

} // namespace

double ncc_real(std::span<const double> p, std::span<const double> q)
{
    if (p.size() != q.size() || p.empty())
        raise(Errc::DimensionMismatch, "correlation needs equally sized inputs");

    double p_mean = 0.0, q_mean = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p_mean += p[i];
        q_mean += q[i];
    }
    p_mean /= static_cast<double>(p.size());
    q_mean /= static_cast<double>(q.size());

    double num = 0.0, p_var = 0.0, q_var = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double a = p[i] - p_mean;
        const double b = q[i] - q_mean;
        num += a * b;
        p_var += a * a;
        q_var += b * b;
    }
    if (p_var == 0.0 || q_var == 0.0)
        raise(Errc::ConstantImage, "constant intensity has no correlation");
    return num / std::sqrt(p_var * q_var);
}

double ncc(const GrayImage& p, const GrayImage& q)
{
    if (p.width != q.width || p.height != q.height)
        raise(Errc::DimensionMismatch, "correlation needs equally sized images");
    std::vector<double> pv(p.pixels.begin(), p.pixels.end());
    std::vector<double> qv(q.pixels.begin(), q.pixels.end());
    return ncc_real(pv, qv);
}

std::vector<double> minmax_normalize(std::span<const double> xs)
{
    if (xs.size() < 2)
        raise(Errc::DegenerateRange, "need at least two values");
    const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo))
        raise(Errc::DegenerateRange, "all values equal");
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        out[i] = (xs[i] - lo) / (hi - lo);
    return out;
}

std::pair<double, CorrelationProfile> estimate_rotation(const GrayImage& reference,
                                                        const GrayImage& probe, int ink_threshold)
{
    ink_bbox(probe, ink_threshold); // both images must contain ink
    const GrayImage ref_frame = comparison_frame(reference, ink_threshold);

    std::vector<double> coarse_angles;
    for (int a = -kAngleRangeDeg; a <= kAngleRangeDeg; a += kCoarseStepDeg)
        coarse_angles.push_back(a);
    const std::vector<double> coarse_scores = sweep(ref_frame, probe, coarse_angles, ink_threshold);
    const double coarse_peak = coarse_angles[best_candidate(coarse_angles, coarse_scores)];

    std::vector<double> fine_angles;
    for (int d = -kFineRadiusDeg; d <= kFineRadiusDeg; ++d)
        fine_angles.push_back(coarse_peak + d);
    const std::vector<double> fine_scores = sweep(ref_frame, probe, fine_angles, ink_threshold);
    double angle = fine_angles[best_candidate(fine_angles, fine_scores)];
    angle = std::clamp(angle, -double(kAngleRangeDeg), double(kAngleRangeDeg));

    CorrelationProfile profile{coarse_angles, minmax_normalize(coarse_scores)};
    return {angle, std::move(profile)};
}

Translation remove_translation(const GrayImage& img, int ink_threshold)
{
    const InkBox box = ink_bbox(img, ink_threshold);
    return Translation{crop(img, box), box.left, img.height - 1 - box.bottom};
}

double estimate_scale(const GrayImage& reference_cropped, const GrayImage& probe_cropped)
{
    return static_cast<double>(reference_cropped.height) / probe_cropped.height;
}

Alignment correct_rst(const GrayImage& reference, const GrayImage& probe, RstDiagnostics* diag,
                      int ink_threshold)
{
    auto [angle, profile] = estimate_rotation(reference, probe, ink_threshold);
    const GrayImage derotated = rotate(probe, -angle);

    Translation ref_t = remove_translation(reference, ink_threshold);
    Translation probe_t = remove_translation(derotated, ink_threshold);

    const double ratio = estimate_scale(ref_t.cropped, probe_t.cropped);
    if (diag) {
        diag->width_ratio = static_cast<double>(ref_t.cropped.width) / probe_t.cropped.width;
        diag->reference_crop_width = ref_t.cropped.width;
        diag->reference_crop_height = ref_t.cropped.height;
    }

    GrayImage aligned = resize(probe_t.cropped, ref_t.cropped.width, ref_t.cropped.height);
    return Alignment{std::move(aligned),
                     RstParams{angle, probe_t.tx, probe_t.ty, ratio},
                     std::move(profile)};
}

} // namespace sigkit
