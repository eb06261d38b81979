#include "sigkit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "sigkit/format.hpp"
#include "sigkit/rng.hpp"
#include "sigkit/rst.hpp"

namespace sigkit {

namespace fs = std::filesystem;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

void EvalReport::write_csv(const fs::path& path) const
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        raise(Errc::IoFailure, "cannot open " + path.string() + " for writing");

    out << "# config: " << config_echo << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << (c ? "," : "") << columns[c];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << g17(row[c]);
        out << "\n";
    }
    for (const auto& [name, value] : aggregates)
        out << "# aggregate: " << name << "=" << g17(value) << "\n";
    if (!out)
        raise(Errc::IoFailure, "short write to " + path.string());
}

EvalReport rst_error_table(const RstErrorOptions& opts)
{
    if (opts.samples < 1)
        raise(Errc::InvalidArgument, "need at least one sample");

    // Draw every sample's recipe up front so the worker loop is free of
    // shared state and the row order is independent of scheduling.
    struct Recipe {
        std::uint64_t subject_seed;
        int strokes;
        int rotation;
        double scale;
        int tx, ty;
    };
    Rng rng(opts.seed);
    std::vector<Recipe> recipes(opts.samples);
    for (auto& r : recipes) {
        r.subject_seed = rng.next_u64();
        r.strokes = 3 + rng.uniform_int(0, 2);
        r.rotation = rng.uniform_int(-opts.max_abs_rotation_deg, opts.max_abs_rotation_deg);
        r.scale = rng.uniform(opts.scale_min, opts.scale_max);
        r.tx = rng.uniform_int(0, opts.max_translation);
        r.ty = rng.uniform_int(0, opts.max_translation);
    }

    std::vector<std::vector<double>> rows(opts.samples);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < opts.samples; ++i) {
        const Recipe& r = recipes[i];
        try {
            SyntheticSpec spec;
            spec.subject_seed = r.subject_seed;
            spec.canvas_width = opts.canvas_width;
            spec.canvas_height = opts.canvas_height;
            spec.stroke_count = r.strokes;
            const GrayImage reference = generate_signature(spec);
            const GrayImage probe = distort(reference, r.rotation, r.scale, r.tx, r.ty,
                                            opts.noise_sigma, mix_seed(opts.seed, i));
            const Alignment result = correct_rst(reference, probe);
            const double detected_scale = 1.0 / result.params.scale_ratio;
            rows[i] = {double(r.rotation),
                       r.scale,
                       result.params.rotation_deg,
                       detected_scale,
                       std::abs(r.rotation - result.params.rotation_deg),
                       std::abs(r.scale - detected_scale)};
        } catch (const Error&) {
            rows[i] = {double(r.rotation), r.scale, kNan, kNan, kNan, kNan};
        }
    }

    EvalReport report;
    report.kind = "rst_table";
    {
        std::ostringstream cfg;
        cfg << "kind=rst_table samples=" << opts.samples << " seed=" << opts.seed
            << " max_abs_rotation_deg=" << opts.max_abs_rotation_deg
            << " scale_min=" << g17(opts.scale_min) << " scale_max=" << g17(opts.scale_max)
            << " max_translation=" << opts.max_translation
            << " noise_sigma=" << g17(opts.noise_sigma) << " canvas=" << opts.canvas_width << "x"
            << opts.canvas_height;
        report.config_echo = cfg.str();
    }
    report.columns = {"original_rotation", "original_scale",     "detected_rotation",
                      "detected_scale",    "abs_rotation_error", "abs_scale_error"};
    report.rows = std::move(rows);

    std::vector<double> rot_errors, scale_errors;
    int failures = 0;
    for (const auto& row : report.rows) {
        if (std::isnan(row[4])) {
            ++failures;
            continue;
        }
        rot_errors.push_back(row[4]);
        scale_errors.push_back(row[5]);
    }
    if (!rot_errors.empty()) {
        report.aggregates.emplace_back("median_abs_rotation_error", median(rot_errors));
        report.aggregates.emplace_back("max_abs_rotation_error",
                                       *std::max_element(rot_errors.begin(), rot_errors.end()));
        report.aggregates.emplace_back("median_abs_scale_error", median(scale_errors));
        report.aggregates.emplace_back("max_abs_scale_error",
                                       *std::max_element(scale_errors.begin(), scale_errors.end()));
    }
    report.aggregates.emplace_back("error_count", failures);
    return report;
}

EvalReport convergence_sweep(std::span<const LabeledFeature> dataset, const ConvergenceOptions& opts)
{
    if (opts.budgets.empty() || !std::is_sorted(opts.budgets.begin(), opts.budgets.end()))
        raise(Errc::InvalidArgument, "iteration budgets must be ascending");

    // One shared initialization: exact-interpolation architecture with small
    // seeded output weights, re-trained from scratch for every budget.
    auto initial_model = [&]() {
        RbfnModel model;
        model.dim = static_cast<int>(dataset[0].features.size());
        model.spread = opts.spread;
        for (const auto& s : dataset)
            if (std::find(model.class_labels.begin(), model.class_labels.end(), s.label) ==
                model.class_labels.end())
                model.class_labels.push_back(s.label);
        for (const auto& s : dataset) {
            model.centers.insert(model.centers.end(), s.features.begin(), s.features.end());
            model.widths.push_back(opts.spread);
        }
        Rng rng(opts.seed);
        model.weights.resize(static_cast<std::size_t>(model.units()) * model.classes());
        for (auto& w : model.weights)
            w = rng.normal(0.0, 0.01);
        return model;
    };

    EvalReport report;
    report.kind = "convergence";
    {
        std::ostringstream cfg;
        cfg << "kind=convergence spread=" << g17(opts.spread) << " seed=" << opts.seed
            << " rates=" << g17(opts.rates.weights) << "," << g17(opts.rates.centers) << ","
            << g17(opts.rates.widths) << " samples=" << dataset.size() << " budgets=";
        for (std::size_t i = 0; i < opts.budgets.size(); ++i)
            cfg << (i ? "," : "") << opts.budgets[i];
        report.config_echo = cfg.str();
    }
    report.columns = {"mse", "spread", "iterations"};
    for (int budget : opts.budgets) {
        RbfnModel model = initial_model();
        double final_mse = kNan;
        try {
            final_mse = train_gradient(model, dataset, opts.rates, budget).mse;
        } catch (const Error& e) {
            if (e.code() != Errc::NonFiniteCost)
                throw;
        }
        report.rows.push_back({final_mse, opts.spread, double(budget)});
    }
    return report;
}

namespace {

struct ProbeFile {
    std::string subject;
    int sample = 0;
    fs::path path;
};

// Test samples (index > 0) under db/subjects, in deterministic sorted order.
std::vector<ProbeFile> list_test_probes(const fs::path& db_dir)
{
    const fs::path subjects = db_dir / "subjects";
    if (!fs::exists(subjects))
        raise(Errc::FileNotFound, subjects.string());

    std::vector<ProbeFile> probes;
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(subjects))
        if (entry.is_directory())
            dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    for (const auto& dir : dirs) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".pgm")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            const int idx = std::atoi(f.stem().string().c_str());
            if (idx > 0)
                probes.push_back(ProbeFile{dir.filename().string(), idx, f});
        }
    }
    return probes;
}

} // namespace

std::vector<ProbeOutcome> classify_probes(const fs::path& db_dir, const Gallery& gallery,
                                          const RbfnModel& model, int count, std::uint64_t seed,
                                          double reject_threshold, FeatureMode mode)
{
    std::vector<ProbeFile> probes = list_test_probes(db_dir);
    if (count < 1)
        raise(Errc::InvalidArgument, "probe count must be >= 1");
    if (count > static_cast<int>(probes.size()))
        raise(Errc::InvalidArgument, "requested more probes than available test samples");

    // seeded Fisher-Yates, then take the first `count`
    Rng rng(seed);
    for (int i = static_cast<int>(probes.size()) - 1; i > 0; --i)
        std::swap(probes[i], probes[rng.uniform_int(0, i)]);
    probes.resize(count);

    // each probe aligns against its own subject's enrolled reference
    auto reference_path = [&](const std::string& subject) -> fs::path {
        for (const auto& entry : gallery.entries)
            if (entry.subject_id == subject)
                return entry.source_path;
        raise(Errc::InvalidArgument, "subject not enrolled: " + subject);
    };

    std::vector<ProbeOutcome> outcomes(probes.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(probes.size()); ++i) {
        ProbeOutcome& out = outcomes[i];
        out.subject = probes[i].subject;
        out.sample = probes[i].sample;
        try {
            const GrayImage reference = load_image(reference_path(probes[i].subject));
            const GrayImage probe = load_image(probes[i].path);
            const Alignment aligned = correct_rst(reference, probe);
            const FeatureVector features = extract_features(aligned.aligned, mode);
            const auto label = classify(model, features.values, reject_threshold);
            if (label) {
                out.predicted = *label;
                out.correct = (*label == out.subject);
            }
        } catch (const std::exception&) {
            // unreadable or degenerate probe counts as incorrect
        }
    }
    return outcomes;
}

EvalReport recognition_sweep(const fs::path& db_dir, const Gallery& gallery,
                             const RbfnModel& model, const RecognitionOptions& opts)
{
    EvalReport report;
    report.kind = "recognition";
    {
        std::ostringstream cfg;
        cfg << "kind=recognition db=" << db_dir.string() << " seed=" << opts.seed
            << " reject_threshold=" << g17(opts.reject_threshold) << " counts=";
        for (std::size_t i = 0; i < opts.counts.size(); ++i)
            cfg << (i ? "," : "") << opts.counts[i];
        report.config_echo = cfg.str();
    }
    report.columns = {"number_of_samples", "recognition_rate_percent"};
    for (int count : opts.counts) {
        const auto outcomes =
            classify_probes(db_dir, gallery, model, count, opts.seed, opts.reject_threshold, opts.mode);
        int correct = 0;
        for (const auto& o : outcomes)
            correct += o.correct ? 1 : 0;
        report.rows.push_back({double(count), 100.0 * correct / count});
    }
    return report;
}

} // namespace sigkit
