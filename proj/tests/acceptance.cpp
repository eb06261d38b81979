// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Each check pins its tolerance in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "sigkit/dataset.hpp"
#include "sigkit/eval.hpp"
#include "sigkit/features.hpp"
#include "sigkit/rbfn.hpp"
#include "sigkit/ref.hpp"
#include "sigkit/rng.hpp"
#include "sigkit/rst.hpp"

using namespace sigkit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double now_seconds()
{
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

GrayImage random_image(Rng& rng, int w, int h)
{
    GrayImage img(w, h);
    for (auto& p : img.pixels)
        p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    return img;
}

std::string read_bytes(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// --- criterion 1: correlation vs direct double-sum oracle ----------------

Outcome check_ncc_oracle()
{
    Rng rng(1001);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int w = rng.uniform_int(2, 8);
        const int h = rng.uniform_int(2, 8);
        GrayImage p = random_image(rng, w, h);
        GrayImage q = random_image(rng, w, h);
        p.pixels[0] = 0;
        p.pixels[1] = 255; // guard against constant draws
        q.pixels[0] = 255;
        q.pixels[1] = 0;
        worst = std::max(worst, std::abs(ncc(p, q) - ref::ncc(p, q)));
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "max |ncc - direct| = %.3g over 200 pairs", worst);
    return {worst <= 1e-12, detail};
}

// --- criterion 2: transform correctness ----------------------------------

Outcome check_dct()
{
    Rng rng(1002);
    double worst_direct = 0.0, worst_round = 0.0, worst_parseval = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int w = 1 + trial % 8;
        const int h = 1 + (trial / 8) % 8;
        RealImage img(w, h);
        for (auto& v : img.values)
            v = rng.uniform(-128.0, 128.0);

        const DctCoeffs fast = dct2(img);
        const DctCoeffs direct = ref::dct2_direct(img);
        for (std::size_t i = 0; i < fast.values.size(); ++i)
            worst_direct = std::max(worst_direct, std::abs(fast.values[i] - direct.values[i]));

        const RealImage back = idct2(fast);
        for (std::size_t i = 0; i < back.values.size(); ++i)
            worst_round = std::max(worst_round, std::abs(back.values[i] - img.values[i]));

        double spatial = 0.0, spectral = 0.0;
        for (double v : img.values)
            spatial += v * v;
        for (double v : fast.values)
            spectral += v * v;
        worst_parseval = std::max(worst_parseval, std::abs(spatial - spectral) / spatial);
    }
    char detail[128];
    std::snprintf(detail, sizeof detail,
                  "direct %.3g, round-trip %.3g, energy rel %.3g over 100 trials", worst_direct,
                  worst_round, worst_parseval);
    return {worst_direct <= 1e-9 && worst_round <= 1e-9 && worst_parseval <= 1e-9, detail};
}

// --- criterion 3: detection recovery on distorted synthetic probes -------

Outcome check_rst_recovery()
{
    RstErrorOptions opts;
    opts.samples = 50;
    opts.seed = 1003;
    opts.max_abs_rotation_deg = 55;
    opts.scale_min = 0.3;
    opts.scale_max = 1.8;
    const EvalReport report = rst_error_table(opts);

    double median_rot = -1.0, max_rot = -1.0, max_scale = -1.0, failures = 0.0;
    for (const auto& [name, value] : report.aggregates) {
        if (name == "median_abs_rotation_error")
            median_rot = value;
        else if (name == "max_abs_rotation_error")
            max_rot = value;
        else if (name == "max_abs_scale_error")
            max_scale = value;
        else if (name == "error_count")
            failures = value;
    }
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "50 probes: rotation err median %.2f max %.2f deg, scale err max %.3f, failures %g",
                  median_rot, max_rot, max_scale, failures);
    return {failures == 0.0 && median_rot >= 0.0 && median_rot <= 2.0 && max_rot <= 3.0 &&
                max_scale <= 0.1,
            detail};
}

// --- criterion 4: exact interpolation -------------------------------------

Outcome check_interpolation()
{
    Rng rng(1004);
    std::vector<LabeledFeature> samples(50);
    for (int j = 0; j < 50; ++j) {
        samples[j].features.resize(kFeatureDim);
        for (auto& v : samples[j].features)
            v = rng.uniform(0.0, 1.0);
        samples[j].label = "s" + std::to_string(j % 10);
    }
    const RbfnModel model = fit_exact(samples, 0.5);
    const double training_mse = mse(model, samples);
    int correct = 0;
    for (const auto& s : samples)
        if (classify(model, s.features, 0.5) == s.label)
            ++correct;
    char detail[96];
    std::snprintf(detail, sizeof detail, "training mse %.3g, %d/50 classified", training_mse,
                  correct);
    return {training_mse <= 1e-10 && correct == 50, detail};
}

// --- criterion 5: gradient fidelity ---------------------------------------

Outcome check_gradients()
{
    Rng rng(1005);
    double worst = 0.0;
    for (int instance = 0; instance < 20; ++instance) {
        const int dim = rng.uniform_int(2, 6);
        const int units = rng.uniform_int(2, 4);
        const int classes = rng.uniform_int(2, 3);
        const int n = rng.uniform_int(3, 6);

        RbfnModel model;
        model.dim = dim;
        for (int l = 0; l < classes; ++l)
            model.class_labels.push_back("c" + std::to_string(l));
        for (int i = 0; i < units; ++i) {
            for (int d = 0; d < dim; ++d)
                model.centers.push_back(rng.uniform(0.0, 1.0));
            model.widths.push_back(rng.uniform(0.3, 1.5));
            for (int l = 0; l < classes; ++l)
                model.weights.push_back(rng.uniform(-1.0, 1.0));
        }
        std::vector<LabeledFeature> samples(n);
        for (auto& s : samples) {
            s.features.resize(dim);
            for (auto& v : s.features)
                v = rng.uniform(0.0, 1.0);
            s.label = "c" + std::to_string(rng.uniform_int(0, classes - 1));
        }

        const CostGradient grad = cost_gradient(model, samples);
        const double h = 1e-5;
        auto fd_check = [&](auto&& slot, double analytic) {
            RbfnModel probe = model;
            double& v = slot(probe);
            const double saved = v;
            v = saved + h;
            const double up = ref::rbfn_cost(probe, samples);
            v = saved - h;
            const double down = ref::rbfn_cost(probe, samples);
            v = saved;
            const double fd = (up - down) / (2.0 * h);
            const double rel =
                std::abs(analytic - fd) / std::max({1e-3, std::abs(analytic), std::abs(fd)});
            worst = std::max(worst, rel);
        };
        for (std::size_t k = 0; k < grad.weights.size(); ++k)
            fd_check([&](RbfnModel& m) -> double& { return m.weights[k]; }, grad.weights[k]);
        for (std::size_t k = 0; k < grad.centers.size(); ++k)
            fd_check([&](RbfnModel& m) -> double& { return m.centers[k]; }, grad.centers[k]);
        for (std::size_t k = 0; k < grad.widths.size(); ++k)
            fd_check([&](RbfnModel& m) -> double& { return m.widths[k]; }, grad.widths[k]);
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "max relative gradient error %.3g over 20 instances",
                  worst);
    return {worst <= 1e-4, detail};
}

// --- criterion 6: cost vs iteration budget --------------------------------

Outcome check_convergence_trend()
{
    Rng rng(1006);
    std::vector<LabeledFeature> dataset;
    for (int s = 0; s < 6; ++s) {
        std::vector<double> prototype(kFeatureDim);
        for (auto& v : prototype)
            v = rng.uniform(0.0, 1.0);
        for (int n = 0; n < 4; ++n) {
            LabeledFeature f;
            f.label = "s" + std::to_string(s);
            f.features = prototype;
            for (auto& v : f.features)
                v = std::clamp(v + rng.uniform(-0.04, 0.04), 0.0, 1.0);
            dataset.push_back(std::move(f));
        }
    }
    ConvergenceOptions opts;
    opts.budgets = {5, 10, 20, 40, 50, 60, 70, 100, 200, 500};
    opts.spread = 0.5;
    opts.seed = 1006;
    const EvalReport report = convergence_sweep(dataset, opts);

    bool monotone = true;
    for (std::size_t i = 1; i < report.rows.size(); ++i)
        if (!(report.rows[i][0] <= report.rows[i - 1][0] + 1e-12) || std::isnan(report.rows[i][0]))
            monotone = false;
    char detail[128];
    std::snprintf(detail, sizeof detail, "final cost %.3g at 5 iters down to %.3g at 500 iters",
                  report.rows.front()[0], report.rows.back()[0]);
    return {monotone && report.rows.back()[0] < report.rows.front()[0], detail};
}

// --- criterion 7: end-to-end recognition ----------------------------------

Outcome check_recognition(const fs::path& work)
{
    const fs::path db = work / "db";
    const int subjects = 20, samples_per_subject = 10;
    Rng rng(1007);
    for (int s = 0; s < subjects; ++s) {
        SyntheticSpec spec;
        spec.subject_seed = mix_seed(1007, s);
        spec.stroke_count = 3 + (s % 3);
        char id[8];
        std::snprintf(id, sizeof id, "s%02d", s);
        const fs::path dir = db / "subjects" / id;
        fs::create_directories(dir);
        save_image(generate_signature(spec), dir / "00.pgm");
        for (int n = 1; n < samples_per_subject; ++n) {
            spec.sample_index = n;
            const GrayImage base = generate_signature(spec);
            const GrayImage probe =
                distort(base, rng.uniform_int(-30, 30), rng.uniform(0.7, 1.3),
                        rng.uniform_int(0, 15), rng.uniform_int(0, 15), 4.0, rng.next_u64());
            char file[8];
            std::snprintf(file, sizeof file, "%02d.pgm", n);
            save_image(probe, dir / file);
        }
    }

    const Gallery gallery = build_gallery(db / "subjects", db / "gallery.csv");
    std::vector<LabeledFeature> enrolled;
    for (const auto& e : gallery.entries)
        enrolled.push_back(LabeledFeature{e.features.values, e.subject_id});
    const RbfnModel model = fit_exact(enrolled, 0.5);

    const int total = subjects * (samples_per_subject - 1);
    const auto outcomes = classify_probes(db, gallery, model, total, 1007, 0.5);
    int correct = 0;
    for (const auto& o : outcomes)
        correct += o.correct ? 1 : 0;
    const double rate = 100.0 * correct / total;
    char detail[96];
    std::snprintf(detail, sizeof detail, "identified %d/%d distorted probes (%.1f%%)", correct,
                  total, rate);
    return {rate >= 70.0, detail};
}

// --- criterion 8: determinism ----------------------------------------------

Outcome check_determinism(const fs::path& work)
{
    RstErrorOptions opts;
    opts.samples = 6;
    opts.seed = 1008;
    rst_error_table(opts).write_csv(work / "det_a.csv");
    rst_error_table(opts).write_csv(work / "det_b.csv");
    const bool reports_equal = read_bytes(work / "det_a.csv") == read_bytes(work / "det_b.csv");

    Rng rng(1008);
    std::vector<LabeledFeature> samples(10);
    for (std::size_t j = 0; j < samples.size(); ++j) {
        samples[j].features.resize(kFeatureDim);
        for (auto& v : samples[j].features)
            v = rng.uniform(0.0, 1.0);
        samples[j].label = "s" + std::to_string(j);
    }
    auto trained = [&]() {
        RbfnModel model = fit_exact(samples, 0.5);
        train_gradient(model, samples, TrainRates{}, 20);
        return model;
    };
    save_model(trained(), work / "det_a.json");
    save_model(trained(), work / "det_b.json");
    const bool models_equal = read_bytes(work / "det_a.json") == read_bytes(work / "det_b.json");

    SyntheticSpec spec;
    spec.subject_seed = 1008;
    spec.stroke_count = 4;
    save_image(distort(generate_signature(spec), 17.0, 0.9, 5, 5, 3.0, 42), work / "det_a.pgm");
    save_image(distort(generate_signature(spec), 17.0, 0.9, 5, 5, 3.0, 42), work / "det_b.pgm");
    const bool images_equal = read_bytes(work / "det_a.pgm") == read_bytes(work / "det_b.pgm");

    std::string detail = std::string("reports ") + (reports_equal ? "identical" : "DIFFER") +
                         ", models " + (models_equal ? "identical" : "DIFFER") + ", images " +
                         (images_equal ? "identical" : "DIFFER");
    return {reports_equal && models_equal && images_equal, detail};
}

} // namespace

int main()
{
    const fs::path work = fs::temp_directory_path() / "sigkit_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);

    struct Criterion {
        std::string name;
        double budget_seconds; // 0 = no stated budget
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"correlation matches the direct double-sum oracle (1e-12)", 1.0, check_ncc_oracle},
        {"transform matches direct form, inverts, preserves energy (1e-9)", 5.0, check_dct},
        {"distortion recovery: rotation median<=2 max<=3 deg, scale<=0.1", 60.0, check_rst_recovery},
        {"exact interpolation: mse<=1e-10 and full training accuracy", 5.0, check_interpolation},
        {"analytic gradients match finite differences (rel 1e-4)", 0.0, check_gradients},
        {"final cost non-increasing across iteration budgets", 0.0, check_convergence_trend},
        {"end-to-end recognition of distorted probes >= 70%", 0.0,
         [&] { return check_recognition(work); }},
        {"byte-identical reports, models and images across reruns", 0.0,
         [&] { return check_determinism(work); }},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const double t0 = now_seconds();
        Outcome outcome;
        try {
            outcome = criteria[i].run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed = now_seconds() - t0;
        const bool in_budget = criteria[i].budget_seconds <= 0.0 || elapsed < criteria[i].budget_seconds;
        const bool pass = outcome.pass && in_budget;
        failures += pass ? 0 : 1;
        std::printf("[%s] %zu. %s — %s (%.2f s%s)\n", pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].name.c_str(), outcome.detail.c_str(), elapsed,
                    in_budget ? "" : ", over budget");
    }

    const double total = now_seconds();
    const bool total_ok = total < 120.0;
    if (!total_ok)
        ++failures;
    std::printf("[%s] total runtime %.1f s (budget 120 s)\n", total_ok ? "PASS" : "FAIL", total);
    return failures == 0 ? 0 : 1;
}
