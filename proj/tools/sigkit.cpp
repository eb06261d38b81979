// sigkit: offline signature recognition toolkit.
// Subcommands: gen, enroll, train, rst, identify, eval-rst, eval-convergence,
// eval-recognition. All randomness flows from --seed; identical invocations
// produce identical files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sigkit/dataset.hpp"
#include "sigkit/eval.hpp"
#include "sigkit/features.hpp"
#include "sigkit/format.hpp"
#include "sigkit/image.hpp"
#include "sigkit/rbfn.hpp"
#include "sigkit/rng.hpp"
#include "sigkit/rst.hpp"

using namespace sigkit;
namespace fs = std::filesystem;

namespace {

FeatureMode parse_feature_mode(const std::string& name)
{
    if (name == "dct")
        return FeatureMode::Dct8x8;
    if (name == "raw")
        return FeatureMode::Raw8x8;
    raise(Errc::InvalidArgument, "unknown feature mode: " + name);
}

TrainRates parse_rates(const std::vector<double>& values)
{
    if (values.empty())
        return TrainRates{};
    if (values.size() != 3)
        raise(Errc::InvalidArgument, "--rates needs three comma-separated values");
    return TrainRates{values[0], values[1], values[2]};
}

std::vector<LabeledFeature> gallery_samples(const Gallery& gallery)
{
    std::vector<LabeledFeature> samples;
    for (const auto& e : gallery.entries)
        samples.push_back(LabeledFeature{e.features.values, e.subject_id});
    return samples;
}

std::string subject_id(int index, int total)
{
    int width = 2;
    for (int n = total - 1; n >= 100; n /= 10)
        ++width;
    char buf[24];
    std::snprintf(buf, sizeof buf, "s%0*d", std::min(width, 12), index);
    return buf;
}

// --- gen -------------------------------------------------------------------

struct GenConfig {
    std::string out_dir = "db";
    std::uint64_t seed = 1;
    int subjects = 10;
    int samples_per_subject = 10;
    int canvas_width = 256;
    int canvas_height = 128;
    int max_rotation = 30;
    double scale_min = 0.7;
    double scale_max = 1.3;
    int max_translation = 15;
    double noise_sigma = 4.0;
};

int run_gen(const GenConfig& cfg)
{
    const fs::path db(cfg.out_dir);
    fs::create_directories(db / "subjects");

    std::ofstream truth(db / "ground_truth.csv", std::ios::binary | std::ios::trunc);
    if (!truth)
        raise(Errc::IoFailure, "cannot write ground truth CSV");
    truth << "subject_id,sample,rotation_deg,scale,tx,ty,noise_sigma,seed\n";

    Rng rng(cfg.seed);
    for (int s = 0; s < cfg.subjects; ++s) {
        SyntheticSpec spec;
        spec.subject_seed = mix_seed(cfg.seed, s);
        spec.canvas_width = cfg.canvas_width;
        spec.canvas_height = cfg.canvas_height;
        spec.stroke_count = 3 + rng.uniform_int(0, 2);
        const std::string id = subject_id(s, cfg.subjects);
        const fs::path dir = db / "subjects" / id;
        fs::create_directories(dir);

        for (int n = 0; n < cfg.samples_per_subject; ++n) {
            spec.sample_index = n;
            const GrayImage base = generate_signature(spec);
            char file[16];
            std::snprintf(file, sizeof file, "%02d.pgm", n);

            if (n == 0) { // clean enrollment sample
                save_image(base, dir / file);
                truth << id << ',' << n << ",0,1,0,0,0," << spec.subject_seed << "\n";
                continue;
            }
            const int rot = rng.uniform_int(-cfg.max_rotation, cfg.max_rotation);
            const double scale = rng.uniform(cfg.scale_min, cfg.scale_max);
            const int tx = rng.uniform_int(0, cfg.max_translation);
            const int ty = rng.uniform_int(0, cfg.max_translation);
            const std::uint64_t sample_seed = rng.next_u64();
            save_image(distort(base, rot, scale, tx, ty, cfg.noise_sigma, sample_seed), dir / file);
            truth << id << ',' << n << ',' << rot << ',' << g17(scale) << ',' << tx << ',' << ty
                  << ',' << g17(cfg.noise_sigma) << ',' << sample_seed << "\n";
        }
    }
    std::cout << "generated " << cfg.subjects << " subjects x " << cfg.samples_per_subject
              << " samples under " << cfg.out_dir << "\n";
    return 0;
}

// --- rst ---------------------------------------------------------------------

int run_rst(const std::string& reference, const std::string& probe, const std::string& out,
            const std::string& report, int ink_threshold)
{
    const GrayImage ref_img = load_image(reference);
    const GrayImage probe_img = load_image(probe);
    RstDiagnostics diag;
    const Alignment result = correct_rst(ref_img, probe_img, &diag, ink_threshold);

    if (!out.empty())
        save_image(result.aligned, out);
    if (!report.empty()) {
        std::ofstream csv(report, std::ios::binary | std::ios::trunc);
        if (!csv)
            raise(Errc::IoFailure, "cannot write " + report);
        csv << "rotation_deg,tx,ty,scale_ratio,coarse_profile\n";
        csv << g17(result.params.rotation_deg) << ',' << result.params.translation_x << ','
            << result.params.translation_y << ',' << g17(result.params.scale_ratio) << ',';
        for (std::size_t i = 0; i < result.coarse_profile.scores.size(); ++i)
            csv << (i ? ";" : "") << g17(result.coarse_profile.scores[i]);
        csv << "\n";
    }
    std::cout << "rotation_deg=" << g17(result.params.rotation_deg)
              << " tx=" << result.params.translation_x << " ty=" << result.params.translation_y
              << " scale_ratio=" << g17(result.params.scale_ratio) << "\n";
    std::cerr << "diagnostic width_ratio=" << g17(diag.width_ratio) << " (not applied)\n";
    return 0;
}

// --- identify ------------------------------------------------------------------

int run_identify(const std::string& model_path, const std::string& probe_path,
                 const std::string& reference_path, const std::string& gallery_path,
                 double threshold, FeatureMode mode)
{
    const RbfnModel model = load_model(model_path);
    const GrayImage probe = load_image(probe_path);

    GrayImage aligned;
    if (!reference_path.empty()) {
        aligned = correct_rst(load_image(reference_path), probe).aligned;
    } else if (!gallery_path.empty()) {
        // align against every enrolled reference, keep the best correlation
        const Gallery gallery = load_gallery(gallery_path);
        double best = -2.0;
        for (const auto& entry : gallery.entries) {
            try {
                const GrayImage reference = load_image(entry.source_path);
                const Alignment result = correct_rst(reference, probe);
                const GrayImage ref_tight = crop(reference, ink_bbox(reference));
                const double score = ncc(ref_tight, result.aligned);
                if (score > best) {
                    best = score;
                    aligned = result.aligned;
                }
            } catch (const Error& e) {
                std::cerr << "identify: skipping " << entry.source_path << " (" << e.what()
                          << ")\n";
            }
        }
        if (best <= -2.0)
            raise(Errc::EmptyDirectory, "no usable gallery reference");
    } else {
        raise(Errc::InvalidArgument, "identify needs --reference or --gallery");
    }

    const FeatureVector features = extract_features(aligned, mode);
    const auto label = classify(model, features.values, threshold);
    std::cout << (label ? *label : std::string("Rejected")) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"sigkit — offline signature recognition toolkit"};
    app.require_subcommand(1);

    // gen
    GenConfig gen;
    CLI::App* cmd_gen = app.add_subcommand("gen", "generate a synthetic signature database");
    cmd_gen->add_option("--out", gen.out_dir, "output database directory")->capture_default_str();
    cmd_gen->add_option("--seed", gen.seed, "master random seed")->capture_default_str();
    cmd_gen->add_option("--subjects", gen.subjects, "number of subjects")->capture_default_str();
    cmd_gen->add_option("--samples-per-subject", gen.samples_per_subject,
                        "samples per subject (sample 00 is the clean enrollment image)")
        ->capture_default_str();
    cmd_gen->add_option("--canvas-width", gen.canvas_width, "render canvas width")
        ->capture_default_str();
    cmd_gen->add_option("--canvas-height", gen.canvas_height, "render canvas height")
        ->capture_default_str();
    cmd_gen->add_option("--max-rotation", gen.max_rotation, "max |tilt| in degrees")
        ->capture_default_str();
    cmd_gen->add_option("--scale-min", gen.scale_min, "minimum scale factor")->capture_default_str();
    cmd_gen->add_option("--scale-max", gen.scale_max, "maximum scale factor")->capture_default_str();
    cmd_gen->add_option("--max-translation", gen.max_translation, "max margin in pixels")
        ->capture_default_str();
    cmd_gen->add_option("--noise-sigma", gen.noise_sigma, "Gaussian pixel noise sigma")
        ->capture_default_str();

    // enroll
    std::string enroll_db, enroll_out = "gallery.csv", enroll_features = "dct";
    CLI::App* cmd_enroll = app.add_subcommand("enroll", "build the reference gallery manifest");
    cmd_enroll->add_option("--db", enroll_db, "database directory (with subjects/)")->required();
    cmd_enroll->add_option("--out", enroll_out, "manifest CSV path")->capture_default_str();
    cmd_enroll->add_option("--features", enroll_features, "feature mode: dct or raw")
        ->capture_default_str();

    // train
    std::string train_gallery, train_out = "model.json";
    double train_spread = 0.5, train_ridge = 1e-8;
    int train_epochs = 0, train_centers = 0;
    std::vector<double> train_rates;
    CLI::App* cmd_train = app.add_subcommand("train", "fit and optionally refine the network");
    cmd_train->add_option("--gallery", train_gallery, "gallery manifest CSV")->required();
    cmd_train->add_option("--out", train_out, "model JSON path")->capture_default_str();
    cmd_train->add_option("--spread", train_spread, "Gaussian width")->capture_default_str();
    cmd_train->add_option("--ridge", train_ridge, "regularization of the interpolation solve")
        ->capture_default_str();
    cmd_train->add_option("--epochs", train_epochs, "gradient refinement epochs (0 = fit only)")
        ->capture_default_str();
    cmd_train->add_option("--centers", train_centers, "hidden units (0 = one per sample)")
        ->capture_default_str();
    cmd_train
        ->add_option("--rates", train_rates, "learning rates for weights,centers,widths")
        ->delimiter(',')
        ->expected(3);

    // rst
    std::string rst_reference, rst_probe, rst_out, rst_report;
    int rst_ink_threshold = kInkThreshold;
    CLI::App* cmd_rst = app.add_subcommand("rst", "align one probe against a reference");
    cmd_rst->add_option("--reference", rst_reference, "reference image")->required();
    cmd_rst->add_option("--probe", rst_probe, "probe image")->required();
    cmd_rst->add_option("--out", rst_out, "aligned output PGM");
    cmd_rst->add_option("--report", rst_report, "CSV with detected parameters");
    cmd_rst->add_option("--ink-threshold", rst_ink_threshold, "intensities below this count as ink")
        ->capture_default_str();

    // features
    std::string feat_in, feat_out = "features.csv", feat_mode = "dct";
    CLI::App* cmd_features =
        app.add_subcommand("features", "extract the 64 features of one aligned image");
    cmd_features->add_option("--in", feat_in, "aligned (ink-tight) image")->required();
    cmd_features->add_option("--out", feat_out, "output CSV path")->capture_default_str();
    cmd_features->add_option("--features", feat_mode, "feature mode: dct or raw")
        ->capture_default_str();

    // identify
    std::string id_model, id_probe, id_reference, id_gallery, id_features = "dct";
    double id_threshold = 0.5;
    CLI::App* cmd_identify = app.add_subcommand("identify", "classify one probe");
    cmd_identify->add_option("--model", id_model, "model JSON")->required();
    cmd_identify->add_option("--probe", id_probe, "probe image")->required();
    cmd_identify->add_option("--reference", id_reference, "align against this reference");
    cmd_identify->add_option("--gallery", id_gallery, "align against every gallery reference");
    cmd_identify->add_option("--threshold", id_threshold, "rejection threshold")
        ->capture_default_str();
    cmd_identify->add_option("--features", id_features, "feature mode: dct or raw")
        ->capture_default_str();

    // eval-rst
    RstErrorOptions ev_rst;
    std::string ev_rst_out = "rst_table.csv";
    CLI::App* cmd_eval_rst = app.add_subcommand("eval-rst", "detection error table on synthetic probes");
    cmd_eval_rst->add_option("--samples", ev_rst.samples, "number of probes")->capture_default_str();
    cmd_eval_rst->add_option("--seed", ev_rst.seed, "random seed")->capture_default_str();
    cmd_eval_rst->add_option("--max-rotation", ev_rst.max_abs_rotation_deg, "max |tilt| in degrees")
        ->capture_default_str();
    cmd_eval_rst->add_option("--scale-min", ev_rst.scale_min, "minimum scale")->capture_default_str();
    cmd_eval_rst->add_option("--scale-max", ev_rst.scale_max, "maximum scale")->capture_default_str();
    cmd_eval_rst->add_option("--max-translation", ev_rst.max_translation, "max margin in pixels")
        ->capture_default_str();
    cmd_eval_rst->add_option("--noise-sigma", ev_rst.noise_sigma, "Gaussian pixel noise sigma")
        ->capture_default_str();
    cmd_eval_rst->add_option("--out", ev_rst_out, "report CSV path")->capture_default_str();

    // eval-convergence
    std::vector<int> ev_conv_budgets = {5, 10, 20, 40, 50, 60, 70, 100, 200, 500};
    double ev_conv_spread = 0.5;
    std::uint64_t ev_conv_seed = 1;
    int ev_conv_subjects = 6, ev_conv_samples = 4;
    std::vector<double> ev_conv_rates;
    std::string ev_conv_gallery, ev_conv_out = "convergence.csv";
    CLI::App* cmd_eval_conv =
        app.add_subcommand("eval-convergence", "final training cost per iteration budget");
    cmd_eval_conv->add_option("--budgets", ev_conv_budgets, "ascending iteration budgets")
        ->delimiter(',');
    cmd_eval_conv->add_option("--spread", ev_conv_spread, "Gaussian width")->capture_default_str();
    cmd_eval_conv->add_option("--seed", ev_conv_seed, "random seed")->capture_default_str();
    cmd_eval_conv->add_option("--subjects", ev_conv_subjects, "synthetic subjects when no gallery")
        ->capture_default_str();
    cmd_eval_conv
        ->add_option("--samples-per-subject", ev_conv_samples, "synthetic samples per subject")
        ->capture_default_str();
    cmd_eval_conv->add_option("--rates", ev_conv_rates, "learning rates for weights,centers,widths")
        ->delimiter(',')
        ->expected(3);
    cmd_eval_conv->add_option("--gallery", ev_conv_gallery, "train on this gallery instead");
    cmd_eval_conv->add_option("--out", ev_conv_out, "report CSV path")->capture_default_str();

    // eval-recognition
    std::string ev_rec_db, ev_rec_gallery, ev_rec_model, ev_rec_out = "recognition.csv";
    std::vector<int> ev_rec_counts = {50};
    std::uint64_t ev_rec_seed = 1;
    double ev_rec_threshold = 0.5;
    std::string ev_rec_features = "dct";
    CLI::App* cmd_eval_rec =
        app.add_subcommand("eval-recognition", "recognition rate per probe count");
    cmd_eval_rec->add_option("--db", ev_rec_db, "database directory")->required();
    cmd_eval_rec->add_option("--gallery", ev_rec_gallery, "gallery manifest CSV")->required();
    cmd_eval_rec->add_option("--model", ev_rec_model, "model JSON")->required();
    cmd_eval_rec->add_option("--counts", ev_rec_counts, "probe counts")->delimiter(',');
    cmd_eval_rec->add_option("--seed", ev_rec_seed, "random seed")->capture_default_str();
    cmd_eval_rec->add_option("--threshold", ev_rec_threshold, "rejection threshold")
        ->capture_default_str();
    cmd_eval_rec->add_option("--features", ev_rec_features, "feature mode: dct or raw")
        ->capture_default_str();
    cmd_eval_rec->add_option("--out", ev_rec_out, "report CSV path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) // --help
            return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_gen->parsed())
            return run_gen(gen);

        if (cmd_enroll->parsed()) {
            const Gallery gallery = build_gallery(fs::path(enroll_db) / "subjects", enroll_out,
                                                  parse_feature_mode(enroll_features));
            std::cout << "enrolled " << gallery.entries.size() << " subjects into " << enroll_out
                      << "\n";
            return 0;
        }

        if (cmd_train->parsed()) {
            const Gallery gallery = load_gallery(train_gallery);
            const std::vector<LabeledFeature> samples = gallery_samples(gallery);
            RbfnModel model =
                train_centers > 0
                    ? fit_subsampled(samples, train_spread, train_centers, train_ridge)
                    : fit_exact(samples, train_spread, train_ridge);
            double final_mse = mse(model, samples);
            if (train_epochs > 0)
                final_mse =
                    train_gradient(model, samples, parse_rates(train_rates), train_epochs).mse;
            save_model(model, train_out);
            std::cout << "trained " << model.units() << " units over " << model.classes()
                      << " classes, mse=" << g17(final_mse) << ", saved to " << train_out << "\n";
            return 0;
        }

        if (cmd_rst->parsed())
            return run_rst(rst_reference, rst_probe, rst_out, rst_report, rst_ink_threshold);

        if (cmd_features->parsed()) {
            const GrayImage img = load_image(feat_in);
            const FeatureVector features = extract_features(img, parse_feature_mode(feat_mode));
            std::ofstream csv(feat_out, std::ios::binary | std::ios::trunc);
            if (!csv)
                raise(Errc::IoFailure, "cannot write " + feat_out);
            for (std::size_t i = 0; i < features.values.size(); ++i)
                csv << (i ? "," : "") << g17(features.values[i]);
            csv << "\n";
            std::cout << "wrote " << features.values.size() << " features to " << feat_out << "\n";
            return 0;
        }

        if (cmd_identify->parsed())
            return run_identify(id_model, id_probe, id_reference, id_gallery, id_threshold,
                                parse_feature_mode(id_features));

        if (cmd_eval_rst->parsed()) {
            const EvalReport report = rst_error_table(ev_rst);
            report.write_csv(ev_rst_out);
            std::cout << "wrote " << report.rows.size() << " rows to " << ev_rst_out << "\n";
            return 0;
        }

        if (cmd_eval_conv->parsed()) {
            std::vector<LabeledFeature> dataset;
            if (!ev_conv_gallery.empty()) {
                dataset = gallery_samples(load_gallery(ev_conv_gallery));
            } else {
                // in-memory synthetic training set: per-subject jittered renders
                for (int s = 0; s < ev_conv_subjects; ++s) {
                    SyntheticSpec spec;
                    spec.subject_seed = mix_seed(ev_conv_seed, s);
                    spec.stroke_count = 3 + (s % 3);
                    for (int n = 0; n < ev_conv_samples; ++n) {
                        spec.sample_index = n;
                        const GrayImage img = generate_signature(spec);
                        const GrayImage tight = crop(img, ink_bbox(img));
                        dataset.push_back(LabeledFeature{extract_features(tight).values,
                                                         subject_id(s, ev_conv_subjects)});
                    }
                }
            }
            ConvergenceOptions opts;
            opts.budgets = ev_conv_budgets;
            opts.spread = ev_conv_spread;
            opts.seed = ev_conv_seed;
            opts.rates = parse_rates(ev_conv_rates);
            const EvalReport report = convergence_sweep(dataset, opts);
            report.write_csv(ev_conv_out);
            std::cout << "wrote " << report.rows.size() << " rows to " << ev_conv_out << "\n";
            return 0;
        }

        if (cmd_eval_rec->parsed()) {
            RecognitionOptions opts;
            opts.counts = ev_rec_counts;
            opts.seed = ev_rec_seed;
            opts.reject_threshold = ev_rec_threshold;
            opts.mode = parse_feature_mode(ev_rec_features);
            const EvalReport report = recognition_sweep(ev_rec_db, load_gallery(ev_rec_gallery),
                                                        load_model(ev_rec_model), opts);
            report.write_csv(ev_rec_out);
            std::cout << "wrote " << report.rows.size() << " rows to " << ev_rec_out << "\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
