#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sigkit/dataset.hpp"
#include "sigkit/rbfn.hpp"

namespace sigkit {

/// One experiment's results: numeric rows plus aggregates that tests can
/// recompute from the rows. Serialized as CSV with a leading config echo.
struct EvalReport {
    std::string kind; // rst_table | convergence | recognition
    std::string config_echo;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, double>> aggregates;

    void write_csv(const std::filesystem::path& path) const;
};

struct RstErrorOptions {
    int samples = 10;
    std::uint64_t seed = 1;
    int max_abs_rotation_deg = 55; // integer rotations drawn from [-max, max]
    double scale_min = 0.3;
    double scale_max = 1.8;
    int max_translation = 20;
    double noise_sigma = 0.0;
    int canvas_width = 256;
    int canvas_height = 128;
};

/// Distorts synthetic probes with known rotation/scale, runs the full
/// correction, and tabulates detected values and absolute errors per sample.
/// Detected scale is reported in the probe's units (reciprocal of the
/// correction ratio) so originals and detections compare directly.
/// Failed samples carry NaN detections and are excluded from aggregates.
EvalReport rst_error_table(const RstErrorOptions& opts);

struct ConvergenceOptions {
    std::vector<int> budgets; // ascending iteration counts
    double spread = 0.5;
    TrainRates rates;
    std::uint64_t seed = 1;
};

/// Re-trains from one fixed seeded initialization for each iteration budget
/// and records the final cost, giving the cost-vs-iterations table.
EvalReport convergence_sweep(std::span<const LabeledFeature> dataset,
                             const ConvergenceOptions& opts);

struct RecognitionOptions {
    std::vector<int> counts;
    std::uint64_t seed = 1;
    double reject_threshold = 0.5;
    FeatureMode mode = FeatureMode::Dct8x8;
};

struct ProbeOutcome {
    std::string subject;
    int sample = 0;
    std::string predicted; // empty = rejected
    bool correct = false;
};

/// Classifies `count` seeded-shuffled test probes from the generated database
/// layout: each probe is RST-corrected against its subject's enrolled
/// reference, featurized and classified. Errors count as incorrect.
std::vector<ProbeOutcome> classify_probes(const std::filesystem::path& db_dir,
                                          const Gallery& gallery, const RbfnModel& model,
                                          int count, std::uint64_t seed, double reject_threshold,
                                          FeatureMode mode = FeatureMode::Dct8x8);

/// Recognition rate for each requested probe count.
EvalReport recognition_sweep(const std::filesystem::path& db_dir, const Gallery& gallery,
                             const RbfnModel& model, const RecognitionOptions& opts);

} // namespace sigkit
