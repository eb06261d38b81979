#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sigkit/error.hpp"

namespace sigkit {

/// Gaussian hidden layer with per-unit scalar widths and a linear output
/// layer. Flat row-major storage: centers is units x dim, weights is
/// units x classes.
struct RbfnModel {
    int dim = 0;
    double spread = 0.5; // global initial width
    std::vector<std::string> class_labels;
    std::vector<double> centers;
    std::vector<double> widths;
    std::vector<double> weights;

    int units() const { return static_cast<int>(widths.size()); }
    int classes() const { return static_cast<int>(class_labels.size()); }

    std::span<const double> center(int i) const
    {
        return {centers.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
    }
    std::span<const double> unit_weights(int i) const
    {
        return {weights.data() + static_cast<std::size_t>(i) * classes(),
                static_cast<std::size_t>(classes())};
    }
};

struct LabeledFeature {
    std::vector<double> features;
    std::string label;
};

struct TrainRates {
    double weights = 1e-2;
    double centers = 1e-3;
    double widths = 1e-3;
};

struct TrainState {
    int epoch = 0;
    double mse = 0.0;
    TrainRates rates;
    std::vector<double> history; // post-update cost per epoch, 2*xi/N
};

/// Gaussian response exp(-|x - t|^2 / (2 w^2)); 1 exactly when x == t.
double activation(std::span<const double> x, std::span<const double> center, double width);

/// Linear output layer: score_l = sum_i weights[i][l] * G_i(x).
std::vector<double> forward(const RbfnModel& model, std::span<const double> x);

/// Exact interpolation: one hidden unit per training sample, all widths set
/// to `spread`, output weights from the ridge-regularized kernel system with
/// one-hot targets. Throws DuplicateConflict when two identical feature
/// vectors carry different labels.
RbfnModel fit_exact(std::span<const LabeledFeature> samples, double spread, double ridge = 1e-8);

/// Reduced variant: keeps every ceil(N/M)-th sample as a center and solves
/// the ridge-regularized least-squares system. num_centers >= N falls back
/// to exact interpolation.
RbfnModel fit_subsampled(std::span<const LabeledFeature> samples, double spread, int num_centers,
                         double ridge = 1e-8);

/// Full-batch gradient descent on the summed squared error, updating output
/// weights, centers and widths each epoch. Deterministic for fixed inputs.
/// Throws NonFiniteCost when the cost diverges.
TrainState train_gradient(RbfnModel& model, std::span<const LabeledFeature> samples,
                          TrainRates rates, int epochs);

/// Analytic gradient of the cost 1/2 sum_j |d_j - F(x_j)|^2 with respect to
/// weights, centers and widths, laid out to match the model's flat storage.
/// Exposed for verification against finite differences.
struct CostGradient {
    std::vector<double> weights;
    std::vector<double> centers;
    std::vector<double> widths;
};
CostGradient cost_gradient(const RbfnModel& model, std::span<const LabeledFeature> samples);

/// Argmax label if the best score clears the threshold, otherwise nullopt
/// (rejected). Ties resolve to the lowest class index.
std::optional<std::string> classify(const RbfnModel& model, std::span<const double> x,
                                    double reject_threshold);

/// Mean over samples of the squared error summed over outputs (2*xi/N).
double mse(const RbfnModel& model, std::span<const LabeledFeature> samples);

/// JSON model document, 17-significant-digit decimals, "format": 1.
void save_model(const RbfnModel& model, const std::filesystem::path& path);
RbfnModel load_model(const std::filesystem::path& path);

} // namespace sigkit
