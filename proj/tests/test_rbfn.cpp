#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "sigkit/rbfn.hpp"
#include "sigkit/ref.hpp"
#include "sigkit/rng.hpp"

using namespace sigkit;
namespace fs = std::filesystem;

namespace {

std::vector<LabeledFeature> random_samples(Rng& rng, int n, int dim, int classes)
{
    std::vector<LabeledFeature> samples(n);
    for (int j = 0; j < n; ++j) {
        samples[j].features.resize(dim);
        for (auto& v : samples[j].features)
            v = rng.uniform(0.0, 1.0);
        samples[j].label = "c" + std::to_string(j % classes);
    }
    return samples;
}

RbfnModel random_model(Rng& rng, int units, int dim, int classes)
{
    RbfnModel model;
    model.dim = dim;
    model.spread = 0.7;
    for (int l = 0; l < classes; ++l)
        model.class_labels.push_back("c" + std::to_string(l));
    model.centers.resize(static_cast<std::size_t>(units) * dim);
    for (auto& v : model.centers)
        v = rng.uniform(0.0, 1.0);
    model.widths.resize(units);
    for (auto& v : model.widths)
        v = rng.uniform(0.4, 1.5);
    model.weights.resize(static_cast<std::size_t>(units) * classes);
    for (auto& v : model.weights)
        v = rng.uniform(-1.0, 1.0);
    return model;
}

// central finite difference of the direct-form cost with respect to one
// parameter slot
template <typename Getter>
double fd_slope(RbfnModel model, std::span<const LabeledFeature> samples, Getter&& slot)
{
    const double h = 1e-5;
    double& v = slot(model);
    const double saved = v;
    v = saved + h;
    const double up = ref::rbfn_cost(model, samples);
    v = saved - h;
    const double down = ref::rbfn_cost(model, samples);
    v = saved;
    return (up - down) / (2.0 * h);
}

void check_gradient(const RbfnModel& model, std::span<const LabeledFeature> samples)
{
    const CostGradient grad = cost_gradient(model, samples);
    auto close = [](double analytic, double fd) {
        return std::abs(analytic - fd) <= 1e-4 * std::max({1e-3, std::abs(analytic), std::abs(fd)});
    };
    for (std::size_t k = 0; k < grad.weights.size(); ++k)
        CHECK(close(grad.weights[k],
                    fd_slope(model, samples, [&](RbfnModel& m) -> double& { return m.weights[k]; })));
    for (std::size_t k = 0; k < grad.centers.size(); ++k)
        CHECK(close(grad.centers[k],
                    fd_slope(model, samples, [&](RbfnModel& m) -> double& { return m.centers[k]; })));
    for (std::size_t k = 0; k < grad.widths.size(); ++k)
        CHECK(close(grad.widths[k],
                    fd_slope(model, samples, [&](RbfnModel& m) -> double& { return m.widths[k]; })));
}

} // namespace

TEST_CASE("activation values")
{
    const std::vector<double> x = {0.2, 0.4, 0.6};
    CHECK(activation(x, x, 0.5) == 1.0);

    // distance sigma * sqrt(2) gives exp(-1)
    const double sigma = 0.8;
    const std::vector<double> t = {0.2 + sigma * std::sqrt(2.0), 0.4, 0.6};
    CHECK(activation(x, t, sigma) == doctest::Approx(0.36787944117144233).epsilon(1e-12));

    Rng rng(91);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(5), b(5);
        for (auto& v : a)
            v = rng.uniform(-2.0, 2.0);
        for (auto& v : b)
            v = rng.uniform(-2.0, 2.0);
        const double w = rng.uniform(0.1, 2.0);
        double d2 = 0.0;
        for (int i = 0; i < 5; ++i)
            d2 += (a[i] - b[i]) * (a[i] - b[i]);
        CHECK(activation(a, b, w) == doctest::Approx(std::exp(-d2 / (2 * w * w))).epsilon(1e-12));
        CHECK(activation(a, b, w) > 0.0);
        CHECK(activation(a, b, w) <= 1.0);
    }

    CHECK_THROWS_WITH_AS(activation(x, std::vector<double>{1.0}, 0.5),
                         doctest::Contains("DimensionMismatch"), Error);
    CHECK_THROWS_WITH_AS(activation(x, x, 0.0), doctest::Contains("NonPositiveWidth"), Error);
}

TEST_CASE("forward pass")
{
    // single unit centered at the input: the score is the raw weight
    RbfnModel one;
    one.dim = 2;
    one.class_labels = {"a", "b"};
    one.centers = {0.3, 0.7};
    one.widths = {0.5};
    one.weights = {2.5, -0.5};
    const std::vector<double> x = {0.3, 0.7};
    const auto scores = forward(one, x);
    CHECK(scores[0] == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(scores[1] == doctest::Approx(-0.5).epsilon(1e-12));

    // two units, frozen hand-computed case
    RbfnModel two;
    two.dim = 2;
    two.class_labels = {"a", "b"};
    two.centers = {0.0, 0.0, 1.0, 0.0};
    two.widths = {1.0, 1.0};
    two.weights = {0.5, -1.0, 2.0, 0.3};
    const auto s = forward(two, std::vector<double>{0.0, 0.0});
    CHECK(s[0] == doctest::Approx(1.7130613194252668).epsilon(1e-12));
    CHECK(s[1] == doctest::Approx(-0.81804080208620999).epsilon(1e-12));

    // zero weights give zero scores
    two.weights.assign(4, 0.0);
    for (double v : forward(two, std::vector<double>{0.4, 0.2}))
        CHECK(v == 0.0);

    Rng rng(97);
    const RbfnModel model = random_model(rng, 6, 4, 3);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> probe(4);
        for (auto& v : probe)
            v = rng.uniform(0.0, 1.0);
        const auto fast = forward(model, probe);
        const auto direct = ref::rbfn_forward(model, probe);
        for (std::size_t l = 0; l < fast.size(); ++l)
            CHECK(fast[l] == doctest::Approx(direct[l]).epsilon(1e-12));
    }
}

TEST_CASE("forward is linear in the output weights")
{
    Rng rng(101);
    RbfnModel a = random_model(rng, 5, 3, 2);
    RbfnModel b = a;
    for (auto& v : b.weights)
        v = rng.uniform(-1.0, 1.0);
    RbfnModel sum = a;
    for (std::size_t i = 0; i < sum.weights.size(); ++i)
        sum.weights[i] = a.weights[i] + b.weights[i];

    const std::vector<double> x = {0.1, 0.5, 0.9};
    const auto sa = forward(a, x);
    const auto sb = forward(b, x);
    const auto ss = forward(sum, x);
    for (std::size_t l = 0; l < ss.size(); ++l)
        CHECK(std::abs(ss[l] - (sa[l] + sb[l])) <= 1e-12);
}

TEST_CASE("exact interpolation on three 1-D points")
{
    const std::vector<LabeledFeature> samples = {
        {{0.0}, "a"}, {{1.0}, "b"}, {{2.0}, "c"}};
    const RbfnModel model = fit_exact(samples, 0.5);
    for (const auto& s : samples) {
        const auto scores = forward(model, s.features);
        for (int l = 0; l < model.classes(); ++l) {
            const double target = model.class_labels[l] == s.label ? 1.0 : 0.0;
            CHECK(std::abs(scores[l] - target) <= 1e-6);
        }
        CHECK(classify(model, s.features, 0.5) == s.label);
    }
}

TEST_CASE("exact interpolation rejects conflicting duplicates")
{
    const std::vector<LabeledFeature> samples = {
        {{0.5, 0.5}, "a"}, {{0.5, 0.5}, "b"}, {{0.9, 0.1}, "c"}};
    CHECK_THROWS_WITH_AS(fit_exact(samples, 0.5), doctest::Contains("DuplicateConflict"), Error);
}

TEST_CASE("exact interpolation drives training error to zero on distinct samples")
{
    Rng rng(103);
    for (int n : {5, 30, 100}) {
        const auto samples = random_samples(rng, n, 8, 4);
        const RbfnModel model = fit_exact(samples, 0.5);
        CHECK(mse(model, samples) <= 1e-10);
    }
}

TEST_CASE("reduced-center fit keeps the public contract")
{
    Rng rng(105);
    const auto samples = random_samples(rng, 24, 6, 4);
    const RbfnModel model = fit_subsampled(samples, 0.8, 8);
    CHECK(model.units() == 8);
    CHECK(model.classes() == 4);
    const RbfnModel full = fit_subsampled(samples, 0.8, 50); // falls back to exact
    CHECK(full.units() == 24);
    CHECK(mse(full, samples) <= 1e-10);
}

TEST_CASE("analytic gradients match central finite differences")
{
    Rng rng(107);
    for (int trial = 0; trial < 5; ++trial) {
        const int dim = rng.uniform_int(2, 5);
        const int units = rng.uniform_int(2, 4);
        const int classes = rng.uniform_int(2, 3);
        const RbfnModel model = random_model(rng, units, dim, classes);
        const auto samples = random_samples(rng, rng.uniform_int(3, 6), dim, classes);
        check_gradient(model, samples);
    }
}

TEST_CASE("weight-only descent on the convex subproblem never increases the cost")
{
    Rng rng(109);
    RbfnModel model = random_model(rng, 4, 3, 2);
    const auto samples = random_samples(rng, 8, 3, 2);
    // tiny center/width rates approximate the pure weight update
    TrainRates rates{1e-2, 1e-12, 1e-12};
    const TrainState state = train_gradient(model, samples, rates, 40);
    for (std::size_t e = 1; e < state.history.size(); ++e)
        CHECK(state.history[e] <= state.history[e - 1] + 1e-12);
}

TEST_CASE("longer training reaches a cost at least as low")
{
    Rng rng(113);
    const auto samples = random_samples(rng, 10, 4, 3);
    auto train_for = [&](int epochs) {
        Rng init(7);
        RbfnModel model = random_model(init, 10, 4, 3);
        return train_gradient(model, samples, TrainRates{}, epochs).mse;
    };
    const double short_run = train_for(5);
    const double long_run = train_for(200);
    CHECK(long_run <= short_run);
}

TEST_CASE("training is deterministic")
{
    Rng rng(127);
    const auto samples = random_samples(rng, 12, 5, 3);
    auto run = [&]() {
        Rng init(3);
        RbfnModel model = random_model(init, 12, 5, 3);
        train_gradient(model, samples, TrainRates{}, 25);
        return model;
    };
    const RbfnModel a = run();
    const RbfnModel b = run();
    CHECK(a.weights == b.weights);
    CHECK(a.centers == b.centers);
    CHECK(a.widths == b.widths);
}

TEST_CASE("classification thresholds and ties")
{
    Rng rng(131);
    const auto samples = random_samples(rng, 6, 4, 3);
    const RbfnModel model = fit_exact(samples, 0.5);
    CHECK(classify(model, samples[0].features, 0.5) == samples[0].label);

    RbfnModel zero = model;
    zero.weights.assign(zero.weights.size(), 0.0);
    CHECK(!classify(zero, samples[0].features, 0.5).has_value());

    // probe far from every center is rejected
    const std::vector<double> far = {50.0, 50.0, 50.0, 50.0};
    const auto scores = forward(model, far);
    for (double s : scores)
        CHECK(s < 0.5);
    CHECK(!classify(model, far, 0.5).has_value());
}

TEST_CASE("decision is invariant under positive scaling of weights and threshold")
{
    Rng rng(137);
    const RbfnModel model = random_model(rng, 6, 4, 3);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> x(4);
        for (auto& v : x)
            v = rng.uniform(0.0, 1.0);
        const double c = rng.uniform(0.5, 4.0);
        RbfnModel scaled = model;
        for (auto& w : scaled.weights)
            w *= c;
        const double threshold = 0.2;
        CHECK(classify(model, x, threshold) == classify(scaled, x, threshold * c));
    }
}

TEST_CASE("mse values")
{
    Rng rng(139);
    const auto samples = random_samples(rng, 8, 4, 4);
    const RbfnModel fitted = fit_exact(samples, 0.5);
    CHECK(mse(fitted, samples) <= 1e-10);

    RbfnModel zero = fitted;
    zero.weights.assign(zero.weights.size(), 0.0);
    CHECK(mse(zero, samples) == doctest::Approx(1.0).epsilon(1e-12));

    const RbfnModel model = random_model(rng, 5, 4, 4);
    CHECK(mse(model, samples) == doctest::Approx(ref::rbfn_mse(model, samples)).epsilon(1e-10));
}

TEST_CASE("model files round-trip")
{
    Rng rng(149);
    const auto samples = random_samples(rng, 10, 6, 3);
    RbfnModel model = fit_exact(samples, 0.5);
    train_gradient(model, samples, TrainRates{}, 5);

    const fs::path dir = fs::temp_directory_path() / "sigkit_rbfn_tests";
    fs::create_directories(dir);
    const fs::path path = dir / "model.json";
    save_model(model, path);
    const RbfnModel loaded = load_model(path);

    CHECK(loaded.class_labels == model.class_labels);
    CHECK(loaded.spread == model.spread);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> x(6);
        for (auto& v : x)
            v = rng.uniform(0.0, 1.0);
        const auto a = forward(model, x);
        const auto b = forward(loaded, x);
        for (std::size_t l = 0; l < a.size(); ++l)
            CHECK(std::abs(a[l] - b[l]) <= 1e-12);
    }

    CHECK_THROWS_WITH_AS(load_model(dir / "missing.json"), doctest::Contains("FileNotFound"),
                         Error);
    std::ofstream(dir / "junk.json") << "{ not json";
    CHECK_THROWS_WITH_AS(load_model(dir / "junk.json"), doctest::Contains("MalformedModel"), Error);
}
