#include "sigkit/rbfn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "sigkit/format.hpp"

namespace sigkit {

namespace {

double squared_dist(std::span<const double> a, std::span<const double> b)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

int check_samples(std::span<const LabeledFeature> samples)
{
    if (samples.empty())
        raise(Errc::InvalidArgument, "no training samples");
    const int dim = static_cast<int>(samples[0].features.size());
    for (const auto& s : samples) {
        if (static_cast<int>(s.features.size()) != dim)
            raise(Errc::DimensionMismatch, "inconsistent feature dimensions");
        if (s.label.empty())
            raise(Errc::InvalidArgument, "empty class label");
    }
    return dim;
}

std::vector<std::string> labels_in_order(std::span<const LabeledFeature> samples)
{
    std::vector<std::string> labels;
    for (const auto& s : samples)
        if (std::find(labels.begin(), labels.end(), s.label) == labels.end())
            labels.push_back(s.label);
    return labels;
}

int label_index(const std::vector<std::string>& labels, const std::string& label)
{
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end())
        raise(Errc::InvalidArgument, "label not in model: " + label);
    return static_cast<int>(it - labels.begin());
}

// One-hot target matrix, N x L row-major.
std::vector<double> one_hot_targets(std::span<const LabeledFeature> samples,
                                    const std::vector<std::string>& labels)
{
    std::vector<double> t(samples.size() * labels.size(), 0.0);
    for (std::size_t j = 0; j < samples.size(); ++j)
        t[j * labels.size() + label_index(labels, samples[j].label)] = 1.0;
    return t;
}

// In-place Cholesky solve of the SPD system A X = B.
// A is n x n row-major (overwritten with its factor), B is n x nrhs row-major
// (overwritten with the solution).
void cholesky_solve(std::vector<double>& A, int n, std::vector<double>& B, int nrhs)
{
    auto a = [&](int r, int c) -> double& { return A[static_cast<std::size_t>(r) * n + c]; };
    for (int k = 0; k < n; ++k) {
        double pivot = a(k, k);
        for (int m = 0; m < k; ++m)
            pivot -= a(k, m) * a(k, m);
        if (!(pivot > 0.0))
            raise(Errc::SingularSystem, "kernel matrix is not positive definite");
        a(k, k) = std::sqrt(pivot);
        for (int i = k + 1; i < n; ++i) {
            double v = a(i, k);
            for (int m = 0; m < k; ++m)
                v -= a(i, m) * a(k, m);
            a(i, k) = v / a(k, k);
        }
    }
    auto b = [&](int r, int c) -> double& { return B[static_cast<std::size_t>(r) * nrhs + c]; };
    for (int c = 0; c < nrhs; ++c) {
        for (int i = 0; i < n; ++i) { // L y = b
            double v = b(i, c);
            for (int m = 0; m < i; ++m)
                v -= a(i, m) * b(m, c);
            b(i, c) = v / a(i, i);
        }
        for (int i = n - 1; i >= 0; --i) { // L^T x = y
            double v = b(i, c);
            for (int m = i + 1; m < n; ++m)
                v -= a(m, i) * b(m, c);
            b(i, c) = v / a(i, i);
        }
    }
}

// Response and squared-distance matrices of every sample against every unit,
// both N x M row-major. Each entry is independent, so the parallel fill is
// deterministic.
void response_matrices(const RbfnModel& model, std::span<const LabeledFeature> samples,
                       std::vector<double>& G, std::vector<double>& dist2)
{
    const int N = static_cast<int>(samples.size());
    const int M = model.units();
    G.resize(static_cast<std::size_t>(N) * M);
    dist2.resize(G.size());
#pragma omp parallel for schedule(static)
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < M; ++i) {
            const double d2 = squared_dist(samples[j].features, model.center(i));
            const double w = model.widths[i];
            dist2[static_cast<std::size_t>(j) * M + i] = d2;
            G[static_cast<std::size_t>(j) * M + i] = std::exp(-d2 / (2.0 * w * w));
        }
    }
}

struct GradientScratch {
    std::vector<double> G;
    std::vector<double> dist2;
    std::vector<double> errors; // N x L
};

CostGradient gradient_impl(const RbfnModel& model, std::span<const LabeledFeature> samples,
                           const std::vector<double>& targets, GradientScratch& scratch)
{
    const int N = static_cast<int>(samples.size());
    const int M = model.units();
    const int L = model.classes();
    const int D = model.dim;

    response_matrices(model, samples, scratch.G, scratch.dist2);
    const std::vector<double>& G = scratch.G;
    const std::vector<double>& dist2 = scratch.dist2;

    scratch.errors.assign(static_cast<std::size_t>(N) * L, 0.0);
    std::vector<double>& E = scratch.errors;
#pragma omp parallel for schedule(static)
    for (int j = 0; j < N; ++j) {
        for (int l = 0; l < L; ++l) {
            double score = 0.0;
            for (int i = 0; i < M; ++i)
                score += model.weights[static_cast<std::size_t>(i) * L + l] *
                         G[static_cast<std::size_t>(j) * M + i];
            E[static_cast<std::size_t>(j) * L + l] = targets[static_cast<std::size_t>(j) * L + l] - score;
        }
    }

    CostGradient grad;
    grad.weights.assign(static_cast<std::size_t>(M) * L, 0.0);
    grad.centers.assign(static_cast<std::size_t>(M) * D, 0.0);
    grad.widths.assign(M, 0.0);

    // per-(sample, unit) factor shared by the center and width gradients
    std::vector<double> coef(static_cast<std::size_t>(N) * M);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < M; ++i) {
            double backprop = 0.0;
            for (int l = 0; l < L; ++l)
                backprop += E[static_cast<std::size_t>(j) * L + l] *
                            model.weights[static_cast<std::size_t>(i) * L + l];
            coef[static_cast<std::size_t>(j) * M + i] = backprop * G[static_cast<std::size_t>(j) * M + i];
        }
    }

#pragma omp parallel for schedule(static)
    for (int i = 0; i < M; ++i) {
        const double w = model.widths[i];
        const double inv_w2 = 1.0 / (w * w);
        const double inv_w3 = inv_w2 / w;

        for (int l = 0; l < L; ++l) {
            double acc = 0.0;
            for (int j = 0; j < N; ++j)
                acc += E[static_cast<std::size_t>(j) * L + l] * G[static_cast<std::size_t>(j) * M + i];
            grad.weights[static_cast<std::size_t>(i) * L + l] = -acc;
        }

        for (int d = 0; d < D; ++d) {
            double acc = 0.0;
            for (int j = 0; j < N; ++j)
                acc += coef[static_cast<std::size_t>(j) * M + i] *
                       (samples[j].features[d] - model.centers[static_cast<std::size_t>(i) * D + d]);
            grad.centers[static_cast<std::size_t>(i) * D + d] = -acc * inv_w2;
        }

        double acc = 0.0;
        for (int j = 0; j < N; ++j)
            acc += coef[static_cast<std::size_t>(j) * M + i] * dist2[static_cast<std::size_t>(j) * M + i];
        grad.widths[i] = -acc * inv_w3;
    }
    return grad;
}

void check_model_input(const RbfnModel& model, std::span<const double> x)
{
    if (static_cast<int>(x.size()) != model.dim)
        raise(Errc::DimensionMismatch, "feature dimension does not match model");
}

} // namespace

double activation(std::span<const double> x, std::span<const double> center, double width)
{
    if (x.size() != center.size())
        raise(Errc::DimensionMismatch, "activation input/center dimensions differ");
    if (!(width > 0.0))
        raise(Errc::NonPositiveWidth, "width must be positive");
    return std::exp(-squared_dist(x, center) / (2.0 * width * width));
}

std::vector<double> forward(const RbfnModel& model, std::span<const double> x)
{
    check_model_input(model, x);
    const int L = model.classes();
    std::vector<double> scores(L, 0.0);
    for (int i = 0; i < model.units(); ++i) {
        const double g = activation(x, model.center(i), model.widths[i]);
        const auto w = model.unit_weights(i);
        for (int l = 0; l < L; ++l)
            scores[l] += w[l] * g;
    }
    return scores;
}

RbfnModel fit_exact(std::span<const LabeledFeature> samples, double spread, double ridge)
{
    const int dim = check_samples(samples);
    if (samples.size() < 2)
        raise(Errc::InvalidArgument, "need at least two samples");
    if (!(spread > 0.0))
        raise(Errc::NonPositiveWidth, "spread must be positive");

    const int N = static_cast<int>(samples.size());
    for (int a = 0; a < N; ++a)
        for (int b = a + 1; b < N; ++b)
            if (samples[a].features == samples[b].features && samples[a].label != samples[b].label)
                raise(Errc::DuplicateConflict, "identical features with labels '" +
                                                   samples[a].label + "' and '" + samples[b].label + "'");

    RbfnModel model;
    model.dim = dim;
    model.spread = spread;
    model.class_labels = labels_in_order(samples);
    model.widths.assign(N, spread);
    model.centers.resize(static_cast<std::size_t>(N) * dim);
    for (int j = 0; j < N; ++j)
        std::copy(samples[j].features.begin(), samples[j].features.end(),
                  model.centers.begin() + static_cast<std::size_t>(j) * dim);

    const int L = model.classes();
    std::vector<double> K(static_cast<std::size_t>(N) * N);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i)
            K[static_cast<std::size_t>(j) * N + i] =
                std::exp(-squared_dist(samples[j].features, samples[i].features) /
                         (2.0 * spread * spread));
    for (int j = 0; j < N; ++j)
        K[static_cast<std::size_t>(j) * N + j] += ridge;

    std::vector<double> W = one_hot_targets(samples, model.class_labels);
    cholesky_solve(K, N, W, L);
    model.weights = std::move(W);
    return model;
}

RbfnModel fit_subsampled(std::span<const LabeledFeature> samples, double spread, int num_centers,
                         double ridge)
{
    const int dim = check_samples(samples);
    const int N = static_cast<int>(samples.size());
    if (num_centers >= N || num_centers <= 0)
        return fit_exact(samples, spread, ridge);
    if (!(spread > 0.0))
        raise(Errc::NonPositiveWidth, "spread must be positive");

    const int step = (N + num_centers - 1) / num_centers;
    std::vector<int> picks;
    for (int j = 0; j < N && static_cast<int>(picks.size()) < num_centers; j += step)
        picks.push_back(j);
    const int M = static_cast<int>(picks.size());

    RbfnModel model;
    model.dim = dim;
    model.spread = spread;
    model.class_labels = labels_in_order(samples);
    model.widths.assign(M, spread);
    model.centers.resize(static_cast<std::size_t>(M) * dim);
    for (int i = 0; i < M; ++i)
        std::copy(samples[picks[i]].features.begin(), samples[picks[i]].features.end(),
                  model.centers.begin() + static_cast<std::size_t>(i) * dim);

    const int L = model.classes();
    std::vector<double> G(static_cast<std::size_t>(N) * M);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < M; ++i)
            G[static_cast<std::size_t>(j) * M + i] =
                std::exp(-squared_dist(samples[j].features, model.center(i)) /
                         (2.0 * spread * spread));

    // normal equations: (G^T G + ridge I) W = G^T D
    const std::vector<double> T = one_hot_targets(samples, model.class_labels);
    std::vector<double> A(static_cast<std::size_t>(M) * M, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < M; ++i)
        for (int k = 0; k < M; ++k) {
            double acc = 0.0;
            for (int j = 0; j < N; ++j)
                acc += G[static_cast<std::size_t>(j) * M + i] * G[static_cast<std::size_t>(j) * M + k];
            A[static_cast<std::size_t>(i) * M + k] = acc;
        }
    for (int i = 0; i < M; ++i)
        A[static_cast<std::size_t>(i) * M + i] += ridge;

    std::vector<double> B(static_cast<std::size_t>(M) * L, 0.0);
    for (int i = 0; i < M; ++i)
        for (int l = 0; l < L; ++l) {
            double acc = 0.0;
            for (int j = 0; j < N; ++j)
                acc += G[static_cast<std::size_t>(j) * M + i] * T[static_cast<std::size_t>(j) * L + l];
            B[static_cast<std::size_t>(i) * L + l] = acc;
        }

    cholesky_solve(A, M, B, L);
    model.weights = std::move(B);
    return model;
}

CostGradient cost_gradient(const RbfnModel& model, std::span<const LabeledFeature> samples)
{
    check_samples(samples);
    const std::vector<double> targets = one_hot_targets(samples, model.class_labels);
    GradientScratch scratch;
    return gradient_impl(model, samples, targets, scratch);
}

TrainState train_gradient(RbfnModel& model, std::span<const LabeledFeature> samples,
                          TrainRates rates, int epochs)
{
    check_samples(samples);
    if (!(rates.weights > 0.0) || !(rates.centers > 0.0) || !(rates.widths > 0.0))
        raise(Errc::InvalidArgument, "learning rates must be positive");
    if (epochs < 1)
        raise(Errc::InvalidArgument, "epochs must be >= 1");

    const std::vector<double> targets = one_hot_targets(samples, model.class_labels);
    GradientScratch scratch;

    TrainState state;
    state.rates = rates;
    state.history.reserve(epochs);
    for (int epoch = 1; epoch <= epochs; ++epoch) {
        const CostGradient grad = gradient_impl(model, samples, targets, scratch);
        for (std::size_t i = 0; i < model.weights.size(); ++i)
            model.weights[i] -= rates.weights * grad.weights[i];
        for (std::size_t i = 0; i < model.centers.size(); ++i)
            model.centers[i] -= rates.centers * grad.centers[i];
        for (std::size_t i = 0; i < model.widths.size(); ++i)
            model.widths[i] = std::max(model.widths[i] - rates.widths * grad.widths[i], 1e-8);

        const double cost = mse(model, samples);
        if (!std::isfinite(cost))
            raise(Errc::NonFiniteCost, "training diverged, reduce the learning rates");
        state.epoch = epoch;
        state.mse = cost;
        state.history.push_back(cost);
    }
    return state;
}

std::optional<std::string> classify(const RbfnModel& model, std::span<const double> x,
                                    double reject_threshold)
{
    const std::vector<double> scores = forward(model, x);
    int best = 0;
    for (int l = 1; l < static_cast<int>(scores.size()); ++l)
        if (scores[l] > scores[best])
            best = l;
    if (scores.empty() || scores[best] < reject_threshold)
        return std::nullopt;
    return model.class_labels[best];
}

double mse(const RbfnModel& model, std::span<const LabeledFeature> samples)
{
    if (samples.empty())
        raise(Errc::InvalidArgument, "mse needs at least one sample");
    const int N = static_cast<int>(samples.size());
    const int L = model.classes();
    std::vector<double> per_sample(N, 0.0);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < N; ++j) {
        const std::vector<double> scores = forward(model, samples[j].features);
        const int target = label_index(model.class_labels, samples[j].label);
        double acc = 0.0;
        for (int l = 0; l < L; ++l) {
            const double e = (l == target ? 1.0 : 0.0) - scores[l];
            acc += e * e;
        }
        per_sample[j] = acc;
    }
    double total = 0.0;
    for (double v : per_sample)
        total += v;
    return total / N;
}

// --- persistence ---------------------------------------------------------

namespace {

std::string json_escape(const std::string& s)
{
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out;
}

void write_matrix(std::ostream& out, const std::vector<double>& flat, int rows, int cols)
{
    out << '[';
    for (int r = 0; r < rows; ++r) {
        out << (r ? ",[" : "[");
        for (int c = 0; c < cols; ++c)
            out << (c ? "," : "") << g17(flat[static_cast<std::size_t>(r) * cols + c]);
        out << ']';
    }
    out << ']';
}

} // namespace

void save_model(const RbfnModel& model, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        raise(Errc::IoFailure, "cannot open " + path.string() + " for writing");

    out << "{\n";
    out << "  \"format\": 1,\n";
    out << "  \"spread\": " << g17(model.spread) << ",\n";
    out << "  \"class_labels\": [";
    for (int l = 0; l < model.classes(); ++l)
        out << (l ? "," : "") << '"' << json_escape(model.class_labels[l]) << '"';
    out << "],\n";
    out << "  \"centers\": ";
    write_matrix(out, model.centers, model.units(), model.dim);
    out << ",\n  \"widths\": [";
    for (int i = 0; i < model.units(); ++i)
        out << (i ? "," : "") << g17(model.widths[i]);
    out << "],\n  \"weights\": ";
    write_matrix(out, model.weights, model.units(), model.classes());
    out << "\n}\n";
    if (!out)
        raise(Errc::IoFailure, "short write to " + path.string());
}

RbfnModel load_model(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path))
        raise(Errc::FileNotFound, path.string());
    std::ifstream in(path, std::ios::binary);
    if (!in)
        raise(Errc::IoFailure, "cannot open " + path.string());

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::MalformedModel, std::string("model parse failed: ") + e.what());
    }

    try {
        if (doc.at("format").get<int>() != 1)
            raise(Errc::MalformedModel, "unsupported model format version");

        RbfnModel model;
        model.spread = doc.at("spread").get<double>();
        model.class_labels = doc.at("class_labels").get<std::vector<std::string>>();
        const auto centers = doc.at("centers").get<std::vector<std::vector<double>>>();
        const auto weights = doc.at("weights").get<std::vector<std::vector<double>>>();
        model.widths = doc.at("widths").get<std::vector<double>>();

        const int M = static_cast<int>(centers.size());
        if (M == 0 || static_cast<int>(weights.size()) != M ||
            static_cast<int>(model.widths.size()) != M || model.class_labels.empty())
            raise(Errc::MalformedModel, "inconsistent model arrays");
        model.dim = static_cast<int>(centers[0].size());
        const int L = static_cast<int>(model.class_labels.size());
        for (int i = 0; i < M; ++i) {
            if (static_cast<int>(centers[i].size()) != model.dim ||
                static_cast<int>(weights[i].size()) != L)
                raise(Errc::MalformedModel, "ragged model arrays");
            model.centers.insert(model.centers.end(), centers[i].begin(), centers[i].end());
            model.weights.insert(model.weights.end(), weights[i].begin(), weights[i].end());
        }
        for (double w : model.widths)
            if (!(w > 0.0))
                raise(Errc::MalformedModel, "non-positive width in model");
        return model;
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::MalformedModel, std::string("model fields missing or mistyped: ") + e.what());
    }
}

} // namespace sigkit
