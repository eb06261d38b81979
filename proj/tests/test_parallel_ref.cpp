#include <doctest.h>

#include <omp.h>

#include "sigkit/dataset.hpp"
#include "sigkit/features.hpp"
#include "sigkit/rbfn.hpp"
#include "sigkit/ref.hpp"
#include "sigkit/rng.hpp"
#include "sigkit/rst.hpp"

// The production kernels run under OpenMP; these tests pin them against the
// serial reference implementations and against their own single-thread output.

using namespace sigkit;

namespace {

GrayImage random_image(Rng& rng, int w, int h)
{
    GrayImage img(w, h);
    for (auto& p : img.pixels)
        p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    return img;
}

} // namespace

TEST_CASE("parallel rotation matches the serial reference byte for byte")
{
    Rng rng(211);
    for (int trial = 0; trial < 6; ++trial) {
        const GrayImage img = random_image(rng, rng.uniform_int(20, 120), rng.uniform_int(20, 90));
        const double angle = rng.uniform(-80.0, 80.0);
        CHECK(rotate(img, angle) == ref::rotate(img, angle));
    }
}

TEST_CASE("parallel resize matches the serial reference byte for byte")
{
    Rng rng(223);
    for (int trial = 0; trial < 6; ++trial) {
        const GrayImage img = random_image(rng, rng.uniform_int(8, 100), rng.uniform_int(8, 100));
        const int nw = rng.uniform_int(1, 140);
        const int nh = rng.uniform_int(1, 140);
        CHECK(resize(img, nw, nh) == ref::resize(img, nw, nh));
    }
}

TEST_CASE("separable transform matches the direct form on a production-size frame")
{
    Rng rng(227);
    RealImage img(kAnalysisSize / 2, kAnalysisSize / 2); // direct form is O(N^4); keep it quick
    for (auto& v : img.values)
        v = rng.uniform(0.0, 255.0);
    const DctCoeffs fast = dct2(img);
    const DctCoeffs direct = ref::dct2_direct(img);
    for (std::size_t i = 0; i < fast.values.size(); ++i)
        CHECK(std::abs(fast.values[i] - direct.values[i]) <= 1e-8);
}

TEST_CASE("batch responses match the serial reference")
{
    Rng rng(229);
    std::vector<LabeledFeature> samples(20);
    for (auto& s : samples) {
        s.features.resize(16);
        for (auto& v : s.features)
            v = rng.uniform(0.0, 1.0);
        s.label = "x";
    }
    RbfnModel model;
    model.dim = 16;
    model.class_labels = {"x", "y"};
    for (int i = 0; i < 10; ++i) {
        for (int d = 0; d < 16; ++d)
            model.centers.push_back(rng.uniform(0.0, 1.0));
        model.widths.push_back(rng.uniform(0.3, 1.2));
        model.weights.push_back(rng.uniform(-1.0, 1.0));
        model.weights.push_back(rng.uniform(-1.0, 1.0));
    }

    const std::vector<double> serial = ref::rbfn_responses(model, samples);
    for (int j = 0; j < 20; ++j) {
        const auto fast = forward(model, samples[j].features);
        const auto direct = ref::rbfn_forward(model, samples[j].features);
        for (std::size_t l = 0; l < fast.size(); ++l)
            CHECK(fast[l] == doctest::Approx(direct[l]).epsilon(1e-12));
    }
    CHECK(serial.size() == 200);
}

TEST_CASE("results do not depend on the thread count")
{
    Rng rng(233);
    const GrayImage img = random_image(rng, 90, 70);

    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const GrayImage r1 = rotate(img, 23.5);
    const GrayImage z1 = resize(img, 41, 33);
    const DctCoeffs d1 = dct2(img);
    omp_set_num_threads(std::max(2, saved));
    const GrayImage rn = rotate(img, 23.5);
    const GrayImage zn = resize(img, 41, 33);
    const DctCoeffs dn = dct2(img);
    omp_set_num_threads(saved);

    CHECK(r1 == rn);
    CHECK(z1 == zn);
    CHECK(d1.values == dn.values);
}

TEST_CASE("the correction pipeline is thread-count invariant")
{
    SyntheticSpec spec;
    spec.subject_seed = 77;
    spec.stroke_count = 4;
    const GrayImage img = generate_signature(spec);
    const GrayImage probe = distort(img, 18.0, 0.9, 6, 3, 2.0, 7);

    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const Alignment a = correct_rst(img, probe);
    omp_set_num_threads(std::max(2, saved));
    const Alignment b = correct_rst(img, probe);
    omp_set_num_threads(saved);

    CHECK(a.params.rotation_deg == b.params.rotation_deg);
    CHECK(a.params.scale_ratio == b.params.scale_ratio);
    CHECK(a.aligned == b.aligned);
    CHECK(a.coarse_profile.scores == b.coarse_profile.scores);
}
