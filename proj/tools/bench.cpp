// Benchmark comparing the OpenMP kernels against the serial reference
// implementations. Sizes are chosen so each row takes a fraction of a second.

#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "sigkit/dataset.hpp"
#include "sigkit/features.hpp"
#include "sigkit/rbfn.hpp"
#include "sigkit/ref.hpp"
#include "sigkit/rng.hpp"
#include "sigkit/rst.hpp"

using namespace sigkit;

namespace {

double time_of(const std::function<void()>& fn, int reps)
{
    using clock = std::chrono::steady_clock;
    fn(); // warm-up
    const auto t0 = clock::now();
    for (int r = 0; r < reps; ++r)
        fn();
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count() / reps;
}

void report(const char* name, double serial_ms, double parallel_ms)
{
    std::printf("%-28s %10.2f ms %12.2f ms %8.2fx\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

} // namespace

int main()
{
    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-28s %13s %15s %9s\n", "kernel", "serial", "parallel", "speedup");

    Rng rng(42);
    GrayImage big(1024, 512);
    for (auto& p : big.pixels)
        p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));

    report("rotate 1024x512 by 17 deg",
           time_of([&] { ref::rotate(big, 17.0); }, 5),
           time_of([&] { rotate(big, 17.0); }, 5));

    report("resize 1024x512 -> 640x480",
           time_of([&] { ref::resize(big, 640, 480); }, 5),
           time_of([&] { resize(big, 640, 480); }, 5));

    RealImage frame(kAnalysisSize, kAnalysisSize);
    for (auto& v : frame.values)
        v = rng.uniform(0.0, 255.0);
    report("dct 64x64 (direct vs sep.)",
           time_of([&] { ref::dct2_direct(frame); }, 3),
           time_of([&] { dct2(frame); }, 3));

    // batch responses: 200 samples against 200 units in feature space
    std::vector<LabeledFeature> samples(200);
    for (auto& s : samples) {
        s.features.resize(kFeatureDim);
        for (auto& v : s.features)
            v = rng.uniform(0.0, 1.0);
        s.label = "x";
    }
    RbfnModel model;
    model.dim = kFeatureDim;
    model.class_labels = {"x", "y"};
    for (int i = 0; i < 200; ++i) {
        for (int d = 0; d < kFeatureDim; ++d)
            model.centers.push_back(rng.uniform(0.0, 1.0));
        model.widths.push_back(0.5);
        model.weights.push_back(rng.uniform(-1.0, 1.0));
        model.weights.push_back(rng.uniform(-1.0, 1.0));
    }
    report("network cost 200x200x64",
           time_of([&] { ref::rbfn_mse(model, samples); }, 5),
           time_of([&] { mse(model, samples); }, 5));

    // whole correction pipeline, single thread vs all threads
    SyntheticSpec spec;
    spec.subject_seed = 7;
    spec.stroke_count = 4;
    const GrayImage reference = generate_signature(spec);
    const GrayImage probe = distort(reference, 25.0, 1.2, 10, 10, 3.0, 9);
    const int threads = omp_get_max_threads();
    omp_set_num_threads(1);
    const double serial_rst = time_of([&] { correct_rst(reference, probe); }, 3);
    omp_set_num_threads(threads);
    const double parallel_rst = time_of([&] { correct_rst(reference, probe); }, 3);
    report("correction pipeline (1 vs N)", serial_rst, parallel_rst);

    return 0;
}
