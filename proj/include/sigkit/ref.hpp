#pragma once

#include <span>
#include <vector>

#include "sigkit/features.hpp"
#include "sigkit/image.hpp"
#include "sigkit/rbfn.hpp"

// Serial reference implementations. Each one is the straightforward
// direct-form evaluation of the operation it mirrors, written without the
// separable/parallel structure of the production kernels. The tests use them
// as independent oracles and the benchmark uses them as the baseline.
namespace sigkit::ref {

/// Plain serial bilinear rotation, same geometry as sigkit::rotate.
GrayImage rotate(const GrayImage& img, double angle_deg);

/// Plain serial bilinear resampling, same geometry as sigkit::resize.
GrayImage resize(const GrayImage& img, int new_width, int new_height);

/// Literal double-sum correlation coefficient over an m x n grid.
double ncc(const GrayImage& p, const GrayImage& q);
double ncc_real(std::span<const double> p, std::span<const double> q);

/// Literal O(N^4) evaluation of the orthonormal 2D DCT-II definition:
/// every coefficient from its full double sum.
DctCoeffs dct2_direct(const RealImage& img);
RealImage idct2_direct(const DctCoeffs& coeffs);

/// Nested-loop sum over hidden units for one input vector.
std::vector<double> rbfn_forward(const RbfnModel& model, std::span<const double> x);

/// Half the summed squared error over all samples and outputs.
double rbfn_cost(const RbfnModel& model, std::span<const LabeledFeature> samples);

/// Mean squared error, direct double loop.
double rbfn_mse(const RbfnModel& model, std::span<const LabeledFeature> samples);

/// Serial sample-by-unit Gaussian response matrix (N x M row-major).
std::vector<double> rbfn_responses(const RbfnModel& model,
                                   std::span<const LabeledFeature> samples);

} // namespace sigkit::ref
