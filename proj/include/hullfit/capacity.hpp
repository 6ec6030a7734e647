#pragma once
// Capacity experiments: explicit shattering constructions over linear
// threshold units on the circle, a Monte-Carlo estimator of empirical
// Rademacher complexity, and the generalization-bound constant evaluator.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hullfit/matrix.hpp"
#include "hullfit/rng.hpp"

namespace hullfit::capacity {

// x -> indicator(theta . x >= t)
struct ThresholdUnit {
  std::vector<double> theta;
  double t = 0.0;

  double eval(std::span<const double> x) const;
};

// A (linear or convex) combination of threshold units together with the
// decision threshold that binarizes it.
struct ThresholdCombo {
  std::vector<ThresholdUnit> units;
  std::vector<double> weights;
  double decision_threshold = 0.0;

  double value(std::span<const double> x) const;
  int decide(std::span<const double> x) const;
};

// k points equally spaced on the unit circle (d = 2).
std::vector<std::array<double, 2>> circle_points(std::size_t k);

// Linear combination realizing the given 0/1 labels on the circle points:
// unit i is theta_i = x_i with threshold its own self-product, weight
// w_i = y_i, decided at 1. Throws when k is so large that adjacent points
// are no longer separable in double precision.
ThresholdCombo shatter_linear(std::size_t k, std::span<const int> labels);

// Convex combination over k + 1 units (including the always-zero unit)
// realizing the labels when thresholded at 1 / (k + 1). Weights lie on the
// simplex.
ThresholdCombo shatter_convex(std::size_t k, std::span<const int> labels);

// Evaluates combo.decide on each circle point; true iff outputs == labels.
bool verify_shatter(const ThresholdCombo& combo, std::size_t k,
                    std::span<const int> labels);

// Monte-Carlo estimate of sup_f (1/n) sum_i eps_i f(x_i) averaged over
// `draws` Rademacher vectors; fn_values holds one sampled function per row,
// evaluated on the n sample points. Deterministic given the seed.
double empirical_rademacher(const Matrix& fn_values, std::size_t draws,
                            std::uint64_t seed);

// Sampler variant: `sampler` fills one function's values per call.
using FnSampler = std::function<void(Rng&, std::span<double>)>;
double empirical_rademacher(const FnSampler& sampler, std::size_t num_functions,
                            std::size_t n, std::size_t draws,
                            std::uint64_t seed);

// Samples of linear / convex combinations of random threshold units,
// evaluated on a shared random point set. The lin sampler scales its weights
// by `scale`; the conv sampler normalizes onto the simplex, where any
// rescaling of the raw weights cancels, so `scale` does not enter.
Matrix sample_lin_class(std::size_t num_functions, std::size_t n,
                        std::size_t dim, std::size_t units_per_fn,
                        double scale, std::uint64_t seed);
Matrix sample_conv_class(std::size_t num_functions, std::size_t n,
                         std::size_t dim, std::size_t units_per_fn,
                         double scale, std::uint64_t seed);

// (2 c_phi B (sqrt(2 ln(1/delta)) + D sqrt(p) + 2)) / sqrt(n)
double bound_constant(double c_phi, double B, double delta, double p,
                      std::size_t n, double D);

}  // namespace hullfit::capacity
