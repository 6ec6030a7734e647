#include "hullfit/capacity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hullfit/kernels.hpp"

namespace hullfit::capacity {

double ThresholdUnit::eval(std::span<const double> x) const {
  if (x.size() != theta.size())
    throw std::invalid_argument("threshold unit: dimension mismatch");
  return kern::dot(theta.data(), x.data(), x.size()) >= t ? 1.0 : 0.0;
}

double ThresholdCombo::value(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < units.size(); ++i)
    s += weights[i] * units[i].eval(x);
  return s;
}

int ThresholdCombo::decide(std::span<const double> x) const {
  return value(x) >= decision_threshold ? 1 : 0;
}

std::vector<std::array<double, 2>> circle_points(std::size_t k) {
  if (k == 0) throw std::invalid_argument("need k >= 1 circle points");
  constexpr double two_pi = 6.283185307179586476925286766559;
  // Adjacent points must stay separable from the self-product in doubles.
  if (k > 1 && std::cos(two_pi / static_cast<double>(k)) >= 1.0 - 1e-9)
    throw std::invalid_argument("k too large for the circle construction");
  std::vector<std::array<double, 2>> pts(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double a = two_pi * static_cast<double>(j) / static_cast<double>(k);
    pts[j] = {std::cos(a), std::sin(a)};
  }
  return pts;
}

namespace {

void check_labels(std::size_t k, std::span<const int> labels) {
  if (labels.size() != k)
    throw std::invalid_argument("need one label per point");
  for (int y : labels)
    if (y != 0 && y != 1)
      throw std::invalid_argument("labels must be 0 or 1");
}

// Unit i fires on x_i and on no other circle point: the threshold is the
// point's own self-product computed with the evaluator's arithmetic, so the
// i = j comparison is bitwise reproducible, while cross-products are below
// cos(2 pi / k) and clear the guard band.
std::vector<ThresholdUnit> circle_units(
    const std::vector<std::array<double, 2>>& pts) {
  std::vector<ThresholdUnit> units(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    units[i].theta = {pts[i][0], pts[i][1]};
    units[i].t = kern::dot(units[i].theta.data(), pts[i].data(), 2);
  }
  return units;
}

}  // namespace

ThresholdCombo shatter_linear(std::size_t k, std::span<const int> labels) {
  check_labels(k, labels);
  const auto pts = circle_points(k);
  ThresholdCombo combo;
  combo.units = circle_units(pts);
  combo.weights.resize(k);
  for (std::size_t i = 0; i < k; ++i)
    combo.weights[i] = static_cast<double>(labels[i]);
  combo.decision_threshold = 1.0;
  if (!verify_shatter(combo, k, labels))
    throw std::logic_error("linear shattering construction failed to verify");
  return combo;
}

ThresholdCombo shatter_convex(std::size_t k, std::span<const int> labels) {
  check_labels(k, labels);
  const auto pts = circle_points(k);
  ThresholdCombo combo;
  combo.units.push_back(ThresholdUnit{{0.0, 0.0}, 0.5});  // always zero
  for (auto& u : circle_units(pts)) combo.units.push_back(std::move(u));

  int label_sum = 0;
  for (int y : labels) label_sum += y;
  const double denom = 1.0 + static_cast<double>(label_sum);
  combo.weights.resize(k + 1);
  combo.weights[0] = 1.0 / denom;
  for (std::size_t i = 0; i < k; ++i)
    combo.weights[i + 1] = static_cast<double>(labels[i]) / denom;
  combo.decision_threshold = 1.0 / static_cast<double>(k + 1);
  if (!verify_shatter(combo, k, labels))
    throw std::logic_error("convex shattering construction failed to verify");
  return combo;
}

bool verify_shatter(const ThresholdCombo& combo, std::size_t k,
                    std::span<const int> labels) {
  check_labels(k, labels);
  const auto pts = circle_points(k);
  for (std::size_t j = 0; j < k; ++j)
    if (combo.decide(pts[j]) != labels[j]) return false;
  return true;
}

double empirical_rademacher(const Matrix& fn_values, std::size_t draws,
                            std::uint64_t seed) {
  const std::size_t num_fns = fn_values.rows();
  const std::size_t n = fn_values.cols();
  if (num_fns == 0 || n == 0)
    throw std::invalid_argument("rademacher estimate needs a nonempty class");
  if (draws == 0) throw std::invalid_argument("need at least one draw");

  Rng rng(seed);
  std::vector<double> eps(n);
  double acc = 0.0;
  for (std::size_t r = 0; r < draws; ++r) {
    for (double& e : eps) e = rng.sign();
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < num_fns; ++f) {
      const double corr =
          kern::dot(eps.data(), fn_values.row(f).data(), n) /
          static_cast<double>(n);
      best = std::max(best, corr);
    }
    acc += best;
  }
  return acc / static_cast<double>(draws);
}

double empirical_rademacher(const FnSampler& sampler,
                            std::size_t num_functions, std::size_t n,
                            std::size_t draws, std::uint64_t seed) {
  if (num_functions == 0)
    throw std::invalid_argument("rademacher estimate needs a nonempty class");
  Rng rng(seed);
  Rng fn_rng = rng.child(1);
  Rng eps_rng = rng.child(2);
  Matrix values(num_functions, n);
  for (std::size_t f = 0; f < num_functions; ++f)
    sampler(fn_rng, values.row(f));
  // Reuse the matrix path with the eps stream's own seed.
  std::vector<double> eps(n);
  double acc = 0.0;
  if (draws == 0) throw std::invalid_argument("need at least one draw");
  for (std::size_t r = 0; r < draws; ++r) {
    for (double& e : eps) e = eps_rng.sign();
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < num_functions; ++f)
      best = std::max(best, kern::dot(eps.data(), values.row(f).data(), n) /
                                static_cast<double>(n));
    acc += best;
  }
  return acc / static_cast<double>(draws);
}

namespace {

// Shared point set + unit sampling for the lin/conv class samplers.
Matrix sample_points(std::size_t n, std::size_t dim, Rng& rng) {
  Matrix X(n, dim);
  for (std::size_t i = 0; i < X.size(); ++i) X.data()[i] = rng.normal();
  return X;
}

ThresholdUnit sample_unit(std::size_t dim, Rng& rng) {
  ThresholdUnit u;
  u.theta.resize(dim);
  for (double& w : u.theta) w = rng.normal();
  u.t = rng.normal();
  return u;
}

}  // namespace

Matrix sample_lin_class(std::size_t num_functions, std::size_t n,
                        std::size_t dim, std::size_t units_per_fn,
                        double scale, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix X = sample_points(n, dim, rng);
  Matrix values(num_functions, n);
  // First row: the zero function (weights all zero), a member of lin(T).
  for (std::size_t f = 1; f < num_functions; ++f) {
    std::vector<ThresholdUnit> units;
    std::vector<double> w;
    for (std::size_t u = 0; u < units_per_fn; ++u) {
      units.push_back(sample_unit(dim, rng));
      w.push_back(scale * rng.uniform(-1.0, 1.0));
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t u = 0; u < units_per_fn; ++u)
        s += w[u] * units[u].eval(X.row(i));
      values(f, i) = s;
    }
  }
  return values;
}

Matrix sample_conv_class(std::size_t num_functions, std::size_t n,
                         std::size_t dim, std::size_t units_per_fn,
                         double scale, std::uint64_t seed) {
  if (!(scale > 0.0))
    throw std::invalid_argument("conv sampler scale must be positive");
  // scale * u_i / (scale * sum u_j) = u_i / sum u_j: rescaling the raw
  // mixing weights cancels in the normalization, so it never enters.
  (void)scale;
  Rng rng(seed);
  const Matrix X = sample_points(n, dim, rng);
  Matrix values(num_functions, n);
  // First row: the always-zero unit alone (the zero function is in conv(T)).
  for (std::size_t f = 1; f < num_functions; ++f) {
    std::vector<ThresholdUnit> units;
    std::vector<double> w;
    double total = 0.0;
    for (std::size_t u = 0; u < units_per_fn; ++u) {
      units.push_back(sample_unit(dim, rng));
      w.push_back(rng.uniform());
      total += w.back();
    }
    for (double& wi : w) wi /= total;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t u = 0; u < units_per_fn; ++u)
        s += w[u] * units[u].eval(X.row(i));
      values(f, i) = s;
    }
  }
  return values;
}

double bound_constant(double c_phi, double B, double delta, double p,
                      std::size_t n, double D) {
  if (!(c_phi > 0.0) || !(B > 0.0) || !(p > 0.0) || !(D > 0.0) || n == 0)
    throw std::invalid_argument("bound_constant: inputs must be positive");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("bound_constant: delta must be in (0, 1)");
  const double c =
      2.0 * c_phi * B * (std::sqrt(2.0 * std::log(1.0 / delta)) +
                         D * std::sqrt(p) + 2.0);
  return c / std::sqrt(static_cast<double>(n));
}

}  // namespace hullfit::capacity
