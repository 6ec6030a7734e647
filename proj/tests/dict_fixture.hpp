#pragma once
// Fixed-dictionary quadratic test instance plus an independent
// projected-gradient-on-the-simplex oracle. The oracle is used to certify
// the Frank-Wolfe style trainers and stays free of any trainer code.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hullfit/dataset.hpp"
#include "hullfit/ensemble.hpp"
#include "hullfit/greedy.hpp"
#include "hullfit/rng.hpp"

namespace testutil {

struct DictInstance {
  hullfit::Dataset data;                    // regression targets
  std::vector<hullfit::BasisModule> atoms;  // the dictionary
  std::vector<std::vector<double>> outputs; // atom outputs on the data (n each)
};

// n samples in dim d, `num_atoms` bounded modules, targets from an interior
// point of the simplex plus optional noise. With `coordinate_atoms`, atom j
// only reads input coordinate j mod d, which keeps the atoms' outputs nearly
// uncorrelated and the instance well conditioned.
inline DictInstance make_dict_instance(std::size_t n, std::size_t d,
                                       std::size_t num_atoms,
                                       std::uint64_t seed,
                                       double noise_sd = 0.05,
                                       bool coordinate_atoms = false) {
  using namespace hullfit;
  DictInstance inst;
  Rng rng(seed);
  const ModuleShape shape{d, 2, 1, 5.0};
  for (std::size_t j = 0; j < num_atoms; ++j) {
    BasisModule g = init_module(rng.raw(), shape);
    if (coordinate_atoms) {
      std::fill(g.w1().begin(), g.w1().end(), 0.0);
      for (std::size_t h = 0; h < shape.hidden; ++h)
        g.w1()[h * d + (j % d)] = rng.uniform(0.5, 2.0) * rng.sign();
    } else {
      for (double& w : g.w1()) w *= 3.0;
    }
    for (double& b : g.b1()) b = rng.uniform(-1.0, 1.0);
    for (double& w : g.w2()) w *= 3.0;
    inst.atoms.push_back(std::move(g));
  }

  inst.data.task = Task::regression;
  inst.data.features = Matrix(n, d);
  for (std::size_t i = 0; i < inst.data.features.size(); ++i)
    inst.data.features.data()[i] = rng.normal();

  inst.outputs.assign(num_atoms, std::vector<double>(n));
  for (std::size_t j = 0; j < num_atoms; ++j)
    for (std::size_t i = 0; i < n; ++i)
      inst.outputs[j][i] =
          inst.atoms[j].forward(inst.data.features.row(i))[0];

  std::vector<double> w(num_atoms);
  double total = 0.0;
  for (double& wi : w) {
    wi = rng.uniform(0.2, 1.0);
    total += wi;
  }
  for (double& wi : w) wi /= total;

  inst.data.targets.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < num_atoms; ++j)
      inst.data.targets[i] += w[j] * inst.outputs[j][i];
    if (noise_sd > 0.0) inst.data.targets[i] += noise_sd * rng.normal();
  }
  return inst;
}

// Euclidean projection onto the probability simplex (sort-based).
inline std::vector<double> project_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, tau = 0.0;
  int rho = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      rho = static_cast<int>(i + 1);
      tau = t;
    }
  }
  (void)rho;
  for (double& x : v) x = std::max(x - tau, 0.0);
  return v;
}

// mean_i (sum_j w_j G_j(i) - y_i)^2 and its gradient in w.
struct SimplexQuadratic {
  const DictInstance& inst;

  double value(const std::vector<double>& w) const {
    const std::size_t n = inst.data.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double p = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j)
        p += w[j] * inst.outputs[j][i];
      const double e = p - inst.data.targets[i];
      total += e * e;
    }
    return total / static_cast<double>(n);
  }

  std::vector<double> gradient(const std::vector<double>& w) const {
    const std::size_t n = inst.data.size();
    std::vector<double> g(w.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double p = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j)
        p += w[j] * inst.outputs[j][i];
      const double e = 2.0 * (p - inst.data.targets[i]);
      for (std::size_t j = 0; j < w.size(); ++j)
        g[j] += e * inst.outputs[j][i];
    }
    for (double& x : g) x /= static_cast<double>(n);
    return g;
  }

  // Frank-Wolfe duality gap at w: an upper bound on value(w) - value(w*).
  double duality_gap(const std::vector<double>& w) const {
    const std::vector<double> g = gradient(w);
    const double gw =
        std::inner_product(g.begin(), g.end(), w.begin(), 0.0);
    const double gmin = *std::min_element(g.begin(), g.end());
    return gw - gmin;
  }
};

// Projected gradient to duality gap <= tol; returns the optimal weights.
inline std::vector<double> simplex_oracle(const DictInstance& inst, double tol,
                                          std::size_t max_iter = 500000) {
  SimplexQuadratic prob{inst};
  const std::size_t k = inst.atoms.size();
  const std::size_t n = inst.data.size();

  // Hessian H = (2/n) G^T G; its largest eigenvalue (power iteration) sets
  // the step size 1/L.
  std::vector<double> H(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        s += inst.outputs[a][i] * inst.outputs[b][i];
      H[a * k + b] = H[b * k + a] = 2.0 * s / static_cast<double>(n);
    }
  std::vector<double> u(k, 1.0), Hu(k);
  double lambda = 1.0;
  for (int it = 0; it < 200; ++it) {
    for (std::size_t a = 0; a < k; ++a) {
      double s = 0.0;
      for (std::size_t b = 0; b < k; ++b) s += H[a * k + b] * u[b];
      Hu[a] = s;
    }
    lambda = std::sqrt(
        std::inner_product(Hu.begin(), Hu.end(), Hu.begin(), 0.0));
    if (lambda <= 0.0) break;
    for (std::size_t a = 0; a < k; ++a) u[a] = Hu[a] / lambda;
  }
  const double step = lambda > 0.0 ? 1.0 / (1.05 * lambda) : 1.0;

  std::vector<double> w(k, 1.0 / static_cast<double>(k));
  for (std::size_t it = 0; it < max_iter; ++it) {
    const std::vector<double> g = prob.gradient(w);
    const double gw = std::inner_product(g.begin(), g.end(), w.begin(), 0.0);
    const double gmin = *std::min_element(g.begin(), g.end());
    if (gw - gmin <= tol) break;
    for (std::size_t j = 0; j < k; ++j) w[j] -= step * g[j];
    w = project_simplex(std::move(w));
  }
  return w;
}

}  // namespace testutil
