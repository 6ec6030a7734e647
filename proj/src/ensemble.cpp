#include "hullfit/ensemble.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hullfit/kernels.hpp"

namespace hullfit {

ConvexEnsemble::ConvexEnsemble(BasisModule first) {
  atoms_.push_back(std::move(first));
  weights_.push_back(1.0);
}

double ConvexEnsemble::bound() const {
  if (empty()) throw std::logic_error("empty ensemble has no bound");
  return atoms_.front().bound();
}

std::size_t ConvexEnsemble::param_count() const {
  std::size_t total = 0;
  for (const auto& g : atoms_) total += g.param_count();
  return total;
}

void ConvexEnsemble::check_compatible(const BasisModule& g) const {
  if (empty()) return;
  const auto& s0 = atoms_.front().shape();
  const auto& s = g.shape();
  if (s.input_dim != s0.input_dim || s.output_dim != s0.output_dim ||
      s.bound != s0.bound)
    throw std::invalid_argument(
        "atom is incompatible with the ensemble (d, m, B must match)");
}

void ConvexEnsemble::renormalize() {
  const double s = kern::sum(weights_.data(), weights_.size());
  if (!(s > 0.0))
    throw std::logic_error("ensemble weights must have positive sum");
  kern::scale(1.0 / s, weights_.data(), weights_.size());
}

void ConvexEnsemble::predict(std::span<const double> x,
                             std::span<double> out) const {
  if (empty()) throw std::logic_error("predict on empty ensemble");
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> tmp(out.size());
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    atoms_[i].forward(x, tmp);
    kern::axpy(weights_[i], tmp.data(), out.data(), out.size());
  }
}

std::vector<double> ConvexEnsemble::predict(std::span<const double> x) const {
  std::vector<double> out(atoms_.front().shape().output_dim);
  predict(x, out);
  return out;
}

Matrix ConvexEnsemble::predict_batch(const Matrix& X) const {
  if (empty()) throw std::logic_error("predict on empty ensemble");
  const std::size_t m = atoms_.front().shape().output_dim;
  Matrix out(X.rows(), m);
  Matrix tmp(X.rows(), m);
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    atoms_[i].forward_batch(X, tmp);
    kern::axpy(weights_[i], tmp.data(), out.data(), out.size());
  }
  return out;
}

void ConvexEnsemble::add_blend(BasisModule g, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("blend step alpha must lie in [0, 1]");
  check_compatible(g);
  if (empty()) {
    if (alpha != 1.0)
      throw std::invalid_argument("first atom must be added with alpha = 1");
    atoms_.push_back(std::move(g));
    weights_.push_back(1.0);
    return;
  }
  kern::scale(1.0 - alpha, weights_.data(), weights_.size());
  atoms_.push_back(std::move(g));
  weights_.push_back(alpha);
  renormalize();
}

void ConvexEnsemble::add_blend_existing(std::size_t index, double alpha) {
  if (index >= atoms_.size())
    throw std::invalid_argument("add_blend_existing: bad atom index");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("blend step alpha must lie in [0, 1]");
  kern::scale(1.0 - alpha, weights_.data(), weights_.size());
  weights_[index] += alpha;
  renormalize();
}

void ConvexEnsemble::away_reweight(std::size_t a, double gamma) {
  if (a >= atoms_.size())
    throw std::invalid_argument("away_reweight: bad atom index");
  if (gamma < 0.0) throw std::invalid_argument("away step gamma must be >= 0");
  const double wa = weights_[a];
  if (wa >= 1.0)
    throw std::invalid_argument(
        "away step is infeasible when the atom carries all the weight");
  const double cap = wa / (1.0 - wa);
  if (gamma > cap * (1.0 + 1e-12))
    throw std::invalid_argument("away step gamma exceeds the cap w/(1-w)");
  kern::scale(1.0 + gamma, weights_.data(), weights_.size());
  weights_[a] = wa - gamma * (1.0 - wa);
  if (weights_[a] < 0.0) weights_[a] = 0.0;  // cap rounding
  renormalize();
}

void ConvexEnsemble::pairwise_swap(std::size_t a, BasisModule g,
                                   double gamma) {
  if (a >= atoms_.size())
    throw std::invalid_argument("pairwise_swap: bad atom index");
  check_compatible(g);
  if (gamma < 0.0 || gamma > weights_[a] * (1.0 + 1e-12))
    throw std::invalid_argument("pairwise step gamma must lie in [0, w_a]");
  weights_[a] = std::max(weights_[a] - gamma, 0.0);
  atoms_.push_back(std::move(g));
  weights_.push_back(gamma);
  renormalize();
}

void ConvexEnsemble::pairwise_swap(std::size_t a, std::size_t g_index,
                                   double gamma) {
  if (a >= atoms_.size() || g_index >= atoms_.size())
    throw std::invalid_argument("pairwise_swap: bad atom index");
  if (gamma < 0.0 || gamma > weights_[a] * (1.0 + 1e-12))
    throw std::invalid_argument("pairwise step gamma must lie in [0, w_a]");
  if (a == g_index) return;
  weights_[a] = std::max(weights_[a] - gamma, 0.0);
  weights_[g_index] += gamma;
  renormalize();
}

std::vector<std::size_t> ConvexEnsemble::prune(double eps) {
  if (eps < 0.0) throw std::invalid_argument("prune eps must be >= 0");
  std::vector<std::size_t> kept;
  std::vector<BasisModule> atoms;
  std::vector<double> weights;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (weights_[i] > eps) {
      kept.push_back(i);
      atoms.push_back(std::move(atoms_[i]));
      weights.push_back(weights_[i]);
    }
  }
  if (kept.empty())
    throw std::invalid_argument("prune would remove every atom");
  atoms_ = std::move(atoms);
  weights_ = std::move(weights);
  renormalize();
  return kept;
}

ConvexEnsemble ConvexEnsemble::from_parts(std::vector<BasisModule> atoms,
                                          std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size())
    throw std::invalid_argument("ensemble needs one weight per atom");
  ConvexEnsemble f;
  f.atoms_ = std::move(atoms);
  f.weights_ = std::move(weights);
  for (const auto& g : f.atoms_) f.check_compatible(g);
  double s = 0.0;
  for (double w : f.weights_) {
    if (w < 0.0) throw std::invalid_argument("ensemble weights must be >= 0");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-9)
    throw std::invalid_argument("ensemble weights must sum to 1");
  f.renormalize();
  return f;
}

}  // namespace hullfit
