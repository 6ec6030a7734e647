#pragma once
// Convex combination of basis modules: prediction plus the weight moves the
// greedy trainers use (blend in a new atom, away-step reweight, pairwise
// transfer, prune). Weights are renormalized after every move so the simplex
// invariant survives long runs.

#include <span>
#include <vector>

#include "hullfit/basis.hpp"
#include "hullfit/matrix.hpp"

namespace hullfit {

class ConvexEnsemble {
 public:
  ConvexEnsemble() = default;
  explicit ConvexEnsemble(BasisModule first);

  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  const std::vector<BasisModule>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  const BasisModule& atom(std::size_t i) const { return atoms_.at(i); }
  double weight(std::size_t i) const { return weights_.at(i); }
  double bound() const;
  std::size_t param_count() const;

  void predict(std::span<const double> x, std::span<double> out) const;
  std::vector<double> predict(std::span<const double> x) const;
  Matrix predict_batch(const Matrix& X) const;

  // f <- (1 - alpha) f + alpha g, g appended as a new atom.
  void add_blend(BasisModule g, double alpha);
  // Same move with g an existing atom: no duplicate copy is stored.
  void add_blend_existing(std::size_t index, double alpha);

  // f <- (1 + gamma) f - gamma atom[a]; gamma in [0, w_a / (1 - w_a)].
  void away_reweight(std::size_t a, double gamma);

  // Moves gamma of weight from atom a onto g; gamma in [0, w_a].
  void pairwise_swap(std::size_t a, BasisModule g, double gamma);
  void pairwise_swap(std::size_t a, std::size_t g_index, double gamma);

  // Drops atoms with weight <= eps and renormalizes. Returns the surviving
  // original indices in order. Throws if nothing survives.
  std::vector<std::size_t> prune(double eps);

  // Used by deserialization; validates the simplex invariant.
  static ConvexEnsemble from_parts(std::vector<BasisModule> atoms,
                                   std::vector<double> weights);

 private:
  void check_compatible(const BasisModule& g) const;
  void renormalize();

  std::vector<BasisModule> atoms_;
  std::vector<double> weights_;
};

}  // namespace hullfit
