#pragma once
// Non-greedy trainer: k basis modules and their convex coefficients are
// optimized jointly. The coefficients are an unconstrained vector v mapped
// onto the simplex by alpha_i = (1/k + |v_i|) / (1 + sum_j |v_j|), which
// keeps every weight strictly positive and the sum exactly one.

#include <cstdint>
#include <span>
#include <vector>

#include "hullfit/dataset.hpp"
#include "hullfit/ensemble.hpp"
#include "hullfit/greedy.hpp"
#include "hullfit/loss.hpp"
#include "hullfit/optimizer.hpp"

namespace hullfit {

// alpha_i = (1/k + |v_i|) / (1 + sum |v_j|)
std::vector<double> weights_from(std::span<const double> v);

// Chain rule through weights_from; |.| takes subgradient 0 at v_i = 0.
void grad_v(std::span<const double> v, std::span<const double> upstream_alpha,
            std::span<double> dv);

struct NgceConfig {
  std::size_t k = 10;
  ModuleShape shape;  // input/output dims filled in from the data
  LossSpec loss = LossSpec::quadratic(10.0);
  AdamConfig adam;
  PlateauSchedule schedule;
  double l2 = 0.0;  // penalty on module parameters only, not on v
  std::uint64_t seed = 0;
};

struct NgceResult {
  ConvexEnsemble ensemble;
  std::vector<double> v;
  double train_loss = 0.0;
  double module_param_norm_sq = 0.0;
  std::vector<EpochRecord> trace;
};

NgceResult train_ngce(const NgceConfig& cfg, const Dataset& train);

}  // namespace hullfit
