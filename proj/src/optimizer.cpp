#include "hullfit/optimizer.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hullfit/kernels.hpp"
#include "hullfit/rng.hpp"

namespace hullfit {

AdamState::AdamState(std::size_t n, const AdamConfig& cfg)
    : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

void AdamState::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw std::invalid_argument("adam step: length mismatch");
  for (double g : grad)
    if (!std::isfinite(g))
      throw std::runtime_error("adam step: non-finite gradient (divergence)");
  ++t_;
  const double inv_bc1 =
      1.0 / (1.0 - std::pow(cfg_.beta1, static_cast<double>(t_)));
  const double inv_bc2 =
      1.0 / (1.0 - std::pow(cfg_.beta2, static_cast<double>(t_)));
  kern::adam_update(params.data(), m_.data(), v_.data(), grad.data(),
                    params.size(), cfg_.lr, cfg_.beta1, cfg_.beta2, cfg_.eps,
                    inv_bc1, inv_bc2);
}

double BatchObjective::full_value(std::span<const double> params) const {
  std::vector<std::uint32_t> all(sample_count());
  std::iota(all.begin(), all.end(), 0u);
  std::vector<double> scratch(param_count(), 0.0);
  return batch_value_grad(all, params, scratch);
}

FitResult run_epochs(const BatchObjective& objective,
                     std::span<const double> init, const AdamConfig& adam,
                     const PlateauSchedule& schedule, std::uint64_t seed) {
  const std::size_t n = objective.sample_count();
  const std::size_t p = objective.param_count();
  if (init.size() != p)
    throw std::invalid_argument("run_epochs: bad initial parameter length");
  if (n == 0) throw std::invalid_argument("run_epochs: empty sample");

  constexpr double kImprove = 1e-12;  // strict-decrease threshold

  std::vector<double> params(init.begin(), init.end());
  AdamState state(p, adam);

  FitResult result;
  result.params = params;
  result.best_value = objective.full_value(params);
  if (!std::isfinite(result.best_value))
    throw std::runtime_error("objective is non-finite at the initial point");

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::vector<double> grad(p);
  Rng rng(seed);

  const std::size_t batch = std::min(adam.batch_size, n);
  double plateau_best = result.best_value;
  std::size_t since_improve = 0;
  bool in_tail = state.lr() <= schedule.min_lr;
  std::size_t tail_left = schedule.tail_epochs;

  for (std::size_t epoch = 0; epoch < schedule.max_epochs; ++epoch) {
    if (in_tail && tail_left == 0) break;
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      const double val = objective.batch_value_grad(
          {order.data() + start, len}, params, grad);
      if (!std::isfinite(val))
        throw std::runtime_error("objective returned a non-finite value");
      state.step(params, grad);
    }

    const double value = objective.full_value(params);
    if (!std::isfinite(value))
      throw std::runtime_error("objective returned a non-finite value");
    EpochRecord rec{value, state.lr(), false};

    if (value < result.best_value - kImprove) {
      result.best_value = value;
      result.params = params;
    }

    if (value < plateau_best - kImprove) {
      plateau_best = value;
      since_improve = 0;
    } else {
      ++since_improve;
    }

    if (in_tail) {
      result.trace.push_back(rec);
      --tail_left;
      continue;
    }

    if (since_improve >= schedule.patience) {
      since_improve = 0;
      const double next = state.lr() * schedule.factor;
      state.set_lr(std::max(next, schedule.min_lr));
      rec.reduced = true;
      if (state.lr() <= schedule.min_lr) in_tail = true;
    }
    result.trace.push_back(rec);
  }
  return result;
}

}  // namespace hullfit
