#pragma once
// Mini-batch Adam with a reduce-on-plateau learning-rate schedule and
// best-epoch checkpointing. Every parametric subproblem in the trainers is
// phrased as a BatchObjective and run through run_epochs.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace hullfit {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t batch_size = 128;  // full batch when n is smaller
};

class AdamState {
 public:
  AdamState(std::size_t n, const AdamConfig& cfg);

  // One update in place. Throws on non-finite gradient entries.
  void step(std::span<double> params, std::span<const double> grad);

  double lr() const { return cfg_.lr; }
  void set_lr(double lr) { cfg_.lr = lr; }
  std::uint64_t step_count() const { return t_; }

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  std::uint64_t t_ = 0;
};

struct PlateauSchedule {
  std::size_t patience = 10;   // epochs without improvement before a cut
  double factor = 0.1;         // lr multiplier on plateau
  double min_lr = 1e-5;        // floor; reaching it starts the tail
  std::size_t tail_epochs = 10;
  std::size_t max_epochs = 400;
};

// A differentiable objective over a flat parameter vector, evaluable on
// mini-batches. Values are means over the referenced samples.
class BatchObjective {
 public:
  virtual ~BatchObjective() = default;
  virtual std::size_t sample_count() const = 0;
  virtual std::size_t param_count() const = 0;
  // Returns the mean value over `idx` and accumulates the gradient of that
  // mean into `grad` (caller zeroes it).
  virtual double batch_value_grad(std::span<const std::uint32_t> idx,
                                  std::span<const double> params,
                                  std::span<double> grad) const = 0;
  // Full objective, used for checkpointing and the plateau rule.
  virtual double full_value(std::span<const double> params) const;
};

struct EpochRecord {
  double value;      // full objective at the epoch boundary
  double lr;         // learning rate used during the epoch
  bool reduced;      // lr was cut after this epoch
};

struct FitResult {
  std::vector<double> params;  // best parameters seen
  double best_value = 0.0;
  std::vector<EpochRecord> trace;
};

// Shuffled mini-batch Adam under the plateau schedule. Deterministic given
// the seed. Returns the parameters with the lowest full objective seen at
// any epoch boundary (the initial point included).
FitResult run_epochs(const BatchObjective& objective,
                     std::span<const double> init, const AdamConfig& adam,
                     const PlateauSchedule& schedule, std::uint64_t seed);

}  // namespace hullfit
