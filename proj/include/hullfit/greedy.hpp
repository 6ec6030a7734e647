#pragma once
// Greedy construction of a convex ensemble: the joint (theta, alpha) greedy
// step, the Frank-Wolfe linear-minimization step, and the away-step /
// pairwise variants, with line search, early stopping, and per-iteration
// history.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "hullfit/basis.hpp"
#include "hullfit/dataset.hpp"
#include "hullfit/ensemble.hpp"
#include "hullfit/loss.hpp"
#include "hullfit/optimizer.hpp"

namespace hullfit {

enum class GreedyVariant { nonlinear, fw, afw, pfw };
enum class LineSearchKind {
  auto_pick,       // closed_form for quadratic loss, brent otherwise
  closed_form,
  brent,
  fixed_schedule,  // alpha_t = 1 / (t + 1)
};

GreedyVariant parse_variant(const std::string& name);
std::string variant_name(GreedyVariant v);

struct GreedyConfig {
  GreedyVariant variant = GreedyVariant::pfw;
  std::size_t max_modules = 100;
  std::size_t early_stop_window = 5;
  double early_stop_tol = 1e-5;  // relative validation improvement
  ModuleShape shape;             // input/output dims filled in from the data
  LossSpec loss = LossSpec::quadratic(10.0);
  AdamConfig adam;
  PlateauSchedule schedule;
  LineSearchKind line_search = LineSearchKind::auto_pick;
  std::uint64_t seed = 0;
  // When non-empty, the linear-minimization step enumerates this dictionary
  // instead of training a fresh module.
  std::vector<BasisModule> dictionary;
};

struct StepRecord {
  std::size_t iter = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double alpha = 0.0;      // blend alpha or away/pairwise gamma
  std::string step_type;   // init | nonlinear | fw | away | pairwise | stall
  std::size_t n_atoms = 0;
  double seconds = 0.0;
  double probe_loss = std::numeric_limits<double>::quiet_NaN();
};

struct TrainHistory {
  std::vector<StepRecord> records;
};

struct TrainResult {
  ConvexEnsemble ensemble;  // snapshot with the best validation loss
  TrainHistory history;
  double best_val_loss = 0.0;
};

// Builds the n x m target matrix the losses consume: raw values for
// regression, one-hot rows for cross-entropy, +-1 for margin losses.
Matrix target_matrix(const Dataset& d, const LossSpec& loss);

// Mean loss over the rows of F against Y.
double empirical_risk(const LossSpec& loss, const Matrix& F, const Matrix& Y);

// Row-wise loss gradients d risk_i / d prediction (not divided by n).
void gradient_field(const LossSpec& loss, const Matrix& F, const Matrix& Y,
                    Matrix& U);

// Step size for the blend f <- (1 - alpha) f + alpha g on the training set:
// closed form for quadratic loss, Brent's method otherwise.
double line_search_alpha(const ConvexEnsemble& f, const BasisModule& g,
                         const Dataset& data, const LossSpec& loss);

// Minimizer of risk(F + gamma * D) for gamma in [0, hi]; closed form for
// quadratic loss, Brent otherwise. F, D, Y are n x m matrices.
double line_search_segment(const LossSpec& loss, const Matrix& F,
                           const Matrix& D, const Matrix& Y, double hi);

// Joint (theta, alpha) greedy step: optimizes the blended risk with Adam,
// squashing alpha through a sigmoid. Falls back to alpha = 0 when the best
// candidate does not improve on the current risk.
std::pair<BasisModule, double> nonlinear_greedy_step(const ConvexEnsemble& f,
                                                     const Dataset& data,
                                                     const GreedyConfig& cfg,
                                                     std::uint64_t iter = 1);

// Trains a module against the frozen gradient field of f (the linear
// functional minimization step). With a dictionary configured, enumerates it
// instead; ties break toward the lowest index.
BasisModule fw_lmo(const ConvexEnsemble& f, const Dataset& data,
                   const GreedyConfig& cfg, std::uint64_t iter = 1);

struct StepOutcome {
  ConvexEnsemble ensemble;
  StepRecord record;
};

// One away-step Frank-Wolfe iteration on f.
StepOutcome afw_step(const ConvexEnsemble& f, const Dataset& data,
                     const GreedyConfig& cfg, std::uint64_t iter = 1);

// One pairwise Frank-Wolfe iteration on f.
StepOutcome pfw_step(const ConvexEnsemble& f, const Dataset& data,
                     const GreedyConfig& cfg, std::uint64_t iter = 1);

// Full training loop: fits f_0, iterates the configured variant, early-stops
// on the validation split, and returns the best-validation snapshot. When
// `probe` is given its risk is recorded per iteration (e.g. a test split for
// learning curves).
TrainResult train(const GreedyConfig& cfg, const Dataset& train,
                  const Dataset& val, const Dataset* probe = nullptr);

}  // namespace hullfit
