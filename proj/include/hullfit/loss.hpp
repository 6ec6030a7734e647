#pragma once
// Loss functions with per-sample evaluation, the gradient with respect to
// the prediction (the sample-level functional gradient), and the Lipschitz
// constants used by the generalization-bound evaluator.

#include <span>
#include <string>

namespace hullfit {

enum class LossKind { quadratic, lq, logistic_margin, cross_entropy };

struct LossSpec {
  LossKind kind = LossKind::quadratic;
  double q = 2.0;        // exponent for lq, must be >= 1
  double bound_B = 10.0;

  static LossSpec quadratic(double B) { return {LossKind::quadratic, 2.0, B}; }
  static LossSpec lq_loss(double q, double B);
  static LossSpec logistic(double B) {
    return {LossKind::logistic_margin, 1.0, B};
  }
  static LossSpec cross_entropy(double B) {
    return {LossKind::cross_entropy, 1.0, B};
  }
};

// Config-file names: "mse", "lq:<q>", "logistic", "xent".
LossSpec parse_loss(const std::string& name, double bound_B);
std::string loss_name(const LossSpec& spec);

// Per-sample loss. Multi-output regression losses sum over coordinates.
// logistic: m = 1 and target in {-1, +1}; cross-entropy: target one-hot.
double loss_eval(const LossSpec& spec, std::span<const double> pred,
                 std::span<const double> target);

// d loss / d pred, written into grad.
void loss_grad_pred(const LossSpec& spec, std::span<const double> pred,
                    std::span<const double> target, std::span<double> grad);

// c_phi: lq -> q (2B)^(q-1) (quadratic = 4B), logistic -> 1.
// Throws for cross-entropy, which has no constant here.
double lipschitz_constant(const LossSpec& spec);

}  // namespace hullfit
