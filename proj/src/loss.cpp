#include "hullfit/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hullfit {

LossSpec LossSpec::lq_loss(double q, double B) {
  if (!(q >= 1.0)) throw std::invalid_argument("lq loss needs q >= 1");
  return {LossKind::lq, q, B};
}

LossSpec parse_loss(const std::string& name, double bound_B) {
  if (name == "mse") return LossSpec::quadratic(bound_B);
  if (name == "logistic") return LossSpec::logistic(bound_B);
  if (name == "xent") return LossSpec::cross_entropy(bound_B);
  if (name.rfind("lq:", 0) == 0)
    return LossSpec::lq_loss(std::stod(name.substr(3)), bound_B);
  throw std::invalid_argument("unknown loss '" + name +
                              "' (mse, lq:<q>, logistic, xent)");
}

std::string loss_name(const LossSpec& spec) {
  switch (spec.kind) {
    case LossKind::quadratic: return "mse";
    case LossKind::lq: return "lq:" + std::to_string(spec.q);
    case LossKind::logistic_margin: return "logistic";
    case LossKind::cross_entropy: return "xent";
  }
  return "?";
}

namespace {

// ln(1 + e^x) without overflow.
double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_dims(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size() || pred.empty())
    throw std::invalid_argument("loss: prediction/target dimension mismatch");
}

double margin_target(std::span<const double> target) {
  if (target.size() != 1)
    throw std::invalid_argument("logistic loss expects a single output");
  const double y = target[0];
  if (y != 1.0 && y != -1.0)
    throw std::invalid_argument("logistic loss target must be -1 or +1");
  return y;
}

std::size_t onehot_label(std::span<const double> target) {
  std::size_t label = target.size();
  for (std::size_t j = 0; j < target.size(); ++j) {
    if (target[j] == 1.0) {
      if (label != target.size())
        throw std::invalid_argument("cross-entropy target is not one-hot");
      label = j;
    } else if (target[j] != 0.0) {
      throw std::invalid_argument("cross-entropy target is not one-hot");
    }
  }
  if (label == target.size())
    throw std::invalid_argument("cross-entropy target is not one-hot");
  return label;
}

double log_sum_exp(std::span<const double> z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - zmax);
  return zmax + std::log(s);
}

}  // namespace

double loss_eval(const LossSpec& spec, std::span<const double> pred,
                 std::span<const double> target) {
  check_dims(pred, target);
  switch (spec.kind) {
    case LossKind::quadratic: {
      double s = 0.0;
      for (std::size_t j = 0; j < pred.size(); ++j) {
        const double e = pred[j] - target[j];
        s += e * e;
      }
      return s;
    }
    case LossKind::lq: {
      double s = 0.0;
      for (std::size_t j = 0; j < pred.size(); ++j)
        s += std::pow(std::abs(pred[j] - target[j]), spec.q);
      return s;
    }
    case LossKind::logistic_margin: {
      const double y = margin_target(target);
      return softplus(-y * pred[0]);
    }
    case LossKind::cross_entropy: {
      const std::size_t label = onehot_label(target);
      return log_sum_exp(pred) - pred[label];
    }
  }
  throw std::logic_error("unreachable loss kind");
}

void loss_grad_pred(const LossSpec& spec, std::span<const double> pred,
                    std::span<const double> target, std::span<double> grad) {
  check_dims(pred, target);
  if (grad.size() != pred.size())
    throw std::invalid_argument("loss: gradient dimension mismatch");
  switch (spec.kind) {
    case LossKind::quadratic:
      for (std::size_t j = 0; j < pred.size(); ++j)
        grad[j] = 2.0 * (pred[j] - target[j]);
      return;
    case LossKind::lq:
      for (std::size_t j = 0; j < pred.size(); ++j) {
        const double e = pred[j] - target[j];
        if (e == 0.0) {
          grad[j] = 0.0;  // subgradient at the kink
        } else {
          const double s = e > 0.0 ? 1.0 : -1.0;
          grad[j] = spec.q * std::pow(std::abs(e), spec.q - 1.0) * s;
        }
      }
      return;
    case LossKind::logistic_margin: {
      const double y = margin_target(target);
      grad[0] = -y * sigmoid(-y * pred[0]);
      return;
    }
    case LossKind::cross_entropy: {
      const std::size_t label = onehot_label(target);
      const double lse = log_sum_exp(pred);
      for (std::size_t j = 0; j < pred.size(); ++j)
        grad[j] = std::exp(pred[j] - lse);
      grad[label] -= 1.0;
      return;
    }
  }
  throw std::logic_error("unreachable loss kind");
}

double lipschitz_constant(const LossSpec& spec) {
  switch (spec.kind) {
    case LossKind::quadratic:
      return 4.0 * spec.bound_B;  // q (2B)^(q-1) at q = 2
    case LossKind::lq:
      return spec.q * std::pow(2.0 * spec.bound_B, spec.q - 1.0);
    case LossKind::logistic_margin:
      return 1.0;
    case LossKind::cross_entropy:
      throw std::invalid_argument(
          "no Lipschitz constant available for cross-entropy");
  }
  throw std::logic_error("unreachable loss kind");
}

}  // namespace hullfit
