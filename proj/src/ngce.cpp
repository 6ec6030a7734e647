#include "hullfit/ngce.hpp"

#include <cmath>
#include <stdexcept>

#include "hullfit/kernels.hpp"

namespace hullfit {

std::vector<double> weights_from(std::span<const double> v) {
  const std::size_t k = v.size();
  if (k == 0) throw std::invalid_argument("weights_from: empty v");
  double s = 1.0;
  for (double vi : v) s += std::abs(vi);
  const double base = 1.0 / static_cast<double>(k);
  std::vector<double> alpha(k);
  for (std::size_t i = 0; i < k; ++i) alpha[i] = (base + std::abs(v[i])) / s;
  return alpha;
}

void grad_v(std::span<const double> v, std::span<const double> upstream_alpha,
            std::span<double> dv) {
  const std::size_t k = v.size();
  if (upstream_alpha.size() != k || dv.size() != k)
    throw std::invalid_argument("grad_v: length mismatch");
  const std::vector<double> alpha = weights_from(v);
  double s = 1.0;
  for (double vi : v) s += std::abs(vi);
  // d alpha_i / d v_j = sign(v_j) (delta_ij - alpha_i) / S
  double dot_ua = 0.0;
  for (std::size_t i = 0; i < k; ++i) dot_ua += upstream_alpha[i] * alpha[i];
  for (std::size_t j = 0; j < k; ++j) {
    const double sgn = v[j] > 0.0 ? 1.0 : (v[j] < 0.0 ? -1.0 : 0.0);
    dv[j] = sgn * (upstream_alpha[j] - dot_ua) / s;
  }
}

namespace {

// params = [theta_1, ..., theta_k, v]
class JointObjective final : public BatchObjective {
 public:
  JointObjective(const Matrix& X, const Matrix& Y, const LossSpec& loss,
                 const ModuleShape& shape, std::size_t k, double l2)
      : X_(X), Y_(Y), loss_(loss), shape_(shape), k_(k), l2_(l2) {}

  std::size_t sample_count() const override { return X_.rows(); }
  std::size_t param_count() const override {
    return k_ * shape_.param_count() + k_;
  }

  double batch_value_grad(std::span<const std::uint32_t> idx,
                          std::span<const double> params,
                          std::span<double> grad) const override {
    const std::size_t p = shape_.param_count();
    const std::size_t m = shape_.output_dim;
    std::vector<BasisModule> mods;
    mods.reserve(k_);
    for (std::size_t j = 0; j < k_; ++j) {
      mods.emplace_back(shape_);
      mods[j].from_vector(params.subspan(j * p, p));
    }
    const std::span<const double> v = params.subspan(k_ * p, k_);
    const std::vector<double> alpha = weights_from(v);

    std::vector<ModuleWorkspace> ws(k_);
    Matrix outs(k_, m);
    std::vector<double> pred(m), up(m), up_j(m);
    std::vector<double> dalpha(k_, 0.0);
    const double inv = 1.0 / static_cast<double>(idx.size());

    double total = 0.0;
    for (std::uint32_t i : idx) {
      const auto x = X_.row(i);
      std::fill(pred.begin(), pred.end(), 0.0);
      for (std::size_t j = 0; j < k_; ++j) {
        forward_cached(mods[j], x, ws[j], outs.row(j));
        kern::axpy(alpha[j], outs.row(j).data(), pred.data(), m);
      }
      total += loss_eval(loss_, pred, Y_.row(i));
      loss_grad_pred(loss_, pred, Y_.row(i), up);
      for (std::size_t j = 0; j < k_; ++j) {
        dalpha[j] += kern::dot(up.data(), outs.row(j).data(), m);
        for (std::size_t c = 0; c < m; ++c)
          up_j[c] = up[c] * alpha[j] * inv;
        backward_cached(mods[j], x, up_j, ws[j], grad.subspan(j * p, p));
      }
    }
    kern::scale(inv, dalpha.data(), k_);
    std::vector<double> dv(k_);
    grad_v(v, dalpha, dv);
    kern::axpy(1.0, dv.data(), grad.data() + k_ * p, k_);

    double value = total * inv;
    if (l2_ > 0.0) {
      const std::span<const double> theta = params.subspan(0, k_ * p);
      value += l2_ * kern::dot(theta.data(), theta.data(), theta.size());
      kern::axpy(2.0 * l2_, theta.data(), grad.data(), theta.size());
    }
    return value;
  }

 private:
  const Matrix& X_;
  const Matrix& Y_;
  LossSpec loss_;
  ModuleShape shape_;
  std::size_t k_;
  double l2_;
};

std::uint64_t mix(std::uint64_t seed, std::uint64_t j) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (j + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

NgceResult train_ngce(const NgceConfig& cfg, const Dataset& train) {
  if (cfg.k < 1) throw std::invalid_argument("train_ngce: k must be >= 1");
  ModuleShape shape = cfg.shape;
  shape.input_dim = train.dim();
  const Matrix Y = target_matrix(train, cfg.loss);
  shape.output_dim = Y.cols();
  const std::size_t p = shape.param_count();

  std::vector<double> params;
  params.reserve(cfg.k * p + cfg.k);
  for (std::size_t j = 0; j < cfg.k; ++j) {
    const BasisModule g = init_module(mix(cfg.seed, j), shape);
    params.insert(params.end(), g.params().begin(), g.params().end());
  }
  params.insert(params.end(), cfg.k, 0.0);  // v = 0: uniform weights

  JointObjective obj(train.features, Y, cfg.loss, shape, cfg.k, cfg.l2);
  FitResult fit =
      run_epochs(obj, params, cfg.adam, cfg.schedule, mix(cfg.seed, 0x5eedull));

  NgceResult result;
  std::vector<BasisModule> atoms;
  for (std::size_t j = 0; j < cfg.k; ++j) {
    BasisModule g(shape);
    g.from_vector(std::span(fit.params).subspan(j * p, p));
    atoms.push_back(std::move(g));
  }
  result.v.assign(fit.params.begin() + static_cast<std::ptrdiff_t>(cfg.k * p),
                  fit.params.end());
  result.ensemble =
      ConvexEnsemble::from_parts(std::move(atoms), weights_from(result.v));
  const Matrix F = result.ensemble.predict_batch(train.features);
  result.train_loss = empirical_risk(cfg.loss, F, Y);
  result.module_param_norm_sq =
      kern::dot(fit.params.data(), fit.params.data(), cfg.k * p);
  result.trace = std::move(fit.trace);
  return result;
}

}  // namespace hullfit
