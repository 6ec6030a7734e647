#include "hullfit/greedy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <tuple>

#include "hullfit/kernels.hpp"
#include "hullfit/rng.hpp"
#include "hullfit/scalar_min.hpp"

namespace hullfit {

GreedyVariant parse_variant(const std::string& name) {
  if (name == "nonlinear") return GreedyVariant::nonlinear;
  if (name == "fw") return GreedyVariant::fw;
  if (name == "afw") return GreedyVariant::afw;
  if (name == "pfw") return GreedyVariant::pfw;
  throw std::invalid_argument("unknown variant '" + name +
                              "' (nonlinear, fw, afw, pfw)");
}

std::string variant_name(GreedyVariant v) {
  switch (v) {
    case GreedyVariant::nonlinear: return "nonlinear";
    case GreedyVariant::fw: return "fw";
    case GreedyVariant::afw: return "afw";
    case GreedyVariant::pfw: return "pfw";
  }
  return "?";
}

namespace {

constexpr std::size_t kNoDict = static_cast<std::size_t>(-1);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (a + 1) + b;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

double mat_dot(const Matrix& a, const Matrix& b) {
  return kern::dot(a.data(), b.data(), a.size());
}

Matrix mat_diff(const Matrix& a, const Matrix& b) {
  Matrix d = a;
  kern::axpy(-1.0, b.data(), d.data(), d.size());
  return d;
}

}  // namespace

Matrix target_matrix(const Dataset& d, const LossSpec& loss) {
  const std::size_t n = d.size();
  if (d.task == Task::regression) {
    if (loss.kind == LossKind::logistic_margin ||
        loss.kind == LossKind::cross_entropy)
      throw std::invalid_argument("classification loss on a regression task");
    Matrix Y(n, 1);
    for (std::size_t i = 0; i < n; ++i) Y(i, 0) = d.targets[i];
    return Y;
  }
  if (d.num_classes < 2)
    throw std::invalid_argument("classification task needs >= 2 classes");
  if (loss.kind == LossKind::cross_entropy) {
    Matrix Y(n, d.num_classes);
    for (std::size_t i = 0; i < n; ++i)
      Y(i, static_cast<std::size_t>(d.targets[i])) = 1.0;
    return Y;
  }
  // Margin-style encoding for binary problems (logistic or squared loss).
  if (d.num_classes != 2)
    throw std::invalid_argument(loss_name(loss) +
                                " loss needs a binary classification task");
  Matrix Y(n, 1);
  for (std::size_t i = 0; i < n; ++i) Y(i, 0) = d.targets[i] == 1.0 ? 1.0 : -1.0;
  return Y;
}

double empirical_risk(const LossSpec& loss, const Matrix& F, const Matrix& Y) {
  if (F.rows() != Y.rows() || F.cols() != Y.cols() || F.rows() == 0)
    throw std::invalid_argument("empirical_risk: shape mismatch");
  if (loss.kind == LossKind::quadratic)
    return kern::sq_diff_sum(F.data(), Y.data(), F.size()) /
           static_cast<double>(F.rows());
  double total = 0.0;
  for (std::size_t i = 0; i < F.rows(); ++i)
    total += loss_eval(loss, F.row(i), Y.row(i));
  return total / static_cast<double>(F.rows());
}

void gradient_field(const LossSpec& loss, const Matrix& F, const Matrix& Y,
                    Matrix& U) {
  if (U.rows() != F.rows() || U.cols() != F.cols()) U = Matrix(F.rows(), F.cols());
  for (std::size_t i = 0; i < F.rows(); ++i)
    loss_grad_pred(loss, F.row(i), Y.row(i), U.row(i));
}

// ---------------------------------------------------------------------------
// Inner optimization problems
// ---------------------------------------------------------------------------

namespace {

// Mean loss of a single module on (X, Y), optionally with an l2 penalty on
// the parameters.
class ModuleRiskObjective final : public BatchObjective {
 public:
  ModuleRiskObjective(const Matrix& X, const Matrix& Y, const LossSpec& loss,
                      const ModuleShape& shape, double l2 = 0.0)
      : X_(X), Y_(Y), loss_(loss), shape_(shape), l2_(l2) {}

  std::size_t sample_count() const override { return X_.rows(); }
  std::size_t param_count() const override { return shape_.param_count(); }

  double batch_value_grad(std::span<const std::uint32_t> idx,
                          std::span<const double> params,
                          std::span<double> grad) const override {
    BasisModule g(shape_);
    g.from_vector(params);
    ModuleWorkspace ws;
    std::vector<double> out(shape_.output_dim), up(shape_.output_dim);
    const double inv = 1.0 / static_cast<double>(idx.size());
    double total = 0.0;
    for (std::uint32_t i : idx) {
      const auto x = X_.row(i);
      forward_cached(g, x, ws, out);
      total += loss_eval(loss_, out, Y_.row(i));
      loss_grad_pred(loss_, out, Y_.row(i), up);
      kern::scale(inv, up.data(), up.size());
      backward_cached(g, x, up, ws, grad);
    }
    double value = total * inv;
    if (l2_ > 0.0) {
      value += l2_ * kern::dot(params.data(), params.data(), params.size());
      kern::axpy(2.0 * l2_, params.data(), grad.data(), params.size());
    }
    return value;
  }

 private:
  const Matrix& X_;
  const Matrix& Y_;
  LossSpec loss_;
  ModuleShape shape_;
  double l2_;
};

// Mean of <U_i, g(x_i)>: the linear functional minimization subproblem with
// the gradient field U frozen.
class LmoObjective final : public BatchObjective {
 public:
  LmoObjective(const Matrix& X, const Matrix& U, const ModuleShape& shape)
      : X_(X), U_(U), shape_(shape) {}

  std::size_t sample_count() const override { return X_.rows(); }
  std::size_t param_count() const override { return shape_.param_count(); }

  double batch_value_grad(std::span<const std::uint32_t> idx,
                          std::span<const double> params,
                          std::span<double> grad) const override {
    BasisModule g(shape_);
    g.from_vector(params);
    ModuleWorkspace ws;
    std::vector<double> out(shape_.output_dim), up(shape_.output_dim);
    const double inv = 1.0 / static_cast<double>(idx.size());
    double total = 0.0;
    for (std::uint32_t i : idx) {
      const auto x = X_.row(i);
      const auto u = U_.row(i);
      forward_cached(g, x, ws, out);
      total += kern::dot(u.data(), out.data(), out.size());
      std::copy(u.begin(), u.end(), up.begin());
      kern::scale(inv, up.data(), up.size());
      backward_cached(g, x, up, ws, grad);
    }
    return total * inv;
  }

 private:
  const Matrix& X_;
  const Matrix& U_;
  ModuleShape shape_;
};

// Joint (theta, alpha) objective: mean loss of (1 - alpha) f + alpha g_theta
// with alpha = sigmoid(s) and params = [theta, s].
class BlendedStepObjective final : public BatchObjective {
 public:
  BlendedStepObjective(const Matrix& X, const Matrix& Y, const Matrix& F,
                       const LossSpec& loss, const ModuleShape& shape)
      : X_(X), Y_(Y), F_(F), loss_(loss), shape_(shape) {}

  std::size_t sample_count() const override { return X_.rows(); }
  std::size_t param_count() const override { return shape_.param_count() + 1; }

  double batch_value_grad(std::span<const std::uint32_t> idx,
                          std::span<const double> params,
                          std::span<double> grad) const override {
    const std::size_t p = shape_.param_count();
    BasisModule g(shape_);
    g.from_vector(params.subspan(0, p));
    const double alpha = sigmoid(params[p]);
    const double dalpha_ds = alpha * (1.0 - alpha);

    ModuleWorkspace ws;
    const std::size_t m = shape_.output_dim;
    std::vector<double> out(m), pred(m), up(m), up_theta(m);
    const double inv = 1.0 / static_cast<double>(idx.size());
    double total = 0.0;
    double ds = 0.0;
    for (std::uint32_t i : idx) {
      const auto x = X_.row(i);
      forward_cached(g, x, ws, out);
      const auto f = F_.row(i);
      for (std::size_t j = 0; j < m; ++j)
        pred[j] = (1.0 - alpha) * f[j] + alpha * out[j];
      total += loss_eval(loss_, pred, Y_.row(i));
      loss_grad_pred(loss_, pred, Y_.row(i), up);
      for (std::size_t j = 0; j < m; ++j) {
        ds += up[j] * (out[j] - f[j]);
        up_theta[j] = up[j] * alpha * inv;
      }
      backward_cached(g, x, up_theta, ws, grad.subspan(0, p));
    }
    grad[p] += ds * dalpha_ds * inv;
    return total * inv;
  }

 private:
  const Matrix& X_;
  const Matrix& Y_;
  const Matrix& F_;
  LossSpec loss_;
  ModuleShape shape_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Line search
// ---------------------------------------------------------------------------

double line_search_segment(const LossSpec& loss, const Matrix& F,
                           const Matrix& D, const Matrix& Y, double hi) {
  if (!(hi > 0.0)) return 0.0;
  if (loss.kind == LossKind::quadratic) {
    const double den = kern::dot(D.data(), D.data(), D.size());
    if (den <= 0.0) return 0.0;
    const double num = mat_dot(Y, D) - mat_dot(F, D);
    return std::clamp(num / den, 0.0, hi);
  }
  Matrix P = F;
  auto q = [&](double t) {
    P = F;
    kern::axpy(t, D.data(), P.data(), P.size());
    return empirical_risk(loss, P, Y);
  };
  const double tol = 1e-8 * std::max(1.0, hi);
  ScalarMinResult r = brent_min(q, 0.0, hi, tol, 100);
  if (!std::isfinite(r.fx)) r = golden_min(q, 0.0, hi, tol, 200);
  // Brent keeps a small distance from the interval ends; check them too.
  double best_t = r.x, best_q = r.fx;
  const double q0 = q(0.0);
  if (q0 < best_q) { best_q = q0; best_t = 0.0; }
  const double qh = q(hi);
  if (qh < best_q) { best_t = hi; }
  return best_t;
}

double line_search_alpha(const ConvexEnsemble& f, const BasisModule& g,
                         const Dataset& data, const LossSpec& loss) {
  const Matrix Y = target_matrix(data, loss);
  const Matrix F = f.predict_batch(data.features);
  Matrix G;
  g.forward_batch(data.features, G);
  return line_search_segment(loss, F, mat_diff(G, F), Y, 1.0);
}

// ---------------------------------------------------------------------------
// Trainer context: caches atom outputs per split and applies the moves
// ---------------------------------------------------------------------------

namespace {

struct SplitCache {
  const Matrix* X = nullptr;     // features
  Matrix Y;                      // targets
  Matrix F;                      // current ensemble predictions
  std::vector<Matrix> atom_out;  // one n x m matrix per ensemble atom
};

class GreedyContext {
 public:
  GreedyContext(GreedyConfig cfg, const Dataset& train, const Dataset* val,
                const Dataset* probe)
      : cfg_(std::move(cfg)) {
    if (train.size() == 0) throw std::invalid_argument("empty training split");
    cfg_.shape.input_dim = train.dim();
    train_.X = &train.features;
    train_.Y = target_matrix(train, cfg_.loss);
    cfg_.shape.output_dim = train_.Y.cols();
    if (cfg_.line_search == LineSearchKind::auto_pick)
      cfg_.line_search = cfg_.loss.kind == LossKind::quadratic
                             ? LineSearchKind::closed_form
                             : LineSearchKind::brent;
    if (val) {
      val_.emplace();
      val_->X = &val->features;
      val_->Y = target_matrix(*val, cfg_.loss);
    }
    if (probe) {
      probe_.emplace();
      probe_->X = &probe->features;
      probe_->Y = target_matrix(*probe, cfg_.loss);
    }
    for (const auto& g : cfg_.dictionary) {
      if (g.shape().input_dim != cfg_.shape.input_dim ||
          g.shape().output_dim != cfg_.shape.output_dim)
        throw std::invalid_argument("dictionary atom shape mismatch");
      dict_train_out_.emplace_back();
      g.forward_batch(*train_.X, dict_train_out_.back());
    }
    reset_predictions();
  }

  const GreedyConfig& config() const { return cfg_; }
  const ConvexEnsemble& ensemble() const { return ens_; }
  const Matrix& train_predictions() const { return train_.F; }

  void set_ensemble(const ConvexEnsemble& f) {
    ens_ = f;
    ens_to_dict_.assign(ens_.size(), kNoDict);
    for_each_split([&](SplitCache& s) {
      s.atom_out.clear();
      for (const auto& g : ens_.atoms()) {
        s.atom_out.emplace_back();
        g.forward_batch(*s.X, s.atom_out.back());
      }
    });
    reset_predictions();
  }

  void fit_f0() {
    if (!cfg_.dictionary.empty()) {
      std::size_t best = 0;
      double best_risk = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < cfg_.dictionary.size(); ++j) {
        const double r = empirical_risk(cfg_.loss, dict_train_out_[j], train_.Y);
        if (r < best_risk) {
          best_risk = r;
          best = j;
        }
      }
      append_atom(cfg_.dictionary[best], best, 1.0, /*first=*/true);
    } else {
      ModuleRiskObjective obj(*train_.X, train_.Y, cfg_.loss, cfg_.shape);
      BasisModule g = init_module(mix_seed(cfg_.seed, 0, 1), cfg_.shape);
      const FitResult fit = run_epochs(obj, g.params(), cfg_.adam,
                                       cfg_.schedule, mix_seed(cfg_.seed, 0, 2));
      g.from_vector(fit.params);
      append_atom(std::move(g), kNoDict, 1.0, /*first=*/true);
    }
    reset_predictions();
  }

  double risk_train() const { return empirical_risk(cfg_.loss, train_.F, train_.Y); }
  double risk_val() const {
    return val_ ? empirical_risk(cfg_.loss, val_->F, val_->Y)
                : std::numeric_limits<double>::quiet_NaN();
  }
  double risk_probe() const {
    return probe_ ? empirical_risk(cfg_.loss, probe_->F, probe_->Y)
                  : std::numeric_limits<double>::quiet_NaN();
  }

  // Linear-minimization step against the current gradient field. Returns the
  // trained module (neural mode) or the winning dictionary index.
  std::pair<BasisModule, std::size_t> solve_lmo(std::uint64_t iter) {
    gradient_field(cfg_.loss, train_.F, train_.Y, U_);
    if (!cfg_.dictionary.empty()) {
      std::size_t best = 0;
      double best_score = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < cfg_.dictionary.size(); ++j) {
        const double s = mat_dot(U_, dict_train_out_[j]);
        if (s < best_score) {
          best_score = s;
          best = j;
        }
      }
      return {cfg_.dictionary[best], best};
    }
    BasisModule g = init_module(mix_seed(cfg_.seed, iter, 3), cfg_.shape);
    double umax = 0.0;
    for (std::size_t i = 0; i < U_.size(); ++i)
      umax = std::max(umax, std::abs(U_.data()[i]));
    if (umax < 1e-14) return {std::move(g), kNoDict};  // zero gradient field
    LmoObjective obj(*train_.X, U_, cfg_.shape);
    const FitResult fit = run_epochs(obj, g.params(), cfg_.adam, cfg_.schedule,
                                     mix_seed(cfg_.seed, iter, 4));
    g.from_vector(fit.params);
    return {std::move(g), kNoDict};
  }

  // Joint (theta, alpha) step; returns the candidate, its blend weight, and
  // the dictionary index when the candidate came from the dictionary.
  std::tuple<BasisModule, double, std::size_t> solve_nonlinear_impl(
      std::uint64_t iter) {
    const double current = risk_train();
    if (!cfg_.dictionary.empty()) {
      // Enumerate atoms, line-searching the blend weight for each.
      std::size_t best_j = 0;
      double best_alpha = 0.0, best_risk = current;
      for (std::size_t j = 0; j < cfg_.dictionary.size(); ++j) {
        const Matrix D = mat_diff(dict_train_out_[j], train_.F);
        const double a = line_search_segment(cfg_.loss, train_.F, D, train_.Y, 1.0);
        Matrix P = train_.F;
        kern::axpy(a, D.data(), P.data(), P.size());
        const double r = empirical_risk(cfg_.loss, P, train_.Y);
        if (r < best_risk) {
          best_risk = r;
          best_j = j;
          best_alpha = a;
        }
      }
      return {cfg_.dictionary[best_j], best_alpha, best_j};
    }
    BlendedStepObjective obj(*train_.X, train_.Y, train_.F, cfg_.loss, cfg_.shape);
    BasisModule g = init_module(mix_seed(cfg_.seed, iter, 1), cfg_.shape);
    std::vector<double> params(g.params().begin(), g.params().end());
    params.push_back(0.0);  // sigmoid(0) = 0.5
    const FitResult fit = run_epochs(obj, params, cfg_.adam, cfg_.schedule,
                                     mix_seed(cfg_.seed, iter, 2));
    g.from_vector(std::span(fit.params).subspan(0, g.param_count()));
    double alpha = sigmoid(fit.params.back());
    if (fit.best_value > current) alpha = 0.0;  // never move uphill
    return {std::move(g), alpha, kNoDict};
  }

  std::pair<BasisModule, double> solve_nonlinear(std::uint64_t iter) {
    auto [g, alpha, dict_index] = solve_nonlinear_impl(iter);
    (void)dict_index;
    return {std::move(g), alpha};
  }

  StepRecord iterate(std::size_t iter) {
    const auto t0 = std::chrono::steady_clock::now();
    StepRecord rec;
    rec.iter = iter;
    switch (cfg_.variant) {
      case GreedyVariant::nonlinear: do_nonlinear(iter, rec); break;
      case GreedyVariant::fw: do_fw(iter, rec); break;
      case GreedyVariant::afw: do_afw(iter, rec); break;
      case GreedyVariant::pfw: do_pfw(iter, rec); break;
    }
    prune_zeros();
    reset_predictions();
    rec.train_loss = risk_train();
    rec.val_loss = risk_val();
    rec.probe_loss = risk_probe();
    rec.n_atoms = ens_.size();
    rec.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0).count();
    return rec;
  }

  StepRecord record_initial() {
    StepRecord rec;
    rec.iter = 0;
    rec.step_type = "init";
    rec.alpha = 1.0;
    rec.train_loss = risk_train();
    rec.val_loss = risk_val();
    rec.probe_loss = risk_probe();
    rec.n_atoms = ens_.size();
    return rec;
  }

 private:
  template <typename Fn>
  void for_each_split(Fn&& fn) {
    fn(train_);
    if (val_) fn(*val_);
    if (probe_) fn(*probe_);
  }

  void reset_predictions() {
    for_each_split([&](SplitCache& s) {
      if (s.F.rows() != s.X->rows() || s.F.cols() != train_.Y.cols())
        s.F = Matrix(s.X->rows(), train_.Y.cols());
      s.F.fill(0.0);
      for (std::size_t i = 0; i < ens_.size(); ++i)
        kern::axpy(ens_.weight(i), s.atom_out[i].data(), s.F.data(),
                   s.F.size());
    });
  }

  void append_atom(BasisModule g, std::size_t dict_index, double alpha,
                   bool first = false) {
    for_each_split([&](SplitCache& s) {
      s.atom_out.emplace_back();
      g.forward_batch(*s.X, s.atom_out.back());
    });
    if (first)
      ens_ = ConvexEnsemble(std::move(g));
    else
      ens_.add_blend(std::move(g), alpha);
    ens_to_dict_.push_back(dict_index);
  }

  // Existing ensemble index of a dictionary atom, or kNoDict.
  std::size_t ensemble_index_of(std::size_t dict_index) const {
    if (dict_index == kNoDict) return kNoDict;
    for (std::size_t i = 0; i < ens_to_dict_.size(); ++i)
      if (ens_to_dict_[i] == dict_index) return i;
    return kNoDict;
  }

  void prune_zeros() {
    bool any_zero = false;
    for (double w : ens_.weights()) any_zero |= (w <= 0.0);
    if (!any_zero) return;
    const std::vector<std::size_t> kept = ens_.prune(0.0);
    std::vector<std::size_t> dict_map;
    for (std::size_t k : kept) dict_map.push_back(ens_to_dict_[k]);
    ens_to_dict_ = std::move(dict_map);
    for_each_split([&](SplitCache& s) {
      std::vector<Matrix> out;
      out.reserve(kept.size());
      for (std::size_t k : kept) out.push_back(std::move(s.atom_out[k]));
      s.atom_out = std::move(out);
    });
  }

  double blend_alpha(const Matrix& G, std::size_t iter) {
    if (cfg_.line_search == LineSearchKind::fixed_schedule)
      return 1.0 / static_cast<double>(iter + 1);
    return line_search_segment(cfg_.loss, train_.F, mat_diff(G, train_.F),
                               train_.Y, 1.0);
  }

  void apply_blend(BasisModule g, std::size_t dict_index, double alpha) {
    const std::size_t existing = ensemble_index_of(dict_index);
    if (existing != kNoDict) {
      ens_.add_blend_existing(existing, alpha);
    } else {
      append_atom(std::move(g), dict_index, alpha);
    }
  }

  void do_nonlinear(std::size_t iter, StepRecord& rec) {
    auto [g, alpha, dict_index] = solve_nonlinear_impl(iter);
    rec.alpha = alpha;
    rec.step_type = alpha > 0.0 ? "nonlinear" : "stall";
    if (alpha > 0.0) apply_blend(std::move(g), dict_index, alpha);
  }

  void do_fw(std::size_t iter, StepRecord& rec) {
    auto [g, dict_index] = solve_lmo(iter);
    Matrix G;
    if (dict_index != kNoDict)
      G = dict_train_out_[dict_index];
    else
      g.forward_batch(*train_.X, G);
    const double alpha = blend_alpha(G, iter);
    rec.alpha = alpha;
    rec.step_type = alpha > 0.0 ? "fw" : "stall";
    if (alpha > 0.0) apply_blend(std::move(g), dict_index, alpha);
  }

  // Away atom: the ensemble member most aligned with the gradient field
  // (worst atom); assumes solve_lmo has refreshed U_.
  std::size_t pick_away_atom() const {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ens_.size(); ++i) {
      const double s = mat_dot(U_, train_.atom_out[i]);
      if (s > best_score) {
        best_score = s;
        best = i;
      }
    }
    return best;
  }

  void do_afw(std::size_t iter, StepRecord& rec) {
    auto [g, dict_index] = solve_lmo(iter);
    Matrix G;
    if (dict_index != kNoDict)
      G = dict_train_out_[dict_index];
    else
      g.forward_batch(*train_.X, G);

    const std::size_t a = pick_away_atom();
    const double uf = mat_dot(U_, train_.F);
    const double fw_score = mat_dot(U_, G) - uf;
    const double away_score = uf - mat_dot(U_, train_.atom_out[a]);
    const double wa = ens_.weight(a);
    const bool away_feasible = ens_.size() > 1 && wa < 1.0 - 1e-12;

    if (!away_feasible || fw_score <= away_score) {
      const double alpha = blend_alpha(G, iter);
      rec.alpha = alpha;
      rec.step_type = alpha > 0.0 ? "fw" : "stall";
      if (alpha > 0.0) apply_blend(std::move(g), dict_index, alpha);
      return;
    }
    const double cap = wa / (1.0 - wa);
    const Matrix D = mat_diff(train_.F, train_.atom_out[a]);
    const double gamma = line_search_segment(cfg_.loss, train_.F, D, train_.Y, cap);
    rec.alpha = gamma;
    rec.step_type = gamma > 0.0 ? "away" : "stall";
    if (gamma > 0.0) ens_.away_reweight(a, gamma);
  }

  void do_pfw(std::size_t iter, StepRecord& rec) {
    auto [g, dict_index] = solve_lmo(iter);
    Matrix G;
    if (dict_index != kNoDict)
      G = dict_train_out_[dict_index];
    else
      g.forward_batch(*train_.X, G);

    const std::size_t a = pick_away_atom();
    const Matrix D = mat_diff(G, train_.atom_out[a]);
    const double gamma =
        line_search_segment(cfg_.loss, train_.F, D, train_.Y, ens_.weight(a));
    rec.alpha = gamma;
    rec.step_type = gamma > 0.0 ? "pairwise" : "stall";
    if (gamma <= 0.0) return;
    const std::size_t existing = ensemble_index_of(dict_index);
    if (existing != kNoDict) {
      ens_.pairwise_swap(a, existing, gamma);
    } else {
      for_each_split([&](SplitCache& s) {
        s.atom_out.emplace_back();
        g.forward_batch(*s.X, s.atom_out.back());
      });
      ens_.pairwise_swap(a, std::move(g), gamma);
      ens_to_dict_.push_back(dict_index);
    }
  }

  GreedyConfig cfg_;
  SplitCache train_;
  std::optional<SplitCache> val_;
  std::optional<SplitCache> probe_;
  std::vector<Matrix> dict_train_out_;
  ConvexEnsemble ens_;
  std::vector<std::size_t> ens_to_dict_;
  Matrix U_;  // gradient field on the training split
};

}  // namespace

// ---------------------------------------------------------------------------
// Public single-step wrappers and the training loop
// ---------------------------------------------------------------------------

std::pair<BasisModule, double> nonlinear_greedy_step(const ConvexEnsemble& f,
                                                     const Dataset& data,
                                                     const GreedyConfig& cfg,
                                                     std::uint64_t iter) {
  if (f.empty()) throw std::invalid_argument("nonlinear step needs a non-empty ensemble");
  GreedyContext ctx(cfg, data, nullptr, nullptr);
  ctx.set_ensemble(f);
  return ctx.solve_nonlinear(iter);
}

BasisModule fw_lmo(const ConvexEnsemble& f, const Dataset& data,
                   const GreedyConfig& cfg, std::uint64_t iter) {
  GreedyContext ctx(cfg, data, nullptr, nullptr);
  if (!f.empty()) ctx.set_ensemble(f);
  return ctx.solve_lmo(iter).first;
}

StepOutcome afw_step(const ConvexEnsemble& f, const Dataset& data,
                     const GreedyConfig& cfg, std::uint64_t iter) {
  if (f.empty()) throw std::invalid_argument("afw_step needs a non-empty ensemble");
  GreedyConfig c = cfg;
  c.variant = GreedyVariant::afw;
  GreedyContext ctx(c, data, nullptr, nullptr);
  ctx.set_ensemble(f);
  StepRecord rec = ctx.iterate(iter);
  return {ctx.ensemble(), std::move(rec)};
}

StepOutcome pfw_step(const ConvexEnsemble& f, const Dataset& data,
                     const GreedyConfig& cfg, std::uint64_t iter) {
  if (f.empty()) throw std::invalid_argument("pfw_step needs a non-empty ensemble");
  GreedyConfig c = cfg;
  c.variant = GreedyVariant::pfw;
  GreedyContext ctx(c, data, nullptr, nullptr);
  ctx.set_ensemble(f);
  StepRecord rec = ctx.iterate(iter);
  return {ctx.ensemble(), std::move(rec)};
}

TrainResult train(const GreedyConfig& cfg, const Dataset& train_split,
                  const Dataset& val_split, const Dataset* probe) {
  if (cfg.max_modules < 1)
    throw std::invalid_argument("max_modules must be >= 1");
  if (cfg.early_stop_window < 1)
    throw std::invalid_argument("early_stop_window must be >= 1");

  GreedyContext ctx(cfg, train_split, &val_split, probe);
  const auto t0 = std::chrono::steady_clock::now();
  ctx.fit_f0();

  TrainResult result;
  StepRecord rec0 = ctx.record_initial();
  rec0.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  result.history.records.push_back(rec0);

  result.ensemble = ctx.ensemble();
  result.best_val_loss = rec0.val_loss;
  std::size_t since_improve = 0;

  for (std::size_t t = 1; t < cfg.max_modules; ++t) {
    StepRecord rec = ctx.iterate(t);
    result.history.records.push_back(rec);
    const double rel =
        (result.best_val_loss - rec.val_loss) /
        std::max(std::abs(result.best_val_loss), 1e-12);
    if (rel > cfg.early_stop_tol) {
      result.best_val_loss = rec.val_loss;
      result.ensemble = ctx.ensemble();
      since_improve = 0;
    } else {
      ++since_improve;
      if (since_improve >= cfg.early_stop_window) break;
    }
  }
  return result;
}

}  // namespace hullfit
