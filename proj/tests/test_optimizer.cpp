#include "hullfit/optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "hullfit/rng.hpp"

using namespace hullfit;

namespace {

// (theta - c)^2 replicated over a fake sample so batching has something to
// chew on.
class ShiftedQuadratic final : public BatchObjective {
 public:
  ShiftedQuadratic(double c, std::size_t n) : c_(c), n_(n) {}
  std::size_t sample_count() const override { return n_; }
  std::size_t param_count() const override { return 1; }
  double batch_value_grad(std::span<const std::uint32_t> idx,
                          std::span<const double> params,
                          std::span<double> grad) const override {
    (void)idx;
    const double e = params[0] - c_;
    grad[0] += 2.0 * e;
    return e * e;
  }

 private:
  double c_;
  std::size_t n_;
};

class ConstantObjective final : public BatchObjective {
 public:
  explicit ConstantObjective(std::size_t n) : n_(n) {}
  std::size_t sample_count() const override { return n_; }
  std::size_t param_count() const override { return 2; }
  double batch_value_grad(std::span<const std::uint32_t>,
                          std::span<const double>,
                          std::span<double>) const override {
    return 7.5;
  }

 private:
  std::size_t n_;
};

}  // namespace

TEST_CASE("adam step with zero gradient leaves parameters unchanged") {
  AdamState state(3, AdamConfig{});
  std::vector<double> p{1.0, -2.0, 0.5};
  const std::vector<double> g{0.0, 0.0, 0.0};
  const auto before = p;
  state.step(p, g);
  CHECK(p == before);
}

TEST_CASE("first adam step moves by roughly lr in the gradient direction") {
  AdamConfig cfg;
  cfg.lr = 1e-3;
  AdamState state(1, cfg);
  std::vector<double> p{0.0};
  state.step(p, std::vector<double>{1.0});
  // bias-corrected first step: -lr * 1 / (1 + eps)
  CHECK(p[0] == doctest::Approx(-1e-3).epsilon(1e-6));
}

TEST_CASE("adam is deterministic and rejects bad input") {
  AdamConfig cfg;
  AdamState s1(2, cfg), s2(2, cfg);
  std::vector<double> p1{1.0, 2.0}, p2{1.0, 2.0};
  const std::vector<double> g{0.3, -0.4};
  for (int i = 0; i < 5; ++i) {
    s1.step(p1, g);
    s2.step(p2, g);
  }
  CHECK(p1 == p2);

  std::vector<double> short_g{1.0};
  CHECK_THROWS(s1.step(p1, short_g));
  std::vector<double> bad{std::nan(""), 0.0};
  CHECK_THROWS(s1.step(p1, bad));
}

TEST_CASE("run_epochs finds the minimum of a shifted quadratic") {
  ShiftedQuadratic obj(3.0, 32);
  AdamConfig adam;
  adam.lr = 0.1;
  adam.batch_size = 8;
  PlateauSchedule sched;
  sched.max_epochs = 300;
  const std::vector<double> init{0.0};
  const FitResult fit = run_epochs(obj, init, adam, sched, 17);
  CHECK(std::abs(fit.params[0] - 3.0) <= 1e-3);
  CHECK(fit.best_value <= obj.full_value(init));
}

TEST_CASE("constant objective returns the initial point") {
  ConstantObjective obj(16);
  const std::vector<double> init{4.0, -1.0};
  PlateauSchedule sched;
  sched.max_epochs = 80;
  const FitResult fit = run_epochs(obj, init, AdamConfig{}, sched, 3);
  CHECK(fit.params == init);
  CHECK(fit.best_value == 7.5);
}

TEST_CASE("plateau schedule reduces lr stepwise down to the floor") {
  ConstantObjective obj(4);  // never improves, so every window plateaus
  AdamConfig adam;
  adam.lr = 1e-3;
  PlateauSchedule sched;
  sched.patience = 3;
  sched.tail_epochs = 4;
  sched.max_epochs = 100;
  const FitResult fit =
      run_epochs(obj, std::vector<double>{0.0, 0.0}, adam, sched, 5);

  std::vector<double> reductions;
  for (const auto& rec : fit.trace)
    if (rec.reduced) reductions.push_back(rec.lr);
  REQUIRE(reductions.size() == 2);
  CHECK(reductions[0] == doctest::Approx(1e-3));
  CHECK(reductions[1] == doctest::Approx(1e-4));

  // lr trace is non-increasing and floored at min_lr; run ends after the tail
  double prev = fit.trace.front().lr;
  for (const auto& rec : fit.trace) {
    CHECK(rec.lr <= prev + 1e-15);
    CHECK(rec.lr >= sched.min_lr - 1e-15);
    prev = rec.lr;
  }
  CHECK(fit.trace.back().lr == doctest::Approx(sched.min_lr));
  // patience on the first two rungs plus the tail
  CHECK(fit.trace.size() == 3 + 3 + 4);
}

namespace {
class ExplodingObjective final : public BatchObjective {
 public:
  std::size_t sample_count() const override { return 8; }
  std::size_t param_count() const override { return 1; }
  double batch_value_grad(std::span<const std::uint32_t>,
                          std::span<const double> params,
                          std::span<double> grad) const override {
    grad[0] += 1.0;
    // objective blows up once the parameter walks far enough
    return params[0] < -0.002 ? std::numeric_limits<double>::infinity() : 1.0;
  }
};
}  // namespace

TEST_CASE("non-finite objective values abort the run") {
  ExplodingObjective obj;
  AdamConfig adam;
  adam.lr = 0.01;
  PlateauSchedule sched;
  sched.max_epochs = 50;
  CHECK_THROWS_AS(
      run_epochs(obj, std::vector<double>{0.0}, adam, sched, 1),
      std::runtime_error);
}

TEST_CASE("run_epochs is deterministic under a fixed seed") {
  ShiftedQuadratic obj(1.5, 50);
  AdamConfig adam;
  adam.lr = 0.05;
  adam.batch_size = 16;
  PlateauSchedule sched;
  sched.max_epochs = 40;
  const FitResult a = run_epochs(obj, std::vector<double>{0.2}, adam, sched, 9);
  const FitResult b = run_epochs(obj, std::vector<double>{0.2}, adam, sched, 9);
  CHECK(a.params == b.params);
  CHECK(a.best_value == b.best_value);
  REQUIRE(a.trace.size() == b.trace.size());
}
