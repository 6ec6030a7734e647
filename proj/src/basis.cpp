#include "hullfit/basis.hpp"

#include <cmath>
#include <stdexcept>

#include "hullfit/kernels.hpp"
#include "hullfit/rng.hpp"

namespace hullfit {

double hardtanh(double y, double bound) {
  if (y > bound) return bound;
  if (y < -bound) return -bound;
  return y;
}

std::vector<double> hardtanh(std::span<const double> y, double bound) {
  std::vector<double> out(y.size());
  kern::clamp(y.data(), bound, out.data(), y.size());
  return out;
}

BasisModule::BasisModule(const ModuleShape& shape)
    : shape_(shape), params_(shape.param_count(), 0.0) {
  if (shape.input_dim == 0 || shape.hidden == 0 || shape.output_dim == 0)
    throw std::invalid_argument("module dimensions must be positive");
  if (!(shape.bound > 0.0))
    throw std::invalid_argument("module bound B must be positive");
}

void BasisModule::from_vector(std::span<const double> p) {
  if (p.size() != params_.size())
    throw std::invalid_argument("parameter vector length mismatch");
  params_.assign(p.begin(), p.end());
}

void BasisModule::forward(std::span<const double> x,
                          std::span<double> out) const {
  const auto& s = shape_;
  if (x.size() != s.input_dim || out.size() != s.output_dim)
    throw std::invalid_argument("forward: dimension mismatch");
  std::vector<double> a1(s.hidden);
  kern::matvec(w1().data(), x.data(), b1().data(), a1.data(), s.hidden,
               s.input_dim);
  kern::relu(a1.data(), a1.data(), s.hidden);
  kern::matvec(w2().data(), a1.data(), b2().data(), out.data(), s.output_dim,
               s.hidden);
  kern::clamp(out.data(), s.bound, out.data(), s.output_dim);
}

std::vector<double> BasisModule::forward(std::span<const double> x) const {
  std::vector<double> out(shape_.output_dim);
  forward(x, out);
  return out;
}

void BasisModule::forward_batch(const Matrix& X, Matrix& out) const {
  if (X.cols() != shape_.input_dim)
    throw std::invalid_argument("forward_batch: input dimension mismatch");
  if (out.rows() != X.rows() || out.cols() != shape_.output_dim)
    out = Matrix(X.rows(), shape_.output_dim);
  std::vector<double> a1(shape_.hidden);
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const auto x = X.row(r);
    kern::matvec(w1().data(), x.data(), b1().data(), a1.data(), shape_.hidden,
                 shape_.input_dim);
    kern::relu(a1.data(), a1.data(), shape_.hidden);
    auto o = out.row(r);
    kern::matvec(w2().data(), a1.data(), b2().data(), o.data(),
                 shape_.output_dim, shape_.hidden);
    kern::clamp(o.data(), shape_.bound, o.data(), shape_.output_dim);
  }
}

void forward_cached(const BasisModule& g, std::span<const double> x,
                    ModuleWorkspace& ws, std::span<double> out) {
  const auto& s = g.shape();
  if (x.size() != s.input_dim)
    throw std::invalid_argument("forward_cached: dimension mismatch");
  ws.resize(s);
  kern::matvec(g.w1().data(), x.data(), g.b1().data(), ws.z1.data(), s.hidden,
               s.input_dim);
  kern::relu(ws.z1.data(), ws.a1.data(), s.hidden);
  kern::matvec(g.w2().data(), ws.a1.data(), g.b2().data(), ws.y_pre.data(),
               s.output_dim, s.hidden);
  if (!out.empty())
    kern::clamp(ws.y_pre.data(), s.bound, out.data(), s.output_dim);
}

void backward_cached(const BasisModule& g, std::span<const double> x,
                     std::span<const double> upstream, ModuleWorkspace& ws,
                     std::span<double> grad) {
  const auto& s = g.shape();
  if (upstream.size() != s.output_dim || grad.size() != s.param_count())
    throw std::invalid_argument("backward_cached: dimension mismatch");

  kern::clamp_backward(ws.y_pre.data(), s.bound, upstream.data(),
                       ws.u2.data(), s.output_dim);

  const std::size_t w1_len = s.hidden * s.input_dim;
  double* gw1 = grad.data();
  double* gb1 = grad.data() + w1_len;
  double* gw2 = gb1 + s.hidden;
  double* gb2 = gw2 + s.output_dim * s.hidden;

  kern::outer_acc(ws.u2.data(), ws.a1.data(), gw2, s.output_dim, s.hidden);
  kern::axpy(1.0, ws.u2.data(), gb2, s.output_dim);

  std::fill(ws.back.begin(), ws.back.end(), 0.0);
  kern::matvec_t_acc(g.w2().data(), ws.u2.data(), ws.back.data(),
                     s.output_dim, s.hidden);
  kern::relu_backward(ws.z1.data(), ws.back.data(), ws.u1.data(), s.hidden);

  kern::outer_acc(ws.u1.data(), x.data(), gw1, s.hidden, s.input_dim);
  kern::axpy(1.0, ws.u1.data(), gb1, s.hidden);
}

void forward_backward(const BasisModule& g, std::span<const double> x,
                      std::span<const double> upstream, std::span<double> grad,
                      std::span<double> out, ModuleWorkspace& ws) {
  forward_cached(g, x, ws, out);
  backward_cached(g, x, upstream, ws, grad);
}

void BasisModule::grad_params(std::span<const double> x,
                              std::span<const double> upstream,
                              std::span<double> grad) const {
  ModuleWorkspace ws;
  forward_backward(*this, x, upstream, grad, {}, ws);
}

BasisModule init_module(std::uint64_t seed, const ModuleShape& shape) {
  BasisModule g(shape);
  Rng rng(seed);
  const double r1 = 1.0 / std::sqrt(static_cast<double>(shape.input_dim));
  for (double& w : g.w1()) w = rng.uniform(-r1, r1);
  const double r2 = 1.0 / std::sqrt(static_cast<double>(shape.hidden));
  for (double& w : g.w2()) w = rng.uniform(-r2, r2);
  return g;
}

}  // namespace hullfit
