#pragma once
// The bounded basis model: a two-layer ReLU network whose output is clamped
// to [-B, B] by a scaled hard-tanh. Forward evaluation and analytic
// parameter gradients, plus the flat parameter-vector layout used by the
// optimizer.

#include <cstdint>
#include <span>
#include <vector>

#include "hullfit/matrix.hpp"

namespace hullfit {

struct ModuleShape {
  std::size_t input_dim = 0;    // d
  std::size_t hidden = 1;       // h
  std::size_t output_dim = 1;   // m
  double bound = 10.0;          // B

  std::size_t param_count() const {
    return hidden * input_dim + hidden + output_dim * hidden + output_dim;
  }
};

// Flat layout: W1 row-major, b1, W2 row-major, b2.
using ParamVector = std::vector<double>;

class BasisModule {
 public:
  BasisModule() = default;
  explicit BasisModule(const ModuleShape& shape);

  const ModuleShape& shape() const { return shape_; }
  std::size_t param_count() const { return shape_.param_count(); }
  double bound() const { return shape_.bound; }

  // W1: h x d, b1: h, W2: m x h, b2: m, all views into flat storage.
  std::span<double> w1() { return block(0, shape_.hidden * shape_.input_dim); }
  std::span<double> b1() {
    return block(shape_.hidden * shape_.input_dim, shape_.hidden);
  }
  std::span<double> w2() {
    return block(shape_.hidden * shape_.input_dim + shape_.hidden,
                 shape_.output_dim * shape_.hidden);
  }
  std::span<double> b2() {
    return block(shape_.param_count() - shape_.output_dim, shape_.output_dim);
  }
  std::span<const double> w1() const {
    return cblock(0, shape_.hidden * shape_.input_dim);
  }
  std::span<const double> b1() const {
    return cblock(shape_.hidden * shape_.input_dim, shape_.hidden);
  }
  std::span<const double> w2() const {
    return cblock(shape_.hidden * shape_.input_dim + shape_.hidden,
                  shape_.output_dim * shape_.hidden);
  }
  std::span<const double> b2() const {
    return cblock(shape_.param_count() - shape_.output_dim,
                  shape_.output_dim);
  }

  std::span<const double> params() const { return params_; }
  ParamVector to_vector() const { return params_; }
  void from_vector(std::span<const double> p);

  // out = hardtanh(W2 relu(W1 x + b1) + b2, B)
  void forward(std::span<const double> x, std::span<double> out) const;
  std::vector<double> forward(std::span<const double> x) const;

  // Fills `out` (n x m) with forward passes over the rows of X.
  void forward_batch(const Matrix& X, Matrix& out) const;

  // Accumulates d(upstream . forward(x)) / dtheta into grad (+=).
  // Subgradients: 0 at a ReLU kink, slope 1 at the clamp boundary.
  void grad_params(std::span<const double> x, std::span<const double> upstream,
                   std::span<double> grad) const;

 private:
  std::span<double> block(std::size_t off, std::size_t len) {
    return {params_.data() + off, len};
  }
  std::span<const double> cblock(std::size_t off, std::size_t len) const {
    return {params_.data() + off, len};
  }

  ModuleShape shape_;
  ParamVector params_;
};

// y -> max(-B, min(y, B)), coordinate-wise.
double hardtanh(double y, double bound);
std::vector<double> hardtanh(std::span<const double> y, double bound);

// Deterministic initialization: weights uniform on [-1/sqrt(fan_in),
// 1/sqrt(fan_in)], biases zero.
BasisModule init_module(std::uint64_t seed, const ModuleShape& shape);

// Scratch space for a forward/backward pass; reuse across samples to avoid
// re-allocation in the training loops.
struct ModuleWorkspace {
  std::vector<double> z1;      // pre-activation, h
  std::vector<double> a1;      // relu(z1), h
  std::vector<double> y_pre;   // pre-clamp output, m
  std::vector<double> u2;      // upstream through the clamp, m
  std::vector<double> back;    // W2^T u2, h
  std::vector<double> u1;      // back through relu, h

  void resize(const ModuleShape& s) {
    z1.resize(s.hidden);
    a1.resize(s.hidden);
    y_pre.resize(s.output_dim);
    u2.resize(s.output_dim);
    back.resize(s.hidden);
    u1.resize(s.hidden);
  }
};

// Forward pass that keeps the intermediate activations in ws so a backward
// pass can follow; writes the clamped output when out is non-empty.
void forward_cached(const BasisModule& g, std::span<const double> x,
                    ModuleWorkspace& ws, std::span<double> out);

// Backward pass for the x that produced ws; accumulates into grad (+=).
void backward_cached(const BasisModule& g, std::span<const double> x,
                     std::span<const double> upstream, ModuleWorkspace& ws,
                     std::span<double> grad);

// forward + grad in one pass with caller-provided scratch; out may be empty
// if only the gradient is needed.
void forward_backward(const BasisModule& g, std::span<const double> x,
                      std::span<const double> upstream, std::span<double> grad,
                      std::span<double> out, ModuleWorkspace& ws);

}  // namespace hullfit
