// Scalar reference kernels and the runtime dispatch table.
// The AVX2 variants live in kernels_avx2.cpp (compiled with -mavx2 -mfma);
// this translation unit stays at the baseline ISA so the scalar path runs
// anywhere.

#include "hullfit/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace hullfit::kern {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double sq_diff_sum(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void blend(double a, const double* x, double* y, std::size_t n) {
  const double keep = 1.0 - a;
  for (std::size_t i = 0; i < n; ++i) y[i] = keep * y[i] + a * x[i];
}

void relu(const double* z, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_backward(const double* z, const double* upstream, double* out,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = z[i] > 0.0 ? upstream[i] : 0.0;
}

void clamp(const double* y, double bound, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double v = y[i];
    if (v > bound) v = bound;
    if (v < -bound) v = -bound;
    out[i] = v;
  }
}

void clamp_backward(const double* y, double bound, const double* upstream,
                    double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = (y[i] >= -bound && y[i] <= bound) ? upstream[i] : 0.0;
}

void matvec(const double* A, const double* x, const double* bias, double* out,
            std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r)
    out[r] = bias[r] + dot(A + r * cols, x, cols);
}

void matvec_t_acc(const double* A, const double* u, double* out,
                  std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy(u[r], A + r * cols, out, cols);
}

void outer_acc(const double* u, const double* x, double* A, std::size_t rows,
               std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy(u[r], x, A + r * cols, cols);
}

void adam_update(double* p, double* m, double* v, const double* g,
                 std::size_t n, double lr, double b1, double b2, double eps,
                 double inv_bc1, double inv_bc2) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
    p[i] -= lr * (m[i] * inv_bc1) / (std::sqrt(v[i] * inv_bc2) + eps);
  }
}

}  // namespace scalar

#if defined(HULLFIT_HAVE_AVX2)
namespace avx2 {
double dot(const double*, const double*, std::size_t);
double sum(const double*, std::size_t);
double sq_diff_sum(const double*, const double*, std::size_t);
void axpy(double, const double*, double*, std::size_t);
void scale(double, double*, std::size_t);
void blend(double, const double*, double*, std::size_t);
void relu(const double*, double*, std::size_t);
void relu_backward(const double*, const double*, double*, std::size_t);
void clamp(const double*, double, double*, std::size_t);
void clamp_backward(const double*, double, const double*, double*,
                    std::size_t);
void matvec(const double*, const double*, const double*, double*, std::size_t,
            std::size_t);
void matvec_t_acc(const double*, const double*, double*, std::size_t,
                  std::size_t);
void outer_acc(const double*, const double*, double*, std::size_t,
               std::size_t);
void adam_update(double*, double*, double*, const double*, std::size_t, double,
                 double, double, double, double, double);
}  // namespace avx2
#endif

namespace {

struct Dispatch {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*sq_diff_sum)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  void (*blend)(double, const double*, double*, std::size_t);
  void (*relu)(const double*, double*, std::size_t);
  void (*relu_backward)(const double*, const double*, double*, std::size_t);
  void (*clamp)(const double*, double, double*, std::size_t);
  void (*clamp_backward)(const double*, double, const double*, double*,
                         std::size_t);
  void (*matvec)(const double*, const double*, const double*, double*,
                 std::size_t, std::size_t);
  void (*matvec_t_acc)(const double*, const double*, double*, std::size_t,
                       std::size_t);
  void (*outer_acc)(const double*, const double*, double*, std::size_t,
                    std::size_t);
  void (*adam_update)(double*, double*, double*, const double*, std::size_t,
                      double, double, double, double, double, double);
};

constexpr Dispatch kScalar = {
    scalar::dot,           scalar::sum,        scalar::sq_diff_sum,
    scalar::axpy,          scalar::scale,      scalar::blend,
    scalar::relu,          scalar::relu_backward,
    scalar::clamp,         scalar::clamp_backward,
    scalar::matvec,        scalar::matvec_t_acc,
    scalar::outer_acc,     scalar::adam_update};

#if defined(HULLFIT_HAVE_AVX2)
constexpr Dispatch kAvx2 = {
    avx2::dot,           avx2::sum,        avx2::sq_diff_sum,
    avx2::axpy,          avx2::scale,      avx2::blend,
    avx2::relu,          avx2::relu_backward,
    avx2::clamp,         avx2::clamp_backward,
    avx2::matvec,        avx2::matvec_t_acc,
    avx2::outer_acc,     avx2::adam_update};
#endif

bool cpu_has_avx2() {
#if defined(HULLFIT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct State {
  Backend backend;
  const Dispatch* table;
};

State& state() {
  static State s = [] {
#if defined(HULLFIT_HAVE_AVX2)
    if (cpu_has_avx2()) return State{Backend::avx2, &kAvx2};
#endif
    return State{Backend::scalar, &kScalar};
  }();
  return s;
}

}  // namespace

Backend active_backend() { return state().backend; }

std::string_view backend_name() {
  return state().backend == Backend::avx2 ? "avx2" : "scalar";
}

bool backend_available(Backend b) {
  if (b == Backend::scalar) return true;
  return cpu_has_avx2();
}

void set_backend(Backend b) {
  if (!backend_available(b))
    throw std::invalid_argument("kernel backend not available on this CPU");
  if (b == Backend::scalar) {
    state() = {Backend::scalar, &kScalar};
    return;
  }
#if defined(HULLFIT_HAVE_AVX2)
  state() = {Backend::avx2, &kAvx2};
#endif
}

double dot(const double* a, const double* b, std::size_t n) {
  return state().table->dot(a, b, n);
}
double sum(const double* x, std::size_t n) { return state().table->sum(x, n); }
double sq_diff_sum(const double* a, const double* b, std::size_t n) {
  return state().table->sq_diff_sum(a, b, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) {
  state().table->axpy(a, x, y, n);
}
void scale(double a, double* x, std::size_t n) {
  state().table->scale(a, x, n);
}
void blend(double a, const double* x, double* y, std::size_t n) {
  state().table->blend(a, x, y, n);
}
void relu(const double* z, double* out, std::size_t n) {
  state().table->relu(z, out, n);
}
void relu_backward(const double* z, const double* upstream, double* out,
                   std::size_t n) {
  state().table->relu_backward(z, upstream, out, n);
}
void clamp(const double* y, double bound, double* out, std::size_t n) {
  state().table->clamp(y, bound, out, n);
}
void clamp_backward(const double* y, double bound, const double* upstream,
                    double* out, std::size_t n) {
  state().table->clamp_backward(y, bound, upstream, out, n);
}
void matvec(const double* A, const double* x, const double* bias, double* out,
            std::size_t rows, std::size_t cols) {
  state().table->matvec(A, x, bias, out, rows, cols);
}
void matvec_t_acc(const double* A, const double* u, double* out,
                  std::size_t rows, std::size_t cols) {
  state().table->matvec_t_acc(A, u, out, rows, cols);
}
void outer_acc(const double* u, const double* x, double* A, std::size_t rows,
               std::size_t cols) {
  state().table->outer_acc(u, x, A, rows, cols);
}
void adam_update(double* p, double* m, double* v, const double* g,
                 std::size_t n, double lr, double b1, double b2, double eps,
                 double inv_bc1, double inv_bc2) {
  state().table->adam_update(p, m, v, g, n, lr, b1, b2, eps, inv_bc1, inv_bc2);
}

}  // namespace hullfit::kern
