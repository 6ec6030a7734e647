#pragma once
// Data-parallel inner loops shared by the trainers: dense affine maps,
// activations, reductions, and the Adam element-wise update.
//
// Every kernel has a scalar reference implementation and (on x86-64) an
// AVX2/FMA variant. The backend is picked once at startup from CPUID and
// can be overridden with set_backend(), e.g. to cross-check the two
// implementations against each other.

#include <cstddef>
#include <string_view>

namespace hullfit::kern {

enum class Backend { scalar, avx2 };

// Backend selected at process start (best available for this CPU).
Backend active_backend();
std::string_view backend_name();

// Force a specific backend. Throws std::invalid_argument if the requested
// backend is not usable on this machine. Intended for tests and benchmarks.
void set_backend(Backend b);
bool backend_available(Backend b);

// ---- reductions ----------------------------------------------------------

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);
// sum_i x[i]
double sum(const double* x, std::size_t n);
// sum_i (a[i] - b[i])^2
double sq_diff_sum(const double* a, const double* b, std::size_t n);

// ---- element-wise maps ---------------------------------------------------

// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);
// x[i] *= a
void scale(double a, double* x, std::size_t n);
// y[i] = (1 - a) * y[i] + a * x[i]
void blend(double a, const double* x, double* y, std::size_t n);
// out[i] = max(z[i], 0)
void relu(const double* z, double* out, std::size_t n);
// out[i] = upstream[i] if z[i] > 0 else 0      (subgradient 0 at z == 0)
void relu_backward(const double* z, const double* upstream, double* out,
                   std::size_t n);
// out[i] = min(max(y[i], -bound), bound)
void clamp(const double* y, double bound, double* out, std::size_t n);
// out[i] = upstream[i] if |y[i]| <= bound else 0   (slope 1 at |y| == bound)
void clamp_backward(const double* y, double bound, const double* upstream,
                    double* out, std::size_t n);

// ---- small dense linear algebra (row-major) ------------------------------

// out[r] = bias[r] + sum_c A[r*cols + c] * x[c]
void matvec(const double* A, const double* x, const double* bias, double* out,
            std::size_t rows, std::size_t cols);
// out[c] += sum_r A[r*cols + c] * u[r]
void matvec_t_acc(const double* A, const double* u, double* out,
                  std::size_t rows, std::size_t cols);
// A[r*cols + c] += u[r] * x[c]
void outer_acc(const double* u, const double* x, double* A, std::size_t rows,
               std::size_t cols);

// ---- optimizer update ----------------------------------------------------

// Bias-corrected Adam step on a flat parameter block.
//   m[i] = b1*m[i] + (1-b1)*g[i]
//   v[i] = b2*v[i] + (1-b2)*g[i]^2
//   p[i] -= lr * (m[i]*inv_bc1) / (sqrt(v[i]*inv_bc2) + eps)
// inv_bc1 = 1/(1-b1^t), inv_bc2 = 1/(1-b2^t) are passed in precomputed.
void adam_update(double* p, double* m, double* v, const double* g,
                 std::size_t n, double lr, double b1, double b2, double eps,
                 double inv_bc1, double inv_bc2);

}  // namespace hullfit::kern
