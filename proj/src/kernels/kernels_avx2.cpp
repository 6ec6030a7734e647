// AVX2/FMA kernel variants. This file is compiled with -mavx2 -mfma and is
// only entered after the dispatcher has confirmed CPU support at runtime.

#if defined(HULLFIT_HAVE_AVX2)

#include <immintrin.h>

#include <cstddef>

namespace hullfit::kern::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d va = _mm256_loadu_pd(a + i);
    __m256d vb = _mm256_loadu_pd(b + i);
    acc = _mm256_fmadd_pd(va, vb, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double sq_diff_sum(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, double* x, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

void blend(double a, const double* x, double* y, std::size_t n) {
  const double keep = 1.0 - a;
  __m256d vk = _mm256_set1_pd(keep);
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_mul_pd(vk, _mm256_loadu_pd(y + i));
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] = keep * y[i] + a * x[i];
}

void relu(const double* z, double* out, std::size_t n) {
  __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_max_pd(_mm256_loadu_pd(z + i), zero));
  for (; i < n; ++i) out[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_backward(const double* z, const double* upstream, double* out,
                   std::size_t n) {
  __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(z + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(out + i,
                     _mm256_and_pd(mask, _mm256_loadu_pd(upstream + i)));
  }
  for (; i < n; ++i) out[i] = z[i] > 0.0 ? upstream[i] : 0.0;
}

void clamp(const double* y, double bound, double* out, std::size_t n) {
  __m256d vb = _mm256_set1_pd(bound);
  __m256d vnb = _mm256_set1_pd(-bound);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(y + i);
    v = _mm256_min_pd(v, vb);
    v = _mm256_max_pd(v, vnb);
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < n; ++i) {
    double v = y[i];
    if (v > bound) v = bound;
    if (v < -bound) v = -bound;
    out[i] = v;
  }
}

void clamp_backward(const double* y, double bound, const double* upstream,
                    double* out, std::size_t n) {
  __m256d vb = _mm256_set1_pd(bound);
  __m256d vnb = _mm256_set1_pd(-bound);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(y + i);
    __m256d inside = _mm256_and_pd(_mm256_cmp_pd(v, vnb, _CMP_GE_OQ),
                                   _mm256_cmp_pd(v, vb, _CMP_LE_OQ));
    _mm256_storeu_pd(out + i,
                     _mm256_and_pd(inside, _mm256_loadu_pd(upstream + i)));
  }
  for (; i < n; ++i)
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
  __m256d vb1 = _mm256_set1_pd(b1);
  __m256d vb2 = _mm256_set1_pd(b2);
  __m256d vc1 = _mm256_set1_pd(1.0 - b1);
  __m256d vc2 = _mm256_set1_pd(1.0 - b2);
  __m256d vlr = _mm256_set1_pd(lr);
  __m256d veps = _mm256_set1_pd(eps);
  __m256d vi1 = _mm256_set1_pd(inv_bc1);
  __m256d vi2 = _mm256_set1_pd(inv_bc2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vg = _mm256_loadu_pd(g + i);
    __m256d vm = _mm256_fmadd_pd(vb1, _mm256_loadu_pd(m + i),
                                 _mm256_mul_pd(vc1, vg));
    __m256d vv = _mm256_fmadd_pd(vb2, _mm256_loadu_pd(v + i),
                                 _mm256_mul_pd(vc2, _mm256_mul_pd(vg, vg)));
    _mm256_storeu_pd(m + i, vm);
    _mm256_storeu_pd(v + i, vv);
    __m256d num = _mm256_mul_pd(vm, vi1);
    __m256d den = _mm256_add_pd(_mm256_sqrt_pd(_mm256_mul_pd(vv, vi2)), veps);
    __m256d vp = _mm256_loadu_pd(p + i);
    vp = _mm256_sub_pd(vp, _mm256_mul_pd(vlr, _mm256_div_pd(num, den)));
    _mm256_storeu_pd(p + i, vp);
  }
  for (; i < n; ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
    p[i] -= lr * (m[i] * inv_bc1) / (__builtin_sqrt(v[i] * inv_bc2) + eps);
  }
}

}  // namespace hullfit::kern::avx2

#endif  // HULLFIT_HAVE_AVX2
