#include "hullfit/scalar_min.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hullfit {

namespace {
// (3 - sqrt(5)) / 2, the golden-section fraction
constexpr double kGolden = 0.3819660112501051;
}  // namespace

ScalarMinResult brent_min(const std::function<double(double)>& f, double a,
                          double b, double tol, int max_iter) {
  if (!(a < b)) throw std::invalid_argument("brent_min: need a < b");
  const double eps = std::sqrt(std::numeric_limits<double>::epsilon());

  double x = a + kGolden * (b - a);
  double fx = f(x);
  int evals = 1;
  double v = x, w = x, fv = fx, fw = fx;
  double d = 0.0, e = 0.0;

  for (int it = 0; it < max_iter; ++it) {
    const double m = 0.5 * (a + b);
    const double t = eps * std::abs(x) + tol;
    if (std::abs(x - m) <= 2.0 * t - 0.5 * (b - a)) break;

    double p = 0.0, q = 0.0, r = 0.0;
    if (std::abs(e) > t) {
      // try a parabolic step through (x, w, v)
      r = (x - w) * (fx - fv);
      q = (x - v) * (fx - fw);
      p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      r = e;
      e = d;
    }
    if (std::abs(p) < std::abs(0.5 * q * r) && p > q * (a - x) &&
        p < q * (b - x)) {
      d = p / q;
      double u = x + d;
      if (u - a < 2.0 * t || b - u < 2.0 * t) d = (x < m) ? t : -t;
    } else {
      e = (x < m ? b : a) - x;
      d = kGolden * e;
    }
    const double u =
        x + (std::abs(d) >= t ? d : (d > 0.0 ? t : -t));
    const double fu = f(u);
    ++evals;
    if (fu <= fx) {
      if (u < x)
        b = x;
      else
        a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x)
        a = u;
      else
        b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return {x, fx, evals};
}

ScalarMinResult golden_min(const std::function<double(double)>& f, double a,
                           double b, double tol, int max_iter) {
  if (!(a < b)) throw std::invalid_argument("golden_min: need a < b");
  double x1 = a + kGolden * (b - a);
  double x2 = b - kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  int evals = 2;
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1; f2 = f1;
      x1 = a + kGolden * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2; f1 = f2;
      x2 = b - kGolden * (b - a);
      f2 = f(x2);
    }
    ++evals;
  }
  return f1 < f2 ? ScalarMinResult{x1, f1, evals}
                 : ScalarMinResult{x2, f2, evals};
}

}  // namespace hullfit
