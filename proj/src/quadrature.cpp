#include "fujita/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace fujita {
namespace {

struct SimpsonEval {
  double fa, fm, fb, whole;
};

SimpsonEval simpson(const std::function<double(double)>& f, double a, double b, double fa,
                    double fb) {
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  return {fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb)};
}

double adaptive(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const SimpsonEval left = simpson(f, a, m, fa, fm);
  const SimpsonEval right = simpson(f, m, b, fm, fb);
  const double split = left.whole + right.whole;
  if (depth <= 0 || std::fabs(split - whole) <= 15.0 * tol) {
    return split + (split - whole) / 15.0;
  }
  return adaptive(f, a, m, left.fa, left.fm, left.fb, left.whole, 0.5 * tol, depth - 1) +
         adaptive(f, m, b, right.fa, right.fm, right.fb, right.whole, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b);
  const SimpsonEval top = simpson(f, a, b, fa, fb);
  return adaptive(f, a, b, top.fa, top.fm, top.fb, top.whole, abs_tol, max_depth);
}

double integrate_rel(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  const double coarse = integrate(f, a, b, 1e-14 + 1e-6 * std::fabs(b - a));
  const double scale = std::max(std::fabs(coarse), 1e-300);
  return integrate(f, a, b, rel_tol * scale);
}

}  // namespace fujita
