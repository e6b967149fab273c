#pragma once

#include <cmath>
#include <functional>

namespace fujita {

// Adaptive Simpson with absolute tolerance. Recursion depth is bounded;
// smooth integrands (warps, volume integrands) converge long before the cap.
double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 int max_depth = 48);

// Relative-tolerance wrapper: runs one pass to scale the tolerance, then refines.
double integrate_rel(const std::function<double(double)>& f, double a, double b, double rel_tol);

}  // namespace fujita
