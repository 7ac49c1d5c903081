#pragma once

#include <functional>
#include <vector>

namespace sturmq {

// Adaptive Gauss-Kronrod 7/15 panels. Integrable endpoint singularities
// (log blow-ups) are handled by bisection toward the endpoint; max_depth
// caps the recursion so the call always terminates.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, int max_depth = 60);

// Same, with mandatory panel splits at the given interior points.
double integrate_split(const std::function<double(double)>& f, double a, double b,
                       const std::vector<double>& splits, double abs_tol = 1e-10,
                       int max_depth = 60);

} // namespace sturmq
