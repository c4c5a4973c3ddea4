#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace tfgamma {

/// Adaptive Gauss-Kronrod (7/15) integration on [a, b]; `b` may be +infinity.
/// Throws ToleranceNotMet when the error estimate exceeds rel_tol * |value| + abs_tol.
double integrate_adaptive(const std::function<double(double)>& fn, double a, double b, double rel_tol,
                          double abs_tol = 0.0, unsigned max_depth = 30);

/// Fixed nodes and weights for int_a^b g.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    double apply(const std::function<double(double)>& fn) const;
};

/// Composite 8-point Gauss-Legendre rule with `panels` equal panels on [a, b].
QuadratureRule composite_gauss_legendre(double a, double b, std::size_t panels);

/// Composite rule for [a, infinity) via r = a + scale * t / (1 - t), t in (0, 1).
QuadratureRule semi_infinite_rule(double a, double scale, std::size_t panels);

}  // namespace tfgamma
