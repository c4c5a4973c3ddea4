#include "tfgamma/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <string>

#include "tfgamma/errors.hpp"

namespace tfgamma {

double integrate_adaptive(const std::function<double(double)>& fn, double a, double b, double rel_tol,
                          double abs_tol, unsigned max_depth) {
    if (!(rel_tol > 0.0)) throw ValidationError("quadrature tolerance must be positive");
    if (a == b) return 0.0;
    double err = 0.0;
    double l1 = 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    // Boost's termination test is relative to the L1 norm; ask for a bit more than needed.
    double value = GK::integrate(fn, a, b, max_depth, 0.1 * rel_tol, &err, &l1);
    if (!std::isfinite(value) || err > rel_tol * std::abs(value) + abs_tol)
        throw ToleranceNotMet("adaptive quadrature did not converge (error estimate " + std::to_string(err) + ")",
                              err);
    return value;
}

double QuadratureRule::apply(const std::function<double(double)>& fn) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * fn(nodes[i]);
    return s;
}

QuadratureRule composite_gauss_legendre(double a, double b, std::size_t panels) {
    using G = boost::math::quadrature::gauss<double, 8>;
    QuadratureRule rule;
    if (panels == 0 || !(b > a)) return rule;
    const auto& x = G::abscissa();  // nonnegative half of the symmetric rule
    const auto& w = G::weights();
    const double width = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = a + (static_cast<double>(p) + 0.5) * width;
        const double half = 0.5 * width;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == 0.0) {
                rule.nodes.push_back(mid);
                rule.weights.push_back(half * w[i]);
                continue;
            }
            rule.nodes.push_back(mid - half * x[i]);
            rule.weights.push_back(half * w[i]);
            rule.nodes.push_back(mid + half * x[i]);
            rule.weights.push_back(half * w[i]);
        }
    }
    return rule;
}

QuadratureRule semi_infinite_rule(double a, double scale, std::size_t panels) {
    auto base = composite_gauss_legendre(0.0, 1.0, panels);
    QuadratureRule rule;
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
        const double t = base.nodes[i];
        rule.nodes.push_back(a + scale * t / (1.0 - t));
        rule.weights.push_back(base.weights[i] * scale / ((1.0 - t) * (1.0 - t)));
    }
    return rule;
}

}  // namespace tfgamma
