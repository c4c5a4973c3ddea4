#include "tfgamma/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "tfgamma/errors.hpp"
#include "tfgamma/quadrature.hpp"
#include "tfgamma/tf.hpp"

namespace tfgamma {

namespace {

constexpr double kPi = std::numbers::pi;

// Ball masses of a radial density: B(rho, s) = f-mass of the ball of radius rho centered at distance s.
class BallMass {
public:
    BallMass(const RadialDensity& f, std::size_t t_nodes) : f_(f) {
        const auto& g = f.grid;
        cumulative_.assign(g.points + 1, 0.0);
        for (std::size_t i = 0; i < g.points; ++i) {
            const double r = g.node(i);
            cumulative_[i + 1] = cumulative_[i] + 4.0 * kPi * r * r * f.values[i] * g.weight(i);
        }
        total_ = cumulative_.back();
        // Effective support: the outer edge of the last cell carrying non-negligible mass.
        std::size_t last = 0;
        for (std::size_t i = g.points; i-- > 0;)
            if (total_ - cumulative_[i] > 1e-15 * total_) {
                last = i;
                break;
            }
        support_ = g.r_min * std::exp(static_cast<double>(last + 1) * g.delta());
        unit_ = composite_gauss_legendre(0.0, 1.0, std::max<std::size_t>(1, t_nodes / 8));
    }

    double total() const { return total_; }
    double support() const { return support_; }

    double enclosed(double r) const {
        const auto& g = f_.grid;
        if (r <= g.r_min) return 0.0;
        const double t = std::log(std::min(r, g.r_max) / g.r_min) / g.delta();
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(t), g.points);
        if (k >= g.points) return total_;
        return cumulative_[k] + (t - static_cast<double>(k)) * (cumulative_[k + 1] - cumulative_[k]);
    }

    double operator()(double rho, double s) const {
        if (rho >= s + support_) return total_;
        double m = rho > s ? enclosed(rho - s) : 0.0;
        const double lo = std::abs(s - rho);
        const double hi = std::min(s + rho, support_);
        if (hi > lo && s > 0.0) {
            double cap = 0.0;
            for (std::size_t q = 0; q < unit_.nodes.size(); ++q) {
                const double t = lo + (hi - lo) * unit_.nodes[q];
                const double chord = rho * rho - (t - s) * (t - s);
                if (chord > 0.0) cap += unit_.weights[q] * f_.value_at(t) * kPi * t * chord / s;
            }
            m += cap * (hi - lo);
        }
        return std::min(m, total_);
    }

private:
    const RadialDensity& f_;
    std::vector<double> cumulative_;
    double total_ = 0.0;
    double support_ = 0.0;
    QuadratureRule unit_;
};

double bracket(double B, double particles, bool limit) {
    const double v = limit ? 0.5 * B * B : 0.5 * B * B - B / particles;
    return v > 0.0 ? v : 0.0;
}

struct RadialSlice {
    double core = 0.0;
    std::vector<double> weights;
    std::vector<double> samples;
};

RadialSlice radial_slice(const BallMass& B, const ChiFamily& chi, double r, double particles, bool limit,
                         std::size_t z_panels) {
    RadialSlice slice;
    if (r > chi.r_upper) return slice;
    const double a = chi.amplitude(r);
    const double a2 = a * a;
    const double rho = chi.radius(r);
    const double R = B.support();
    double s_lo = 0.0;
    if (rho > R) {
        s_lo = rho - R;
        slice.core = 4.0 * kPi / 3.0 * s_lo * s_lo * s_lo * a2 * bracket(B.total(), particles, limit);
    }
    const auto rule = composite_gauss_legendre(s_lo, rho + R, z_panels);
    slice.weights.resize(rule.nodes.size());
    slice.samples.resize(rule.nodes.size());
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double s = rule.nodes[j];
        slice.weights[j] = 4.0 * kPi * s * s * rule.weights[j];
        slice.samples[j] = a2 * bracket(B(rho, s), particles, limit);
    }
    return slice;
}

double slice_value(const RadialSlice& s) {
    double v = s.core;
    for (std::size_t j = 0; j < s.samples.size(); ++j) v += s.weights[j] * s.samples[j];
    return v;
}

}  // namespace

double ChannelResult::quadrature() const {
    double v = 0.0;
    for (std::size_t i = 0; i < r_nodes.size(); ++i) {
        double inner = core.empty() ? 0.0 : core[i];
        for (std::size_t j = 0; j < samples[i].size(); ++j) inner += z_weights[i][j] * samples[i][j];
        v += r_weights[i] * inner;
    }
    return prefactor * v;
}

ChannelResult interaction_channel(const RadialDensity& f, const ChiFamily& chi, double particles, double lambda,
                                  const ChannelOptions& options) {
    if (!(particles >= 1.0)) throw ValidationError("interaction_channel needs N >= 1");
    if (!(lambda >= 0.0)) throw ValidationError("interaction_channel needs lambda >= 0");
    ChannelResult out;
    out.prefactor = lambda * particles;
    if (chi.is_zero()) return out;
    if (chi.dimension != 3) throw DimensionMismatch("radial densities live in R^3");
    const BallMass B(f, options.t_nodes);
    if (B.total() == 0.0) return out;

    // Fix the r-rule on the N = infinity integrand so the nodes do not depend on N.
    const double scale = B.support();
    auto limit_value = [&](const QuadratureRule& rule) {
        double v = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            v += rule.weights[i] * slice_value(radial_slice(B, chi, rule.nodes[i], particles, true, options.z_panels));
        return v;
    };
    std::size_t panels = options.initial_panels;
    auto rule = semi_infinite_rule(0.0, scale, panels);
    double previous = limit_value(rule);
    while (panels < options.max_panels) {
        auto finer = semi_infinite_rule(0.0, scale, 2 * panels);
        const double v = limit_value(finer);
        panels *= 2;
        rule = std::move(finer);
        const bool done = std::abs(v - previous) <= options.r_tol * std::abs(v);
        previous = v;
        if (done) break;
    }

    out.r_nodes = rule.nodes;
    out.r_weights = rule.weights;
    for (double r : rule.nodes) {
        auto slice = radial_slice(B, chi, r, particles, false, options.z_panels);
        out.core.push_back(slice.core);
        out.z_weights.push_back(std::move(slice.weights));
        out.samples.push_back(std::move(slice.samples));
    }
    out.value = out.quadrature();
    return out;
}

ChannelResult interaction_channel(const GridDensity& f, const ChiFamily& chi, double particles, double lambda,
                                  const ChannelOptions& options) {
    if (!(particles >= 1.0)) throw ValidationError("interaction_channel needs N >= 1");
    if (!(lambda >= 0.0)) throw ValidationError("interaction_channel needs lambda >= 0");
    ChannelResult out;
    out.prefactor = lambda * particles;
    if (chi.is_zero()) return out;
    if (chi.dimension != f.dimension()) throw DimensionMismatch("chi family and density dimensions differ");
    if (!std::isfinite(chi.r_upper))
        throw ValidationError("grid interaction channel needs a chi family with finite r range");

    const auto field = f.as_field();
    const double cell = f.grid().cell_volume();
    auto ball_masses = [&](double r) {
        const double rho = chi.radius(r);
        const RadialKernel indicator([rho](double s) { return s <= rho ? 1.0 : 0.0; }, rho, false, "ball");
        return convolve(field, indicator, true).values;
    };
    auto slice = [&](double r, bool limit) {
        const double a = chi.amplitude(r);
        auto b = ball_masses(r);
        for (double& v : b) v = a * a * bracket(v, particles, limit);
        return b;
    };
    auto limit_value = [&](const QuadratureRule& rule) {
        double v = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            double inner = 0.0;
            for (double s : slice(rule.nodes[i], true)) inner += s;
            v += rule.weights[i] * inner * cell;
        }
        return v;
    };
    std::size_t panels = options.initial_panels;
    auto rule = composite_gauss_legendre(0.0, chi.r_upper, panels);
    double previous = limit_value(rule);
    while (panels < options.max_panels) {
        auto finer = composite_gauss_legendre(0.0, chi.r_upper, 2 * panels);
        const double v = limit_value(finer);
        panels *= 2;
        rule = std::move(finer);
        const bool done = std::abs(v - previous) <= options.r_tol * std::abs(v);
        previous = v;
        if (done) break;
    }

    out.r_nodes = rule.nodes;
    out.r_weights = rule.weights;
    for (double r : rule.nodes) {
        auto samples = slice(r, false);
        out.z_weights.emplace_back(samples.size(), cell);
        out.samples.push_back(std::move(samples));
    }
    out.value = out.quadrature();
    return out;
}

void write_channel_csv(std::ostream& os, const ChannelResult& result) {
    os << "r,z_index,integrand\n";
    char buf[64];
    for (std::size_t i = 0; i < result.r_nodes.size(); ++i)
        for (std::size_t j = 0; j < result.samples[i].size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", result.r_nodes[i]);
            os << buf << ',' << j << ',';
            std::snprintf(buf, sizeof buf, "%.17g", result.samples[i][j]);
            os << buf << '\n';
        }
}

double hartree_direct(const GridDensity& f, const RadialKernel& w) {
    if (w.is_zero()) return 0.0;
    const auto field = f.as_field();
    return 0.5 * pair_interaction(field, field, w);
}

double hartree_direct(const RadialDensity& f) {
    const auto phi = newton_potential(f);
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double r = f.grid.node(i);
        s += phi[i] * f.values[i] * 4.0 * kPi * r * r * f.grid.weight(i);
    }
    return 0.5 * s;
}

double lieb_oxford_rhs(const GridDensity& f, double particles) {
    if (f.dimension() != 3) throw UnsupportedDimension("the Lieb-Oxford bound is stated for d = 3");
    if (!(particles > 0.0)) throw ValidationError("particle number must be positive");
    double p = 0.0;
    for (double v : f.values()) p += std::pow(v, 4.0 / 3.0);
    p *= f.grid().cell_volume();
    return hartree_direct(f, coulomb_kernel()) - 1.68 * std::pow(particles, -2.0 / 3.0) * p;
}

double lieb_oxford_rhs(const RadialDensity& f, double particles) {
    if (!(particles > 0.0)) throw ValidationError("particle number must be positive");
    return hartree_direct(f) - 1.68 * std::pow(particles, -2.0 / 3.0) * f.power_integral(4.0 / 3.0);
}

double march_young_upper(const GridDensity& f, double particles) {
    if (f.dimension() != 1) throw UnsupportedDimension("march_young_upper is a d = 1 diagnostic");
    if (!(particles > 0.0)) throw ValidationError("particle number must be positive");
    constexpr double floor = 1e-12;
    const auto& v = f.values();
    const double h = f.spacing();
    double cubic = 0.0;
    for (double x : v) cubic += x * x * x;
    double gradient = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        const bool inside = v[i - 1] > floor && v[i] > floor && v[i + 1] > floor;
        if (!inside) continue;
        const double d = (std::sqrt(v[i + 1]) - std::sqrt(v[i - 1])) / (2.0 * h);
        gradient += d * d;
    }
    return kcl(1, 1) * cubic * h + gradient * h / (particles * particles);
}

}  // namespace tfgamma
