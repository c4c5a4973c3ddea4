#include "tfgamma/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tfgamma/errors.hpp"
#include "tfgamma/quadrature.hpp"

namespace tfgamma {

RadialKernel::RadialKernel(std::function<double(double)> profile, double support, bool singular_at_origin,
                           std::string name, IntegrabilityClass integrability)
    : profile_(std::move(profile)),
      support_(support),
      singular_(singular_at_origin),
      name_(std::move(name)),
      integrability_(integrability) {
    if (!(support_ >= 0.0)) throw ValidationError("kernel support must be >= 0");
}

double RadialKernel::grid_value(double s, double spacing) const {
    if (!profile_) return 0.0;
    if (singular_ && s < 0.5 * spacing) return profile_(0.5 * spacing);
    return profile_(s);
}

RadialKernel RadialKernel::scaled(double factor) const {
    if (!profile_) return *this;
    RadialKernel k = *this;
    auto base = profile_;
    k.profile_ = [base, factor](double s) { return factor * base(s); };
    if (shells_) {
        auto scaled_shells = *shells_;
        for (auto& sh : scaled_shells) sh.value *= factor;
        k.shells_ = std::make_shared<const std::vector<Shell>>(std::move(scaled_shells));
    }
    return k;
}

RadialKernel zero_kernel() { return RadialKernel(); }

RadialKernel coulomb_kernel(double strength) {
    return RadialKernel([strength](double s) { return strength / s; }, kInfinity, true, "coulomb3d", {2.5, kInfinity});
}

RadialKernel piecewise_constant_kernel(std::vector<Shell> shells) {
    double support = 0.0;
    for (const auto& sh : shells) {
        if (!(sh.r_min >= 0.0) || !(sh.r_max > sh.r_min))
            throw ValidationError("kernel shells need 0 <= rMin < rMax");
        support = std::max(support, sh.r_max);
    }
    auto stored = std::make_shared<const std::vector<Shell>>(std::move(shells));
    auto profile = [stored](double s) {
        double v = 0.0;
        for (const auto& sh : *stored)
            if (s >= sh.r_min && s < sh.r_max) v += sh.value;
        return v;
    };
    RadialKernel k(std::move(profile), support, false, "piecewise_constant_radial");
    k.shells_ = std::move(stored);
    return k;
}

RadialKernel kernel_from_json(const nlohmann::json& spec) {
    try {
        const auto type = spec.at("type").get<std::string>();
        if (type == "zero") return zero_kernel();
        if (type == "builtin") {
            const auto name = spec.at("name").get<std::string>();
            if (name == "coulomb3d") return coulomb_kernel(spec.value("strength", 1.0));
            throw ValidationError("unknown builtin kernel '" + name + "'");
        }
        if (type == "piecewise_constant_radial") {
            std::vector<Shell> shells;
            for (const auto& s : spec.at("shells"))
                shells.push_back({s.at("rMin").get<double>(), s.at("rMax").get<double>(), s.at("value").get<double>()});
            return piecewise_constant_kernel(std::move(shells));
        }
        throw ValidationError("unknown kernel type '" + type + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed kernel spec: ") + e.what());
    }
}

double ball_self_convolution(double r, double s, int dimension) {
    if (!(r > 0.0) || !(s >= 0.0)) throw ValidationError("ball_self_convolution needs r > 0 and s >= 0");
    if (s >= 2.0 * r) return 0.0;
    switch (dimension) {
        case 1:
            return 2.0 * r - s;
        case 2:
            return 2.0 * r * r * std::acos(s / (2.0 * r)) - 0.5 * s * std::sqrt(4.0 * r * r - s * s);
        case 3: {
            const double gap = 2.0 * r - s;
            return std::numbers::pi / 12.0 * (4.0 * r + s) * gap * gap;
        }
        default:
            throw UnsupportedDimension("ball_self_convolution supports d = 1, 2, 3");
    }
}

double ChiFamily::value(double r, double s) const {
    if (is_zero() || r > r_upper) return 0.0;
    return s <= radius(r) ? amplitude(r) : 0.0;
}

double ChiFamily::self_convolution(double r, double s) const {
    if (is_zero() || r > r_upper) return 0.0;
    const double a = amplitude(r);
    return a * a * ball_self_convolution(radius(r), s, dimension);
}

RadialKernel ChiFamily::member(double r) const {
    if (is_zero()) return zero_kernel();
    const double a = amplitude(r);
    const double rad = radius(r);
    return RadialKernel([a, rad](double s) { return s <= rad ? a : 0.0; }, rad, false, name + "_member");
}

ChiFamily coulomb_chi(int dimension) {
    if (dimension != 3) throw UnsupportedDimension("the Coulomb chi family exists only in d = 3");
    ChiFamily chi;
    chi.dimension = 3;
    chi.amplitude = [](double r) { return 1.0 / (std::sqrt(std::numbers::pi) * std::pow(r, 2.5)); };
    chi.radius = [](double r) { return r; };
    chi.r_lower = [](double s) { return 0.5 * s; };
    chi.name = "coulomb3d";
    return chi;
}

ChiFamily zero_chi(int dimension) {
    ChiFamily chi;
    chi.dimension = dimension;
    return chi;
}

ChiFamily ball_family(int dimension, std::function<double(double)> amplitude, std::function<double(double)> radius,
                      std::function<double(double)> r_lower, double r_upper, std::string name) {
    if (dimension < 1 || dimension > 3) throw UnsupportedDimension("ball families support d = 1, 2, 3");
    if (!amplitude || !radius) throw ValidationError("ball family needs amplitude and radius");
    const double hi = std::isfinite(r_upper) ? r_upper : 100.0;
    for (int i = 1; i <= 64; ++i) {
        const double r = hi * i / 64.0;
        if (!(amplitude(r) >= 0.0) || !(radius(r) > 0.0))
            throw ValidationError("chi family must be nonnegative with positive radii");
    }
    ChiFamily chi;
    chi.dimension = dimension;
    chi.amplitude = std::move(amplitude);
    chi.radius = std::move(radius);
    chi.r_lower = r_lower ? std::move(r_lower) : [](double) { return 0.0; };
    chi.r_upper = r_upper;
    chi.name = std::move(name);
    return chi;
}

double fdll_reconstruct(const ChiFamily& chi, double distance, double tol) {
    if (chi.is_zero()) return 0.0;
    if (!(distance > 0.0)) throw ValidationError("fdll_reconstruct needs |x| > 0");
    const double lo = chi.r_lower ? chi.r_lower(distance) : 0.0;
    if (!(chi.r_upper > lo)) return 0.0;
    return integrate_adaptive([&](double r) { return chi.self_convolution(r, distance); }, lo, chi.r_upper, tol);
}

GridField convolve(const GridField& f, const RadialKernel& kernel, bool pad) {
    const auto& g = f.grid;
    const int d = g.dimension;
    const double h = g.spacing;
    // Offsets are bounded by the kernel support and by the grid extent.
    std::vector<std::size_t> reach(d);
    for (int a = 0; a < d; ++a) {
        const double cells = std::isfinite(kernel.support()) ? std::ceil(kernel.support() / h) : 1e18;
        reach[a] = static_cast<std::size_t>(std::min<double>(cells, static_cast<double>(g.extents[a] - 1) +
                                                                        (pad ? cells : 0.0)));
        if (!std::isfinite(kernel.support()) && pad) throw ValidationError("cannot pad for a kernel without compact support");
    }
    GridSpec out_grid = g;
    if (pad) {
        for (int a = 0; a < d; ++a) {
            const auto cells = static_cast<std::size_t>(std::ceil(kernel.support() / h));
            out_grid.origin[a] -= static_cast<double>(cells) * h;
            out_grid.extents[a] += 2 * cells;
        }
    }
    GridField out = GridField::zeros(out_grid);
    if (kernel.is_zero()) return out;

    // Kernel table over the offset box [-reach, reach]^d.
    std::vector<std::size_t> width(d);
    std::size_t table_size = 1;
    for (int a = 0; a < d; ++a) {
        width[a] = 2 * reach[a] + 1;
        table_size *= width[a];
    }
    std::vector<double> table(table_size);
    {
        std::vector<std::size_t> idx(d);
        for (std::size_t t = 0; t < table_size; ++t) {
            std::size_t rem = t;
            double s2 = 0.0;
            for (int a = d - 1; a >= 0; --a) {
                idx[a] = rem % width[a];
                rem /= width[a];
                const double off = (static_cast<double>(idx[a]) - static_cast<double>(reach[a])) * h;
                s2 += off * off;
            }
            table[t] = kernel.grid_value(std::sqrt(s2), h) * g.cell_volume();
        }
    }

    std::vector<long> shift(d);
    for (int a = 0; a < d; ++a)
        shift[a] = pad ? static_cast<long>(std::llround((g.origin[a] - out_grid.origin[a]) / h)) : 0;

    std::vector<std::size_t> src(d), dst(d), off(d);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double fv = f.values[i];
        if (fv == 0.0) continue;
        g.unravel(i, src);
        // Visit every offset; accumulate into the output cell src + shift + offset.
        std::fill(off.begin(), off.end(), 0);
        while (true) {
            bool inside = true;
            std::size_t t = 0;
            for (int a = 0; a < d; ++a) {
                const long o = static_cast<long>(off[a]) - static_cast<long>(reach[a]);
                const long x = static_cast<long>(src[a]) + shift[a] + o;
                if (x < 0 || x >= static_cast<long>(out_grid.extents[a])) {
                    inside = false;
                    break;
                }
                dst[a] = static_cast<std::size_t>(x);
                t = t * width[a] + off[a];
            }
            if (inside) out.values[out_grid.ravel(dst)] += fv * table[t];
            int a = d - 1;
            while (a >= 0) {
                if (++off[a] < width[a]) break;
                off[a] = 0;
                --a;
            }
            if (a < 0) break;
        }
    }
    return out;
}

GridField convolve_with_chi(const GridDensity& f, const RadialKernel& chi_r, bool pad) {
    return convolve(f.as_field(), chi_r, pad);
}

GridField sample_potential(const PointFunction& potential, const GridSpec& grid) {
    if (!potential) return GridField::zeros(grid);
    return GridField::sample(grid, potential);
}

GridField sample_potential(const RadialKernel& potential, const GridSpec& grid, const Point& center) {
    if (center.size() != static_cast<std::size_t>(grid.dimension)) throw DimensionMismatch("potential center dimension");
    return GridField::sample(grid, [&](std::span<const double> x) {
        double s2 = 0.0;
        for (std::size_t a = 0; a < center.size(); ++a) s2 += (x[a] - center[a]) * (x[a] - center[a]);
        return potential.grid_value(std::sqrt(s2), grid.spacing);
    });
}

}  // namespace tfgamma

namespace tfgamma {

namespace {

// Smallest integer offset o >= 0 with o * h >= r.
long first_offset_at_least(double r, double h) {
    long o = std::max(0L, static_cast<long>(std::ceil(r / h)) - 1);
    while (static_cast<double>(o) * h < r) ++o;
    return o;
}

// sum_i sum_j a_i b_j w(|i - j| h) h^2 for a piecewise-constant kernel, via prefix sums of b.
double shell_pair_interaction_1d(const GridField& a, const GridField& b, const std::vector<Shell>& shells) {
    const long n = static_cast<long>(a.values.size());
    const double h = a.grid.spacing;
    std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
    for (long j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + b.values[j];
    auto range_sum = [&](long lo, long hi) {  // sum of b over [lo, hi], clipped
        lo = std::max(lo, 0L);
        hi = std::min(hi, n - 1);
        return hi < lo ? 0.0 : prefix[hi + 1] - prefix[lo];
    };
    double total = 0.0;
    for (const auto& sh : shells) {
        const long lo = first_offset_at_least(sh.r_min, h);
        const long hi = first_offset_at_least(sh.r_max, h) - 1;  // o * h < r_max
        if (hi < lo) continue;
        double s = 0.0;
        for (long i = 0; i < n; ++i) {
            const double ai = a.values[i];
            if (ai == 0.0) continue;
            double inner = range_sum(i + lo, i + hi);
            inner += lo == 0 ? range_sum(i - hi, i - 1) : range_sum(i - hi, i - lo);
            s += ai * inner;
        }
        total += sh.value * s;
    }
    return total * h * h;
}

}  // namespace

double pair_interaction(const GridField& a, const GridField& b, const RadialKernel& w) {
    if (w.is_zero()) return 0.0;
    const auto& g = a.grid;
    if (g.dimension != b.grid.dimension) throw DimensionMismatch("pair_interaction: dimensions differ");
    if (g.extents != b.grid.extents || g.origin != b.grid.origin || g.spacing != b.grid.spacing)
        throw ValidationError("pair_interaction needs both fields on the same grid");
    const int d = g.dimension;
    const double h = g.spacing;

    std::vector<std::size_t> nz_a, nz_b;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        if (a.values[i] != 0.0) nz_a.push_back(i);
    for (std::size_t i = 0; i < b.values.size(); ++i)
        if (b.values[i] != 0.0) nz_b.push_back(i);
    if (nz_a.empty() || nz_b.empty()) return 0.0;

    if (d == 1 && w.shells()) return shell_pair_interaction_1d(a, b, *w.shells());

    double offsets = 1.0;
    for (int ax = 0; ax < d; ++ax) {
        double reach = std::isfinite(w.support()) ? std::min<double>(std::ceil(w.support() / h), g.extents[ax] - 1)
                                                  : static_cast<double>(g.extents[ax] - 1);
        offsets *= 2.0 * reach + 1.0;
    }
    if (offsets < static_cast<double>(nz_b.size())) {
        auto conv = convolve(b, w);
        double s = 0.0;
        for (auto i : nz_a) s += a.values[i] * conv.values[i];
        return s * g.cell_volume();
    }

    // Table indexed by absolute per-axis offsets.
    std::size_t table_size = g.size();
    std::vector<double> table(table_size);
    std::vector<std::size_t> idx(d), ia(d), ib(d), off(d);
    for (std::size_t t = 0; t < table_size; ++t) {
        g.unravel(t, idx);
        double s2 = 0.0;
        for (int ax = 0; ax < d; ++ax) s2 += (static_cast<double>(idx[ax]) * h) * (static_cast<double>(idx[ax]) * h);
        table[t] = w.grid_value(std::sqrt(s2), h);
    }
    double total = 0.0;
    for (auto i : nz_a) {
        g.unravel(i, ia);
        double inner = 0.0;
        for (auto j : nz_b) {
            g.unravel(j, ib);
            for (int ax = 0; ax < d; ++ax) off[ax] = ia[ax] > ib[ax] ? ia[ax] - ib[ax] : ib[ax] - ia[ax];
            inner += b.values[j] * table[g.ravel(off)];
        }
        total += a.values[i] * inner;
    }
    return total * g.cell_volume() * g.cell_volume();
}

}  // namespace tfgamma
