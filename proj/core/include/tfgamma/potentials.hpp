#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfgamma/grid.hpp"

namespace tfgamma {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Declared (p, q) with the kernel in L^p + L^q. Informational only.
struct IntegrabilityClass {
    double p = kInfinity;
    double q = kInfinity;
};

struct Shell {
    double r_min = 0.0;
    double r_max = 0.0;
    double value = 0.0;
};

/// Radial function s = |x| -> w(s), used for interaction kernels, external potentials and chi_r.
class RadialKernel {
public:
    RadialKernel() = default;
    RadialKernel(std::function<double(double)> profile, double support, bool singular_at_origin, std::string name,
                 IntegrabilityClass integrability = {});

    double operator()(double s) const { return profile_ ? profile_(s) : 0.0; }
    /// Value used on grids: singular kernels are evaluated at spacing/2 for s < spacing/2.
    double grid_value(double s, double spacing) const;

    /// Radius beyond which the kernel vanishes (infinity if not compactly supported).
    double support() const noexcept { return support_; }
    bool singular_at_origin() const noexcept { return singular_; }
    bool is_zero() const noexcept { return !profile_; }
    const std::string& name() const noexcept { return name_; }
    IntegrabilityClass integrability() const noexcept { return integrability_; }

    RadialKernel scaled(double factor) const;
    /// Shell decomposition of piecewise-constant kernels, null otherwise.
    const std::vector<Shell>* shells() const noexcept { return shells_.get(); }

private:
    friend RadialKernel piecewise_constant_kernel(std::vector<Shell> shells);
    std::shared_ptr<const std::vector<Shell>> shells_;
    std::function<double(double)> profile_;
    double support_ = 0.0;
    bool singular_ = false;
    std::string name_ = "zero";
    IntegrabilityClass integrability_;
};

RadialKernel zero_kernel();
/// strength / |x|, singular at the origin.
RadialKernel coulomb_kernel(double strength = 1.0);

/// Sum of shell indicators value * 1_{r_min <= |x| < r_max}.
RadialKernel piecewise_constant_kernel(std::vector<Shell> shells);

/// {type:"piecewise_constant_radial", shells:[{rMin,rMax,value}]}, {type:"builtin", name:"coulomb3d"}
/// or {type:"zero"}.
RadialKernel kernel_from_json(const nlohmann::json& spec);

/// Overlap volume of two radius-r balls in R^d (d = 1, 2, 3) whose centers are s apart.
double ball_self_convolution(double r, double s, int dimension);

/// Family chi_r = amplitude(r) * 1_{B(0, radius(r))} of nonnegative radial ball indicators.
///
/// For such families (chi_r * chi_r)(x) = amplitude(r)^2 * ball_self_convolution(radius(r), |x|, d)
/// in closed form, and w = int_0^inf chi_r * chi_r dr.
struct ChiFamily {
    int dimension = 3;
    std::function<double(double)> amplitude;
    std::function<double(double)> radius;
    /// Smallest r for which chi_r * chi_r can be nonzero at distance s.
    std::function<double(double)> r_lower;
    double r_upper = kInfinity;
    std::string name = "zero";

    bool is_zero() const { return !amplitude; }
    double value(double r, double s) const;
    double self_convolution(double r, double s) const;
    /// chi_r as a radial kernel (compact support radius(r)).
    RadialKernel member(double r) const;
};

/// Coulomb decomposition 1/|x| = (1/pi) int_0^inf r^-5 (1_{B_r} * 1_{B_r})(x) dr, i.e.
/// chi_r = pi^{-1/2} r^{-5/2} 1_{B_r}. Only d = 3.
ChiFamily coulomb_chi(int dimension = 3);
ChiFamily zero_chi(int dimension);
/// User-defined ball family; rejects amplitudes that are negative at the probe radii.
ChiFamily ball_family(int dimension, std::function<double(double)> amplitude, std::function<double(double)> radius,
                      std::function<double(double)> r_lower, double r_upper, std::string name);

/// int_0^inf (chi_r * chi_r)(x) dr at |x| = distance, adaptive quadrature to relative tolerance `tol`.
double fdll_reconstruct(const ChiFamily& chi, double distance, double tol = 1e-8);

/// Discrete convolution (f * k)(x_i) = sum_j f_j k(|x_i - x_j|) h^d on f's grid.
/// With `pad` the output grid grows by the kernel support on each side.
GridField convolve(const GridField& f, const RadialKernel& kernel, bool pad = false);

/// f * chi_r for a single member of a chi family (or any radial function).
GridField convolve_with_chi(const GridDensity& f, const RadialKernel& chi_r, bool pad = false);

/// sum_x sum_y a(x) b(y) w(|x - y|) h^{2d}: the bilinear interaction of two fields on one grid.
/// Uses a kernel table over the support for compact kernels and a sparse pair sum otherwise.
double pair_interaction(const GridField& a, const GridField& b, const RadialKernel& w);

/// Nodewise samples of an arbitrary potential.
GridField sample_potential(const PointFunction& potential, const GridSpec& grid);
/// Samples of V(|x - center|); singular kernels use the half-spacing mask.
GridField sample_potential(const RadialKernel& potential, const GridSpec& grid, const Point& center);

}  // namespace tfgamma
