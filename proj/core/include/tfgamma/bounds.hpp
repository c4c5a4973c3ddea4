#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "tfgamma/densities.hpp"
#include "tfgamma/potentials.hpp"

namespace tfgamma {

/// Quadrature of lambda N int dr int dz a(r)^2 [B^2/2 - B/N]_+ where a(r)^2 B(r, z)^2 = (f * chi_r)^2(z)
/// for a ball family chi_r = a(r) 1_{B(0, R(r))}, i.e. B is the f-mass of the ball around z.
struct ChannelResult {
    double value = 0.0;
    std::vector<double> r_nodes;
    std::vector<double> r_weights;
    /// z_weights[i][j]: weight of z node j at r_nodes[i] (cell volume, or 4 pi s^2 ds for radial densities).
    std::vector<std::vector<double>> z_weights;
    /// samples[i][j]: integrand at (r_nodes[i], z node j), all >= 0.
    std::vector<std::vector<double>> samples;
    /// Closed-form contribution of z nodes whose ball contains the whole support (radial only).
    std::vector<double> core;
    double prefactor = 1.0;  // lambda N

    /// prefactor * sum_i r_weights[i] (core[i] + sum_j z_weights[i][j] samples[i][j]).
    double quadrature() const;
};

struct ChannelOptions {
    /// Relative change below which panel doubling of the r-rule stops (tested on the N = inf integrand).
    double r_tol = 1e-6;
    std::size_t initial_panels = 8;
    std::size_t max_panels = 512;
    std::size_t z_panels = 24;  // radial densities: composite Gauss-Legendre panels in s
    std::size_t t_nodes = 32;   // radial densities: Gauss-Legendre nodes for shell overlaps
};

/// Radial densities in R^3. The r-nodes depend on f and chi only, so the value is exactly
/// nondecreasing in N for fixed lambda N.
ChannelResult interaction_channel(const RadialDensity& f, const ChiFamily& chi, double particles, double lambda,
                                  const ChannelOptions& options = {});
/// Grid densities; requires chi.r_upper finite.
ChannelResult interaction_channel(const GridDensity& f, const ChiFamily& chi, double particles, double lambda,
                                  const ChannelOptions& options = {});

/// "r,z_index,integrand" rows.
void write_channel_csv(std::ostream& os, const ChannelResult& result);

/// 1/2 int int f(x) f(y) w(x - y) on f's grid.
double hartree_direct(const GridDensity& f, const RadialKernel& w);
/// 1/2 int f Phi with the Newton shell potential Phi (Coulomb, R^3).
double hartree_direct(const RadialDensity& f);

/// 1/2 int int f f / |x - y| - 1.68 N^{-2/3} int f^{4/3}; only d = 3.
double lieb_oxford_rhs(const GridDensity& f, double particles);
double lieb_oxford_rhs(const RadialDensity& f, double particles);

/// K_cl int f^3 + N^{-2} int |d sqrt(f)|^2 in d = 1. Central differences on sqrt(max(f, 1e-12));
/// cells next to a zero crossing or the grid edge are skipped.
double march_young_upper(const GridDensity& f, double particles);

}  // namespace tfgamma
