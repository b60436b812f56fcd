#pragma once

#include "gflow/heat.hpp"
#include "gflow/wasserstein.hpp"

namespace gflow {

/// The explicit pair measure built from the Kantorovich potentials, its
/// normalization, the marginal correction factor and the recovery coupling.
struct TildeQBundle {
    /// q~ / Z_eps (a probability by construction of Z on the same grid).
    PairDensity q_tilde;
    double z_epsilon;
    /// chi(x) = rho0(x) / pi0 q~(x) on the x-grid.
    Eigen::ArrayXd chi;
    /// chi(x) q~(x,y): first marginal equals rho0 cellwise.
    PairDensity q_recovery;
};

/// Cellwise q~ ∝ sqrt(rho0(x)) sqrt(rho1(y)) exp[(2/eps^2)(xy - phi(x) - phi*(y))]
/// with prefactor 1/(eps sqrt(pi)); Z by the same midpoint quadrature.
/// Requires strictly positive densities and eps >= 4 dx.
TildeQBundle build_tilde_q(const GridDensity& rho0, const GridDensity& rho1,
                           const TransportPotentials& pot, const KernelParams& p);

/// Evaluates (1/eps) int sqrt(rho1(y)) exp[(2/eps^2)(xy - phi(x) - phi*(y))] dy
/// at a fixed interior x and returns its ratio to the Laplace-limit prediction
/// sqrt(pi) sqrt(rho0(x)); the ratio tends to 1 as eps -> 0 (except within
/// O(eps) of the endpoints, where a half-Gaussian gives ~1/2).
double watson_pointwise(const GridDensity& rho0, const GridDensity& rho1,
                        const TransportPotentials& pot, const KernelParams& p, double x);

struct TildeQReport {
    double epsilon;
    double z_epsilon;
    double l1_pi0;  // L1(pi0 q~, rho0)
    double l1_pi1;  // L1(pi1 q_recovery, rho1)
    // Extrema over interior cells (boundary layer of width 3 eps excluded).
    double chi_min, chi_max;
    double pi0_min, pi0_max;
    double pi1_min, pi1_max;
    // Extrema over the excluded boundary layer, reported separately.
    double chi_min_boundary, chi_max_boundary;
};

TildeQReport marginal_convergence_report(const TildeQBundle& bundle, const GridDensity& rho0,
                                         const GridDensity& rho1, const KernelParams& p);

}  // namespace gflow
