#pragma once

#include "gflow/grid_measures.hpp"

namespace gflow {

/// Width of the Gaussian transition kernel. The two parametrizations are
/// locked together by epsilon^2 = 4h: h is the time step of the diffusion
/// with generator d^2/dx^2, epsilon the spatial kernel width.
class KernelParams {
public:
    static KernelParams from_epsilon(double epsilon);
    static KernelParams from_time_step(double h);

    double epsilon() const { return epsilon_; }
    double h() const { return epsilon_ * epsilon_ / 4.0; }

private:
    explicit KernelParams(double epsilon) : epsilon_(epsilon) {}
    double epsilon_;
};

/// p_eps(x,y) = exp(-(y-x)^2/eps^2) / (eps sqrt(pi)); symmetric, unit mass in y.
double kernel_value(double x, double y, const KernelParams& p);

struct EvolveResult {
    /// Renormalized density on the enlarged grid (same dx, padded by
    /// ceil(4 eps/dx) cells per side; nothing is clipped).
    GridDensity density;
    /// Mass fraction of `density` outside the input interval.
    double escaped_mass;
};

/// Heat evolution of the zero-extended density: dense midpoint convolution
/// with the kernel on the enlarged grid.
EvolveResult evolve(const GridDensity& rho0, const KernelParams& p);

/// Restriction of an enlarged-grid density to the window [a,b] (which must be
/// cell-aligned); returns the raw window values, mass = 1 - escaped part.
Eigen::ArrayXd restrict_values(const GridDensity& d, double a, double b);

/// The reference coupling q0(x,y) = rho0(x) p_eps(x,y) on [0,L]^2.
/// Not renormalized: its mass is 1 minus the Gaussian boundary leakage.
PairGrid reference_coupling(const GridDensity& rho0, const KernelParams& p);

/// Same, rescaled to a probability.
PairDensity reference_coupling_normalized(const GridDensity& rho0, const KernelParams& p);

}  // namespace gflow
