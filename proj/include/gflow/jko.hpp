#pragma once

#include <vector>

#include "gflow/grid_measures.hpp"

namespace gflow {

/// Quantile-function samples Q(s_i) at midpoints s_i = (i+1/2)/m, strictly
/// increasing with margin 1e-10. Parametrizes a measure on the line by its
/// monotone rearrangement, in which the one-step functional below is convex.
class QuantileProfile {
public:
    explicit QuantileProfile(Eigen::ArrayXd values);

    static QuantileProfile from_density(const GridDensity& rho, int m);
    static QuantileProfile gaussian(double mean, double variance, int m);

    int m() const { return static_cast<int>(values_.size()); }
    const Eigen::ArrayXd& values() const { return values_; }

    double mean() const;
    double variance() const;
    /// Entropy in quantile form: -(1/m) sum log(m (Q_{i+1} - Q_i)).
    double entropy() const;

    /// Density recovered by differencing the piecewise-linear CDF through
    /// (Q_i, s_i) on a uniform grid [origin, origin + length]; mass-exact
    /// when the grid covers the natural support extension.
    GridDensity to_density(double length, int n_cells, double origin) const;

private:
    Eigen::ArrayXd values_;
};

struct JkoConfig {
    double h;                    // time step
    int m;                       // quantile resolution, >= 16
    double newton_tol = 1e-10;   // sup-norm of the objective gradient
    int max_newton = 60;
    JkoConfig(double h_, int m_);
};

/// One-step objective (1/2h)(1/m) sum (Q-P)^2 - (1/m) sum log(m dQ)
/// offset so that the value at prev is 0.
double jko_objective(const QuantileProfile& q, const QuantileProfile& prev,
                     const JkoConfig& cfg);

/// Minimizer of the one-step functional by damped Newton (tridiagonal
/// Hessian, monotonicity-preserving backtracking).
QuantileProfile jko_step(const QuantileProfile& prev, const JkoConfig& cfg);

/// steps successive minimizations starting from prev.
std::vector<QuantileProfile> jko_flow_profiles(const QuantileProfile& start,
                                               const JkoConfig& cfg, int steps);

/// Same, starting from a grid density and converting each state back to a
/// density on a shared enlarged grid (rho0.n_cells() cells).
std::vector<GridDensity> jko_flow(const GridDensity& rho0, const JkoConfig& cfg, int steps);

}  // namespace gflow
