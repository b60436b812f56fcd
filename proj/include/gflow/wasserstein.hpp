#pragma once

#include "gflow/grid_measures.hpp"

namespace gflow {

/// Inverse of the piecewise-linear CDF: the unique x with CDF(x) = s.
/// Throws UndefinedQuantile when s lands exactly on a flat CDF value over an
/// interior zero plateau (the only ambiguous case); cannot happen for
/// strictly positive densities.
double quantile(const GridDensity& rho, double s);

/// Quadratic Wasserstein distance sqrt( int_0^1 (Q0 - Q1)^2 ds ), midpoint
/// quadrature with 4*max(n0,n1) nodes.
double w2_distance(const GridDensity& rho0, const GridDensity& rho1);

/// Kantorovich pair for the quadratic cost in 1D, built from the monotone
/// rearrangement T = Q1 o F0.
///
/// Internally phi and phi* are exact antiderivatives of the piecewise-linear
/// map sampled on the shared quantile knots (s-knots = union of both CDF edge
/// values), which makes phi(x) + phi*(T(x)) = x T(x) and Young's inequality
/// hold to machine precision everywhere on the grid. phi is anchored by
/// phi(left edge) = 0.
class TransportPotentials {
public:
    /// Sampled values on the x-grid midpoints.
    const Eigen::ArrayXd& phi() const { return phi_; }
    const Eigen::ArrayXd& map() const { return map_; }
    /// Sampled values on the y-grid midpoints.
    const Eigen::ArrayXd& phi_star() const { return phi_star_; }

    double phi_at(double x) const;
    double phi_star_at(double y) const;
    double map_at(double x) const;
    double inverse_map_at(double y) const;

    /// CSV `x,phi,map` / `y,phi_star`.
    void write_csv(std::ostream& xs, std::ostream& ys,
                   const std::vector<std::string>& comments = {}) const;

private:
    friend TransportPotentials potentials(const GridDensity&, const GridDensity&);
    TransportPotentials() = default;

    // Shared knots: xk, yk strictly increasing, yk = T(xk); phik, phisk the
    // antiderivative values of T and T^{-1} at the knots.
    Eigen::ArrayXd xk_, yk_, phik_, phisk_;
    Eigen::ArrayXd xs_, ys_;            // sample grids (midpoints)
    Eigen::ArrayXd phi_, phi_star_, map_;

    static double interp_linear(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b, double x);
    static double antideriv_at(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b,
                               const Eigen::ArrayXd& cumint, double x);
};

/// Kantorovich pair achieving w2(rho0, rho1); both densities must be strictly
/// positive.
TransportPotentials potentials(const GridDensity& rho0, const GridDensity& rho1);

/// d(q)^2 = sum (x-y)^2 q dx^2.
double coupling_cost(const PairDensity& q);

/// 2 * sum (phi(x) + phi*(y) - x y) q dx^2; equals
/// coupling_cost(q) - w2(marginals)^2 for potentials built from q's marginals.
double duality_gap(const PairDensity& q, const TransportPotentials& pot);

}  // namespace gflow
