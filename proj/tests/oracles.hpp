// Test-only reference implementations, kept independent of the library paths
// they are used to check.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>

namespace oracles {

/// Adaptive Simpson quadrature to absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

/// Minimal quadratic-cost matching of two 4-point uniform measures by
/// enumerating all 24 permutations; returns the squared cost.
double lp4_cost_sq(const std::array<double, 4>& xs, const std::array<double, 4>& ys);

/// Minimal relative entropy sum m_ij log(m_ij / ref_ij) over 3x3 nonnegative
/// matrices with fixed row/column mass vectors, by coordinate-wise
/// golden-section descent on the 4 free entries. Masses, not densities.
double bridge3x3_min(const Eigen::Matrix3d& ref_mass, const Eigen::Vector3d& row_mass,
                     const Eigen::Vector3d& col_mass);

/// Closed-form normalization for the uniform/uniform pair on [0,1]:
/// erf(1/eps) - eps (1 - e^{-1/eps^2}) / sqrt(pi).
double z_uniform_closed_form(double eps);

/// h(s) in closed form: e^{-s}/(2 sqrt s) - (sqrt(pi)/2) erfc(sqrt s).
double h_closed_form(double s);

/// Smallest h on a brute-force grid with F(x-h)-h <= G(x) <= F(x+h)+h for the
/// staircase CDFs of two cell densities on [0,L].
double levy_bruteforce(const Eigen::ArrayXd& v0, const Eigen::ArrayXd& v1, double L);

}  // namespace oracles
