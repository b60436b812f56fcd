#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "gflow/wasserstein.hpp"

namespace gflow {

/// Real function on the unit torus held as Fourier coefficients
/// u(x) = sum_k u_k e^{2 pi i k x}, k = -n/2 .. n/2 - 1, with conjugate
/// symmetry u_{-k} = conj(u_k) (and u_{-n/2} = 0 so the symmetry is clean).
class TorusFunction {
public:
    /// Coefficients in index order k = -n/2 .. n/2-1; validates symmetry to 1e-12.
    TorusFunction(int n_modes, std::vector<std::complex<double>> coeffs);

    /// Builds from modes k >= 0; negative modes are filled by conjugation.
    static TorusFunction from_positive_modes(
        int n_modes, const std::vector<std::pair<int, std::complex<double>>>& modes);

    /// Recovers coefficients from n_modes equispaced samples (direct DFT).
    static TorusFunction from_samples(const std::vector<double>& samples);

    int n_modes() const { return n_; }
    std::complex<double> coefficient(int k) const;
    double evaluate(double x) const;
    std::vector<double> sample_grid() const;
    /// Largest |k| with a nonzero coefficient.
    int bandwidth() const;

private:
    int n_;
    std::vector<std::complex<double>> c_;  // index i <-> k = i - n/2
};

/// Tent kernel kappa_eps^z: support of width eps*|z| touching the origin
/// (on [-eps z, 0] for z > 0 and mirrored for z < 0), unit mass.
struct KappaKernel {
    double z;
    double epsilon;
    KappaKernel(double z_, double epsilon_);
    double value(double s) const;
    double mass() const { return 1.0; }  // by construction; checked in tests
};

/// Fourier multiplier of kappa_eps^z at frequency omega = 2 pi k eps:
/// -2/(omega z)^2 [e^{i omega z} - 1 - i omega z], with a series branch below
/// |omega z| < 1e-3 to avoid cancellation. Multiplier of the identity at k=0.
std::complex<double> kappa_multiplier(double omega, double z);
/// 1 - kappa_multiplier, computed without cancellation for small omega*z.
std::complex<double> one_minus_kappa_multiplier(double omega, double z);

/// ||u||_eps^2 = sum_k |u_k|^2 (1 - e^{-pi^2 k^2 eps^2}).
double seminorm_sq(const TorusFunction& u, double epsilon);

struct CheckSides {
    double lhs;
    double rhs;
};

/// lhs = int e^{-z^2} int_T (u(x+eps z)-u(x))^2 dx dz  (quadrature in z,
/// exact Fourier shift in x); rhs = 2 sqrt(pi) ||u||_eps^2.
CheckSides fd_identity_check(const TorusFunction& u, double epsilon);

/// Spectral convolution with the tent kernel; z = 0 returns u unchanged.
TorusFunction kappa_convolve(const TorusFunction& u, double z, double epsilon);

/// lhs = int int e^{-z^2} (u - kappa_eps^z * u)^2 z^4 dx dz;
/// rhs = (5/6) sqrt(pi) ||u||_eps^2.
CheckSides uksq_bound_check(const TorusFunction& u, double epsilon);

/// Single-mode closed form of the uksq integral at omega = 2 pi k eps.
double uksq_mode_integral(double omega);

/// ||u||_{eps/alpha} <= ||u||_eps for alpha >= 1, and <= (1/alpha)||u||_eps
/// for alpha <= 1, within 1e-10.
bool xee_scaling_check(const TorusFunction& u, double epsilon, double alpha);

struct ExponentIdentitySample {
    double xi;
    double z;
    double lhs;
    double rhs;
    double rel_error;
};

struct ExponentIdentityReport {
    std::vector<ExponentIdentitySample> samples;
    double max_rel_error;
};

/// Verifies phi(xi+eps z) + phi*(phi'(xi)) - (xi+eps z) phi'(xi)
///        = (z^2 eps^2 / 2) (kappa_eps^z * phi'')(xi)
/// with phi'' from central differences (step 2 dx) feeding the tent integral.
ExponentIdentityReport exponent_identity_check(const TransportPotentials& pot,
                                               const GridDensity& rho0, double epsilon,
                                               const std::vector<std::pair<double, double>>& samples);

/// h(s) = s^{-1/2} int_{sqrt s}^inf e^{-t^2} (t - sqrt s) dt, by quadrature;
/// satisfies h(s) <= e^{-s} / (2 sqrt s). Throws for s <= 0.
double h_function(double s);

}  // namespace gflow
