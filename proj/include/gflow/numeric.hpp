#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

namespace gflow {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrtPi = 1.7724538509055160273;

/// x*log(x) with the convention 0*log(0) = 0.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// Deterministic counter-based stream: SplitMix64 seeded by a mix of
/// (seed, index), so that stream i is independent of evaluation order.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    static std::uint64_t mix(std::uint64_t x);
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next();
    /// Uniform in the open interval (0,1).
    double next_open01();
    /// Standard normal by inverse CDF (one uniform per draw).
    double next_normal();

private:
    std::uint64_t state_;
};

/// Inverse of erf on (-1,1); Newton-refined to full double precision.
double erf_inv(double w);

/// Standard normal quantile, p in (0,1).
double normal_quantile(double p);

/// Quadrature rule: sum_i w[i] * f(x[i]).
struct QuadRule {
    Eigen::ArrayXd nodes;
    Eigen::ArrayXd weights;
};

/// Rule for integrals of the form  int_R e^{-z^2} f(z) dz  with smooth f.
/// Uniform trapezoid on [-zmax, zmax] with the weight folded in; for the
/// default (401 nodes, zmax = 8) the combined truncation and discretization
/// error is below 1e-14 for the integrands used here.
const QuadRule& gauss_weight_rule();

/// n-point Gauss-Legendre rule on [a, b] (Golub-Welsch via Eigen).
QuadRule gauss_legendre(int n, double a, double b);

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

/// Shortest round-trip decimal form of a double (17 significant digits
/// suffice); locale-independent.
std::string format_double(double v);

/// Fixed 17-significant-digit general form, for the density CSV schema.
std::string format_g17(double v);

}  // namespace gflow
