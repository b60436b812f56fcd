#include "gflow/seminorm.hpp"

#include <algorithm>
#include <cmath>

#include "gflow/numeric.hpp"

namespace gflow {

namespace {

bool is_pow2(int n) { return n >= 2 && (n & (n - 1)) == 0; }

}  // namespace

TorusFunction::TorusFunction(int n_modes, std::vector<std::complex<double>> coeffs)
    : n_(n_modes), c_(std::move(coeffs)) {
    if (!is_pow2(n_)) throw InvalidArgument("TorusFunction: n_modes must be a power of two");
    if (static_cast<int>(c_.size()) != n_)
        throw InvalidArgument("TorusFunction: coefficient count != n_modes");
    if (std::abs(c_[0]) > 1e-12)
        throw InvalidArgument("TorusFunction: the unpaired mode k=-n/2 must vanish");
    if (std::abs(c_[n_ / 2].imag()) > 1e-12)
        throw InvalidArgument("TorusFunction: k=0 coefficient must be real");
    for (int k = 1; k < n_ / 2; ++k) {
        const auto diff = c_[n_ / 2 - k] - std::conj(c_[n_ / 2 + k]);
        if (std::abs(diff) > 1e-12)
            throw InvalidArgument("TorusFunction: conjugate symmetry violated");
    }
}

TorusFunction TorusFunction::from_positive_modes(
    int n_modes, const std::vector<std::pair<int, std::complex<double>>>& modes) {
    std::vector<std::complex<double>> c(n_modes, 0.0);
    for (const auto& [k, v] : modes) {
        if (k < 0 || k >= n_modes / 2)
            throw InvalidArgument("TorusFunction: mode index outside [0, n/2)");
        c[n_modes / 2 + k] = v;
        if (k > 0)
            c[n_modes / 2 - k] = std::conj(v);
        else
            c[n_modes / 2] = std::complex<double>(v.real(), 0.0);
    }
    return TorusFunction(n_modes, std::move(c));
}

TorusFunction TorusFunction::from_samples(const std::vector<double>& samples) {
    const int n = static_cast<int>(samples.size());
    if (!is_pow2(n)) throw InvalidArgument("TorusFunction: sample count must be a power of two");
    std::vector<std::complex<double>> c(n, 0.0);
    for (int k = -n / 2; k < n / 2; ++k) {
        std::complex<double> acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double ang = -2.0 * kPi * k * j / n;
            acc += samples[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        c[n / 2 + k] = acc / static_cast<double>(n);
    }
    // Roundoff can leave ~1e-17 junk in the unpaired slot; clear it.
    if (std::abs(c[0]) < 1e-12) c[0] = 0.0;
    c[n / 2] = std::complex<double>(c[n / 2].real(), 0.0);
    return TorusFunction(n, std::move(c));
}

std::complex<double> TorusFunction::coefficient(int k) const {
    if (k < -n_ / 2 || k >= n_ / 2) return 0.0;
    return c_[n_ / 2 + k];
}

double TorusFunction::evaluate(double x) const {
    double acc = c_[n_ / 2].real();
    for (int k = 1; k < n_ / 2; ++k) {
        const auto ck = c_[n_ / 2 + k];
        const double ang = 2.0 * kPi * k * x;
        acc += 2.0 * (ck.real() * std::cos(ang) - ck.imag() * std::sin(ang));
    }
    return acc;
}

std::vector<double> TorusFunction::sample_grid() const {
    std::vector<double> out(n_);
    for (int j = 0; j < n_; ++j) out[j] = evaluate(static_cast<double>(j) / n_);
    return out;
}

int TorusFunction::bandwidth() const {
    int b = 0;
    for (int k = -n_ / 2; k < n_ / 2; ++k)
        if (std::abs(coefficient(k)) > 0.0) b = std::max(b, std::abs(k));
    return b;
}

KappaKernel::KappaKernel(double z_, double epsilon_) : z(z_), epsilon(epsilon_) {
    if (z == 0.0) throw InvalidArgument("KappaKernel: z must be nonzero");
    if (!(epsilon > 0.0)) throw InvalidArgument("KappaKernel: epsilon must be positive");
}

double KappaKernel::value(double s) const {
    const double sigma = s / epsilon;
    double v = 0.0;
    if (z > 0.0) {
        if (sigma >= -z && sigma <= 0.0) v = 2.0 * (z + sigma) / (z * z);
    } else {
        if (sigma >= 0.0 && sigma <= -z) v = -2.0 * (z + sigma) / (z * z);
    }
    return v / epsilon;
}

std::complex<double> kappa_multiplier(double omega, double z) {
    const double w = omega * z;
    if (std::abs(w) < 1e-3) {
        // -2(e^{iw}-1-iw)/w^2 expanded; below |w|=1e-3 the truncation is ~1e-19.
        return {1.0 - w * w / 12.0 + w * w * w * w / 360.0,
                w / 3.0 - w * w * w / 60.0 + w * w * w * w * w / 2520.0};
    }
    const std::complex<double> iw(0.0, w);
    return -2.0 * (std::exp(iw) - 1.0 - iw) / (w * w);
}

std::complex<double> one_minus_kappa_multiplier(double omega, double z) {
    const double w = omega * z;
    if (std::abs(w) < 0.05) {
        return {w * w / 12.0 - w * w * w * w / 360.0,
                -w / 3.0 + w * w * w / 60.0 - w * w * w * w * w / 2520.0};
    }
    return 1.0 - kappa_multiplier(omega, z);
}

double seminorm_sq(const TorusFunction& u, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("seminorm_sq: epsilon must be positive");
    double acc = 0.0;
    const int n = u.n_modes();
    for (int k = -n / 2; k < n / 2; ++k) {
        if (k == 0) continue;
        const double a = std::norm(u.coefficient(k));
        if (a == 0.0) continue;
        acc += a * (1.0 - std::exp(-kPi * kPi * k * k * epsilon * epsilon));
    }
    return acc;
}

CheckSides fd_identity_check(const TorusFunction& u, double epsilon) {
    const auto& rule = gauss_weight_rule();
    double lhs = 0.0;
    const int n = u.n_modes();
    for (int k = -n / 2; k < n / 2; ++k) {
        if (k == 0) continue;
        const double a = std::norm(u.coefficient(k));
        if (a == 0.0) continue;
        const double omega = 2.0 * kPi * k * epsilon;
        double zint = 0.0;
        for (int i = 0; i < rule.nodes.size(); ++i)
            zint += rule.weights[i] * 2.0 * (1.0 - std::cos(omega * rule.nodes[i]));
        lhs += a * zint;
    }
    return {lhs, 2.0 * kSqrtPi * seminorm_sq(u, epsilon)};
}

TorusFunction kappa_convolve(const TorusFunction& u, double z, double epsilon) {
    const int n = u.n_modes();
    std::vector<std::complex<double>> c(n, 0.0);
    for (int k = -n / 2; k < n / 2; ++k) {
        auto ck = u.coefficient(k);
        if (k != 0 && z != 0.0) ck *= kappa_multiplier(2.0 * kPi * k * epsilon, z);
        c[n / 2 + k] = ck;
    }
    return TorusFunction(n, std::move(c));
}

static double uksq_mode_integral_quad(double omega) {
    const auto& rule = gauss_weight_rule();
    double acc = 0.0;
    for (int i = 0; i < rule.nodes.size(); ++i) {
        const double z = rule.nodes[i];
        const double z2 = z * z;
        acc += rule.weights[i] * z2 * z2 * std::norm(one_minus_kappa_multiplier(omega, z));
    }
    return acc;
}

CheckSides uksq_bound_check(const TorusFunction& u, double epsilon) {
    double lhs = 0.0;
    const int n = u.n_modes();
    for (int k = -n / 2; k < n / 2; ++k) {
        if (k == 0) continue;
        const double a = std::norm(u.coefficient(k));
        if (a == 0.0) continue;
        lhs += a * uksq_mode_integral_quad(2.0 * kPi * k * epsilon);
    }
    return {lhs, (5.0 / 6.0) * kSqrtPi * seminorm_sq(u, epsilon)};
}

double uksq_mode_integral(double omega) {
    if (omega == 0.0) return 0.0;
    const double w2 = omega * omega;
    const double e = std::exp(-w2 / 4.0);
    return (4.0 * kSqrtPi / (w2 * w2)) *
           (2.0 - 2.0 * e + (3.0 / 16.0) * w2 * w2 - 0.5 * w2 * e - 0.25 * w2 * w2 * e);
}

bool xee_scaling_check(const TorusFunction& u, double epsilon, double alpha) {
    if (!(alpha > 0.0)) throw InvalidArgument("xee_scaling_check: alpha must be positive");
    const double lhs = std::sqrt(seminorm_sq(u, epsilon / alpha));
    const double base = std::sqrt(seminorm_sq(u, epsilon));
    const double bound = alpha >= 1.0 ? base : base / alpha;
    return lhs <= bound + 1e-10;
}

ExponentIdentityReport exponent_identity_check(
    const TransportPotentials& pot, const GridDensity& rho0, double epsilon,
    const std::vector<std::pair<double, double>>& samples) {
    const int n = rho0.n_cells();
    const double dx = rho0.dx();
    const double lo = rho0.origin() + 2.5 * dx;
    const double hi = rho0.origin() + rho0.length() - 2.5 * dx;

    // phi'' by central differences with step 2 dx on the midpoint grid.
    Eigen::ArrayXd u(n);
    for (int i = 2; i < n - 2; ++i)
        u[i] = (pot.phi()[i + 2] - 2.0 * pot.phi()[i] + pot.phi()[i - 2]) / (4.0 * dx * dx);
    u[0] = u[1] = u[2];
    u[n - 1] = u[n - 2] = u[n - 3];
    auto u_at = [&](double x) {
        const double t = (x - rho0.origin()) / dx - 0.5;
        const int k = std::clamp(static_cast<int>(std::floor(t)), 0, n - 2);
        return u[k] + (t - k) * (u[k + 1] - u[k]);
    };

    static const QuadRule tent_rule = gauss_legendre(32, 0.0, 1.0);
    ExponentIdentityReport report;
    report.max_rel_error = 0.0;
    for (const auto& [xi, z] : samples) {
        const double xe = xi + epsilon * z;
        if (xi < lo || xi > hi || xe < lo || xe > hi)
            throw InvalidArgument("exponent_identity_check: sample outside the safe interior");
        const double txi = pot.map_at(xi);
        const double lhs = pot.phi_at(xe) + pot.phi_star_at(txi) - xe * txi;
        double integral = 0.0;
        for (int i = 0; i < tent_rule.nodes.size(); ++i) {
            const double t = tent_rule.nodes[i];
            integral += tent_rule.weights[i] * (1.0 - t) * u_at(xi + epsilon * z * t);
        }
        const double rhs = epsilon * epsilon * z * z * integral;
        const double denom = std::max(std::abs(lhs), std::abs(rhs));
        const double rel = denom < 1e-15 ? 0.0 : std::abs(lhs - rhs) / denom;
        report.samples.push_back({xi, z, lhs, rhs, rel});
        report.max_rel_error = std::max(report.max_rel_error, rel);
    }
    return report;
}

double h_function(double s) {
    if (!(s > 0.0)) throw InvalidArgument("h_function: s must be positive");
    const double rs = std::sqrt(s);
    // substitute t = zeta - sqrt(s): integrand e^{-(t+rs)^2} t on [0, inf).
    // The decay rate grows with s, so the truncation width shrinks with it;
    // the discarded tail is below e^{-30} of the value for every s.
    static const QuadRule base = gauss_legendre(96, 0.0, 1.0);
    const double width = 2.0 + 15.0 / (1.0 + rs);
    double acc = 0.0;
    for (int i = 0; i < base.nodes.size(); ++i) {
        const double t = width * base.nodes[i];
        acc += width * base.weights[i] * std::exp(-(t + rs) * (t + rs)) * t;
    }
    return acc / rs;
}

}  // namespace gflow
