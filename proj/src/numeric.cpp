#include "gflow/numeric.hpp"

#include <charconv>
#include <cmath>

#include "gflow/errors.hpp"

namespace gflow {

std::uint64_t SplitMix64::mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

SplitMix64 SplitMix64::stream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(mix(mix(seed) ^ mix(~index)));
}

std::uint64_t SplitMix64::next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double SplitMix64::next_open01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double SplitMix64::next_normal() { return normal_quantile(next_open01()); }

double erf_inv(double w) {
    if (!(w > -1.0 && w < 1.0)) throw InvalidArgument("erf_inv: argument outside (-1,1)");
    if (w == 0.0) return 0.0;
    // Winitzki's approximation as the initial guess, then Newton.
    const double a = 0.147;
    const double lg = std::log(1.0 - w * w);
    const double t1 = 2.0 / (kPi * a) + lg / 2.0;
    double x = std::copysign(std::sqrt(std::sqrt(t1 * t1 - lg / a) - t1), w);
    for (int i = 0; i < 4; ++i) {
        const double err = std::erf(x) - w;
        x -= err * (kSqrtPi / 2.0) * std::exp(x * x);
    }
    return x;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("normal_quantile: p outside (0,1)");
    return std::sqrt(2.0) * erf_inv(2.0 * p - 1.0);
}

const QuadRule& gauss_weight_rule() {
    static const QuadRule rule = [] {
        const int n = 401;
        const double zmax = 8.0;
        QuadRule r;
        r.nodes.resize(n);
        r.weights.resize(n);
        const double h = 2.0 * zmax / (n - 1);
        for (int i = 0; i < n; ++i) {
            const double z = -zmax + i * h;
            r.nodes[i] = z;
            double w = h * std::exp(-z * z);
            if (i == 0 || i == n - 1) w *= 0.5;
            r.weights[i] = w;
        }
        return r;
    }();
    return rule;
}

QuadRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw InvalidArgument("gauss_legendre: n must be >= 1");
    // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double beta = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = beta;
        J(k - 1, k) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    QuadRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = mid + half * es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        r.weights[i] = half * 2.0 * v0 * v0;
    }
    return r;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_g17(double v) {
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

}  // namespace gflow
