#include "gflow/jko.hpp"

#include <algorithm>
#include <cmath>

#include "gflow/numeric.hpp"
#include "gflow/wasserstein.hpp"

namespace gflow {

namespace {
constexpr double kMonotoneMargin = 1e-10;
}

QuantileProfile::QuantileProfile(Eigen::ArrayXd values) : values_(std::move(values)) {
    if (values_.size() < 2) throw InvalidArgument("QuantileProfile: need at least 2 samples");
    if (!values_.allFinite()) throw InvalidArgument("QuantileProfile: non-finite value");
    for (int i = 1; i < values_.size(); ++i)
        if (!(values_[i] - values_[i - 1] >= kMonotoneMargin))
            throw MonotonicityViolation("QuantileProfile: increments below margin");
}

QuantileProfile QuantileProfile::from_density(const GridDensity& rho, int m) {
    Eigen::ArrayXd q(m);
    for (int i = 0; i < m; ++i) q[i] = quantile(rho, (i + 0.5) / m);
    return QuantileProfile(std::move(q));
}

QuantileProfile QuantileProfile::gaussian(double mean, double variance, int m) {
    if (!(variance > 0.0)) throw InvalidArgument("QuantileProfile: variance must be positive");
    Eigen::ArrayXd q(m);
    const double sd = std::sqrt(variance);
    for (int i = 0; i < m; ++i) q[i] = mean + sd * normal_quantile((i + 0.5) / m);
    return QuantileProfile(std::move(q));
}

double QuantileProfile::mean() const { return values_.mean(); }

double QuantileProfile::variance() const {
    const double mu = values_.mean();
    return (values_ - mu).square().mean();
}

double QuantileProfile::entropy() const {
    const int m = this->m();
    double acc = 0.0;
    for (int i = 0; i + 1 < m; ++i) acc += std::log(m * (values_[i + 1] - values_[i]));
    return -acc / m;
}

GridDensity QuantileProfile::to_density(double length, int n_cells, double origin) const {
    const int m = this->m();
    // CDF knots through (Q_i, s_i), extended linearly to reach 0 and 1.
    Eigen::ArrayXd xs(m + 2), fs(m + 2);
    xs[0] = values_[0] - 0.5 * (values_[1] - values_[0]);
    fs[0] = 0.0;
    for (int i = 0; i < m; ++i) {
        xs[i + 1] = values_[i];
        fs[i + 1] = (i + 0.5) / m;
    }
    xs[m + 1] = values_[m - 1] + 0.5 * (values_[m - 1] - values_[m - 2]);
    fs[m + 1] = 1.0;
    auto cdf = [&](double x) {
        if (x <= xs[0]) return 0.0;
        if (x >= xs[m + 1]) return 1.0;
        const double* b = xs.data();
        int k = static_cast<int>(std::upper_bound(b, b + m + 2, x) - b) - 1;
        k = std::clamp(k, 0, m);
        return fs[k] + (x - xs[k]) / (xs[k + 1] - xs[k]) * (fs[k + 1] - fs[k]);
    };
    const double dx = length / n_cells;
    Eigen::ArrayXd v(n_cells);
    double fl = cdf(origin);
    for (int k = 0; k < n_cells; ++k) {
        const double fr = cdf(origin + (k + 1) * dx);
        v[k] = (fr - fl) / dx;
        fl = fr;
    }
    return GridDensity::normalized(length, std::move(v), origin);
}

JkoConfig::JkoConfig(double h_, int m_) : h(h_), m(m_) {
    if (!(h > 0.0)) throw InvalidArgument("JkoConfig: h must be positive");
    if (m < 16) throw InvalidArgument("JkoConfig: m must be >= 16");
}

double jko_objective(const QuantileProfile& q, const QuantileProfile& prev,
                     const JkoConfig& cfg) {
    if (q.m() != prev.m()) throw GridMismatch("jko_objective: resolutions differ");
    const int m = q.m();
    const double metric = (q.values() - prev.values()).square().sum() / m;
    return metric / (2.0 * cfg.h) + q.entropy() - prev.entropy();
}

QuantileProfile jko_step(const QuantileProfile& prev, const JkoConfig& cfg) {
    if (prev.m() != cfg.m) throw GridMismatch("jko_step: profile resolution != config");
    const int m = cfg.m;
    const double h = cfg.h;
    const Eigen::ArrayXd& P = prev.values();
    Eigen::ArrayXd Q = P;

    auto gradient = [&](const Eigen::ArrayXd& q, Eigen::ArrayXd& grad) {
        const Eigen::ArrayXd inv = 1.0 / (q.tail(m - 1) - q.head(m - 1));
        grad = (q - P) / (m * h);
        grad.head(m - 1) += inv / m;
        grad.tail(m - 1) -= inv / m;
    };
    auto objective = [&](const Eigen::ArrayXd& q) {
        double e = 0.0;
        for (int i = 0; i + 1 < m; ++i) e += std::log((q[i + 1] - q[i]) / (P[i + 1] - P[i]));
        return (q - P).square().sum() / (2.0 * h * m) - e / m;
    };
    auto monotone = [&](const Eigen::ArrayXd& q) {
        for (int i = 0; i + 1 < m; ++i)
            if (!(q[i + 1] - q[i] >= kMonotoneMargin)) return false;
        return true;
    };

    Eigen::ArrayXd grad(m), diag(m), off(m - 1), step(m), a(m), rhs(m), cand(m);
    bool converged = false;
    double gnorm = 0.0;
    for (int it = 0; it < cfg.max_newton; ++it) {
        gradient(Q, grad);
        gnorm = grad.abs().maxCoeff();
        if (gnorm <= cfg.newton_tol) {
            converged = true;
            break;
        }
        const Eigen::ArrayXd inv2 =
            (1.0 / (Q.tail(m - 1) - Q.head(m - 1))).square() / m;
        diag.setConstant(1.0 / (m * h));
        diag.head(m - 1) += inv2;
        diag.tail(m - 1) += inv2;
        off = -inv2;

        // Thomas solve of the tridiagonal system  H step = grad.
        a = diag;
        rhs = grad;
        for (int i = 1; i < m; ++i) {
            const double w = off[i - 1] / a[i - 1];
            a[i] -= w * off[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        step[m - 1] = rhs[m - 1] / a[m - 1];
        for (int i = m - 2; i >= 0; --i) step[i] = (rhs[i] - off[i] * step[i + 1]) / a[i];

        const double obj = objective(Q);
        double tau = 1.0;
        while (true) {
            cand = Q - tau * step;
            if (monotone(cand) && objective(cand) <= obj + 1e-15) break;
            tau *= 0.5;
            if (tau < 1e-12)
                throw MonotonicityViolation("jko_step: line search could not stay monotone");
        }
        Q = cand;
    }
    if (!converged) {
        gradient(Q, grad);
        gnorm = grad.abs().maxCoeff();
        if (gnorm > cfg.newton_tol)
            throw Nonconvergence("jko_step: gradient norm above tol after max_newton", gnorm);
    }
    return QuantileProfile(std::move(Q));
}

std::vector<QuantileProfile> jko_flow_profiles(const QuantileProfile& start,
                                               const JkoConfig& cfg, int steps) {
    if (steps < 1) throw InvalidArgument("jko_flow: steps must be >= 1");
    std::vector<QuantileProfile> out;
    out.reserve(steps + 1);
    out.push_back(start);
    for (int k = 0; k < steps; ++k) out.push_back(jko_step(out.back(), cfg));
    return out;
}

std::vector<GridDensity> jko_flow(const GridDensity& rho0, const JkoConfig& cfg, int steps) {
    if ((rho0.values() <= 0.0).any())
        throw InvalidArgument("jko_flow: density must be strictly positive");
    const auto profiles =
        jko_flow_profiles(QuantileProfile::from_density(rho0, cfg.m), cfg, steps);
    double lo = profiles.front().values().minCoeff();
    double hi = profiles.front().values().maxCoeff();
    for (const auto& p : profiles) {
        lo = std::min(lo, p.values().minCoeff());
        hi = std::max(hi, p.values().maxCoeff());
    }
    const double pad = 0.05 * (hi - lo) + 2.0 * (hi - lo) / cfg.m;
    std::vector<GridDensity> out;
    out.reserve(profiles.size());
    for (const auto& p : profiles)
        out.push_back(p.to_density(hi - lo + 2.0 * pad, rho0.n_cells(), lo - pad));
    return out;
}

}  // namespace gflow
