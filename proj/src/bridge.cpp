#include "gflow/bridge.hpp"

#include <cmath>
#include <limits>

#include "gflow/numeric.hpp"
#include "gflow/tildeq.hpp"

namespace gflow {

namespace {

// Column-wise log-sum-exp of M with an additive per-row offset:
// out[j] = log sum_i exp(M(i,j) + add[i]).
Eigen::ArrayXd lse_columns(const Eigen::ArrayXXd& M, const Eigen::ArrayXd& add) {
    const int n = static_cast<int>(M.cols());
    Eigen::ArrayXd out(n);
    Eigen::ArrayXd col(M.rows());
    for (int j = 0; j < n; ++j) {
        col = M.col(j) + add;
        const double mx = col.maxCoeff();
        out[j] = mx + std::log((col - mx).exp().sum());
    }
    return out;
}

}  // namespace

BridgeSolution solve_bridge(const GridDensity& rho0, const GridDensity& rho1,
                            const KernelParams& p, double tol, int max_iter) {
    BridgeOptions opt;
    opt.tol = tol;
    opt.max_iter = max_iter;
    return solve_bridge(rho0, rho1, p, opt);
}

BridgeSolution solve_bridge(const GridDensity& rho0, const GridDensity& rho1,
                            const KernelParams& p, const BridgeOptions& opt) {
    if (!rho0.same_grid(rho1)) throw GridMismatch("solve_bridge: marginal grids differ");
    if (rho0.origin() != 0.0) throw InvalidArgument("solve_bridge: densities must live on [0,L]");
    if ((rho0.values() <= 0.0).any() || (rho1.values() <= 0.0).any())
        throw InvalidArgument("solve_bridge: marginals must be strictly positive");
    if (!(opt.tol > 0.0)) throw InvalidArgument("solve_bridge: tol must be positive");
    const int n = rho0.n_cells();
    const double dx = rho0.dx();
    const double eps = p.epsilon();
    if (eps < 4.0 * dx)
        throw InvalidArgument("solve_bridge: eps = " + format_double(eps) + " < 4 dx = " +
                              format_double(4.0 * dx) + "; refine eps or coarsen the grid");

    // log q0(i,j) = log rho0_i - log(eps sqrt(pi)) - (x_i - x_j)^2 / eps^2
    const Eigen::ArrayXd x = rho0.midpoints();
    const Eigen::ArrayXd logr0 = rho0.values().log();
    const Eigen::ArrayXd logr1 = rho1.values().log();
    Eigen::ArrayXXd logq0(n, n);
    for (int j = 0; j < n; ++j) {
        const double xj = x[j];
        logq0.col(j) = logr0 - std::log(eps * kSqrtPi) - ((x - xj) / eps).square();
    }
    const Eigen::ArrayXXd logq0t = logq0.transpose();
    const double logdx = std::log(dx);

    Eigen::ArrayXd f = Eigen::ArrayXd::Zero(n);
    Eigen::ArrayXd g = Eigen::ArrayXd::Zero(n);
    double err1 = std::numeric_limits<double>::infinity();
    int sweeps = 0;
    while (true) {
        // log sum_i exp(logq0 + f) per column: measures the second-marginal
        // defect of the current state and feeds the next g update.
        const Eigen::ArrayXd lse0f = lse_columns(logq0, f);
        if (sweeps > 0) {
            const Eigen::ArrayXd pi1 = (lse0f + g).exp() * dx;
            err1 = (pi1 - rho1.values()).abs().sum() * dx;
            if (err1 <= opt.tol) break;
            if (sweeps >= opt.max_iter)
                throw Nonconvergence("solve_bridge: marginal defect " + format_double(err1) +
                                         " above tol after max_iter",
                                     err1);
        }
        // match second marginal, then first (so the first ends exact)
        g = logr1 - (lse0f + logdx);
        f = logr0 - (lse_columns(logq0t, g) + logdx);
        ++sweeps;
        if (f.abs().maxCoeff() > opt.potential_bound || g.abs().maxCoeff() > opt.potential_bound)
            throw PotentialOverflow(
                "solve_bridge: scaling potentials exceeded bound (eps too small for grid)");
    }

    Eigen::ArrayXXd q(n, n);
    for (int j = 0; j < n; ++j) q.col(j) = (logq0.col(j) + f + g[j]).exp();
    // H(q | q0): log(q/q0) = f(x) + g(y) cellwise.
    const Eigen::ArrayXd pi0 = q.rowwise().sum() * dx;
    const Eigen::ArrayXd pi1 = q.colwise().sum().transpose() * dx;
    const double j_value = (f * pi0).sum() * dx + (g * pi1).sum() * dx;

    BridgeSolution sol{PairDensity(rho0.length(), std::move(q)),
                       j_value,
                       err1,  // the first marginal is exact after the f sweep
                       sweeps,
                       std::move(f),
                       std::move(g)};
    return sol;
}

double rate_functional(const BridgeSolution& sol, const GridDensity& rho0,
                       const KernelParams& p) {
    const double eps = p.epsilon();
    return pair_entropy(sol.q) - entropy(rho0) + 0.5 * std::log(eps * eps * kPi) +
           coupling_cost(sol.q) / (eps * eps);
}

double gamma_functional(const GridDensity& rho0, const GridDensity& rho1,
                        const KernelParams& p, double tol, double delta, int max_iter) {
    if (!(delta > 0.0 && delta <= 1.0 / 3.0))
        throw InvalidArgument("gamma_functional: delta must lie in (0, 1/3]");
    const ADeltaSpec window(delta, rho0.length());
    if (!in_a_delta(rho0, window) || !in_a_delta(rho1, window))
        throw InvalidArgument("gamma_functional: densities outside the A_delta window");
    const BridgeSolution sol = solve_bridge(rho0, rho1, p, tol, max_iter);
    const double w2 = w2_distance(rho0, rho1);
    return sol.j_value - w2 * w2 / (p.epsilon() * p.epsilon());
}

LowerBoundReport lower_bound_check(const GridDensity& rho0, const GridDensity& rho1,
                                   const KernelParams& p, double tol) {
    const BridgeSolution sol = solve_bridge(rho0, rho1, p, tol, 20000);
    const TransportPotentials pot = potentials(rho0, rho1);
    const TildeQBundle bundle = build_tilde_q(rho0, rho1, pot, p);
    const double h_direct = relative_entropy(sol.q, bundle.q_tilde);
    const double w2 = w2_distance(rho0, rho1);
    const double e0 = entropy(rho0), e1 = entropy(rho1);
    const double chain = sol.j_value - w2 * w2 / (p.epsilon() * p.epsilon()) - 0.5 * e1 +
                         0.5 * e0 + std::log(bundle.z_epsilon);
    LowerBoundReport report;
    report.h_direct = h_direct;
    report.chain_value = chain;
    report.gap = h_direct - chain;
    report.j_value = sol.j_value;
    report.w2_sq = w2 * w2;
    report.z_epsilon = bundle.z_epsilon;
    report.entropy_rho0 = e0;
    report.entropy_rho1 = e1;
    report.pass = std::abs(report.gap) <= 1e-4 && chain >= -1e-4;
    return report;
}

}  // namespace gflow
