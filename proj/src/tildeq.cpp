#include "gflow/tildeq.hpp"

#include <cmath>

#include "gflow/numeric.hpp"

namespace gflow {

TildeQBundle build_tilde_q(const GridDensity& rho0, const GridDensity& rho1,
                           const TransportPotentials& pot, const KernelParams& p) {
    if (!rho0.same_grid(rho1)) throw GridMismatch("build_tilde_q: grids differ");
    if ((rho0.values() <= 0.0).any() || (rho1.values() <= 0.0).any())
        throw InvalidArgument("build_tilde_q: densities must be strictly positive");
    const int n = rho0.n_cells();
    const double dx = rho0.dx();
    const double eps = p.epsilon();
    if (eps < 4.0 * dx) throw InvalidArgument("build_tilde_q: eps < 4 dx");

    const Eigen::ArrayXd x = rho0.midpoints();
    const Eigen::ArrayXd sr0 = rho0.values().sqrt();
    const Eigen::ArrayXd sr1 = rho1.values().sqrt();
    const Eigen::ArrayXd phi = pot.phi();
    const Eigen::ArrayXd phis = pot.phi_star();

    Eigen::ArrayXXd raw(n, n);
    const double pref = 1.0 / (eps * kSqrtPi);
    for (int j = 0; j < n; ++j) {
        const double yj = x[j];
        raw.col(j) =
            pref * sr0 * sr1[j] * ((2.0 / (eps * eps)) * (x * yj - phi - phis[j])).exp();
    }
    const double z = raw.sum() * dx * dx;
    if (!(z > 0.0) || !std::isfinite(z))
        throw InvalidArgument("build_tilde_q: degenerate normalization");
    raw /= z;

    PairDensity q_tilde(rho0.length(), raw);
    const Eigen::ArrayXd pi0 = q_tilde.grid().marginal0_values();
    if ((pi0 <= 0.0).any())
        throw InvalidArgument("build_tilde_q: first marginal vanishes on a cell");
    const Eigen::ArrayXd chi = rho0.values() / pi0;

    Eigen::ArrayXXd rec = q_tilde.values();
    for (int j = 0; j < n; ++j) rec.col(j) *= chi;
    PairDensity q_recovery(rho0.length(), std::move(rec));
    return TildeQBundle{std::move(q_tilde), z, chi, std::move(q_recovery)};
}

double watson_pointwise(const GridDensity& rho0, const GridDensity& rho1,
                        const TransportPotentials& pot, const KernelParams& p, double x) {
    const double eps = p.epsilon();
    const double phix = pot.phi_at(x);
    double acc = 0.0;
    for (int j = 0; j < rho1.n_cells(); ++j) {
        const double y = rho1.midpoint(j);
        acc += std::sqrt(rho1.value(j)) *
               std::exp((2.0 / (eps * eps)) * (x * y - phix - pot.phi_star_at(y)));
    }
    const double integral = acc * rho1.dx() / eps;
    // nearest-cell value of rho0 at x
    int i = static_cast<int>((x - rho0.origin()) / rho0.dx());
    i = std::min(std::max(i, 0), rho0.n_cells() - 1);
    return integral / (kSqrtPi * std::sqrt(rho0.value(i)));
}

TildeQReport marginal_convergence_report(const TildeQBundle& bundle, const GridDensity& rho0,
                                         const GridDensity& rho1, const KernelParams& p) {
    const int n = rho0.n_cells();
    const double dx = rho0.dx();
    const double eps = p.epsilon();
    const Eigen::ArrayXd pi0 = bundle.q_tilde.grid().marginal0_values();
    const Eigen::ArrayXd pi1 = bundle.q_tilde.grid().marginal1_values();
    const Eigen::ArrayXd pi1_rec = bundle.q_recovery.grid().marginal1_values();

    TildeQReport r{};
    r.epsilon = eps;
    r.z_epsilon = bundle.z_epsilon;
    r.l1_pi0 = (pi0 - rho0.values()).abs().sum() * dx;
    r.l1_pi1 = (pi1_rec - rho1.values()).abs().sum() * dx;

    const int skip = std::min(static_cast<int>(std::ceil(3.0 * eps / dx)), n / 2 - 1);
    const int len = n - 2 * skip;
    r.chi_min = bundle.chi.segment(skip, len).minCoeff();
    r.chi_max = bundle.chi.segment(skip, len).maxCoeff();
    r.pi0_min = pi0.segment(skip, len).minCoeff();
    r.pi0_max = pi0.segment(skip, len).maxCoeff();
    r.pi1_min = pi1.segment(skip, len).minCoeff();
    r.pi1_max = pi1.segment(skip, len).maxCoeff();
    if (skip > 0) {
        r.chi_min_boundary = std::min(bundle.chi.head(skip).minCoeff(),
                                      bundle.chi.tail(skip).minCoeff());
        r.chi_max_boundary = std::max(bundle.chi.head(skip).maxCoeff(),
                                      bundle.chi.tail(skip).maxCoeff());
    } else {
        r.chi_min_boundary = r.chi_min;
        r.chi_max_boundary = r.chi_max;
    }
    return r;
}

}  // namespace gflow
