#include "gflow/heat.hpp"

#include <cmath>

#include "gflow/numeric.hpp"

namespace gflow {

KernelParams KernelParams::from_epsilon(double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("KernelParams: epsilon must be positive");
    return KernelParams(epsilon);
}

KernelParams KernelParams::from_time_step(double h) {
    if (!(h > 0.0)) throw InvalidArgument("KernelParams: h must be positive");
    return KernelParams(2.0 * std::sqrt(h));
}

double kernel_value(double x, double y, const KernelParams& p) {
    const double e = p.epsilon();
    const double d = (y - x) / e;
    return std::exp(-d * d) / (e * kSqrtPi);
}

EvolveResult evolve(const GridDensity& rho0, const KernelParams& p) {
    const int n = rho0.n_cells();
    const double dx = rho0.dx();
    const int pad = static_cast<int>(std::ceil(4.0 * p.epsilon() / dx));
    const int m = n + 2 * pad;
    const double origin = rho0.origin() - pad * dx;

    Eigen::MatrixXd kernel(m, n);
    for (int j = 0; j < n; ++j) {
        const double xj = rho0.midpoint(j);
        for (int i = 0; i < m; ++i)
            kernel(i, j) = kernel_value(xj, origin + (i + 0.5) * dx, p);
    }
    Eigen::ArrayXd out = (kernel * rho0.values().matrix()).array() * dx;
    const double mass = out.sum() * dx;
    out /= mass;

    const double escaped =
        (out.head(pad).sum() + out.tail(pad).sum()) * dx;
    return EvolveResult{GridDensity(m * dx, std::move(out), origin), escaped};
}

Eigen::ArrayXd restrict_values(const GridDensity& d, double a, double b) {
    const double ia = (a - d.origin()) / d.dx();
    const double ib = (b - d.origin()) / d.dx();
    const int ka = static_cast<int>(std::lround(ia));
    const int kb = static_cast<int>(std::lround(ib));
    if (std::abs(ia - ka) > 1e-9 || std::abs(ib - kb) > 1e-9)
        throw GridMismatch("restrict_values: window not cell-aligned");
    if (ka < 0 || kb > d.n_cells() || ka >= kb)
        throw InvalidArgument("restrict_values: window outside grid");
    return d.values().segment(ka, kb - ka);
}

PairGrid reference_coupling(const GridDensity& rho0, const KernelParams& p) {
    if (rho0.origin() != 0.0)
        throw InvalidArgument("reference_coupling: density must live on [0,L]");
    const int n = rho0.n_cells();
    Eigen::ArrayXXd q(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            q(i, j) = rho0.value(i) * kernel_value(rho0.midpoint(i), rho0.midpoint(j), p);
    return PairGrid(rho0.length(), std::move(q));
}

PairDensity reference_coupling_normalized(const GridDensity& rho0, const KernelParams& p) {
    return PairDensity::normalized(reference_coupling(rho0, p));
}

}  // namespace gflow
