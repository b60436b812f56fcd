#include "gflow/particles.hpp"

#include <cmath>

#include "gflow/numeric.hpp"
#include "gflow/wasserstein.hpp"

namespace gflow {

ParticleEnsemble simulate(const GridDensity& rho0, int n, double h, std::uint64_t seed) {
    if (n < 1) throw InvalidArgument("simulate: need at least one particle");
    if (!(h > 0.0)) throw InvalidArgument("simulate: h must be positive");
    Eigen::ArrayXd x0(n), xh(n);
    const double amp = std::sqrt(2.0 * h);
    for (int i = 0; i < n; ++i) {
        SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(i));
        x0[i] = quantile(rho0, rng.next_open01());
        xh[i] = x0[i] + amp * rng.next_normal();
    }
    return ParticleEnsemble{std::move(x0), std::move(xh), seed, h};
}

namespace {

// Bin index in [0, n), or n for out-of-range; the right edge belongs to the
// last cell.
int bin_of(double x, const GridSpec1D& g) {
    const double t = (x - g.origin) / g.dx();
    if (t < 0.0 || t > g.n_cells) return g.n_cells;
    if (t == static_cast<double>(g.n_cells)) return g.n_cells - 1;
    return static_cast<int>(t);
}

}  // namespace

EmpiricalDensity empirical_density(const Eigen::ArrayXd& positions, const GridSpec1D& grid) {
    if (positions.size() == 0) throw InvalidArgument("empirical_density: empty positions");
    Eigen::ArrayXd counts = Eigen::ArrayXd::Zero(grid.n_cells);
    long overflow = 0;
    for (int i = 0; i < positions.size(); ++i) {
        const int b = bin_of(positions[i], grid);
        if (b == grid.n_cells)
            ++overflow;
        else
            counts[b] += 1.0;
    }
    const long total = positions.size();
    return EmpiricalDensity{grid, counts / (static_cast<double>(total) * grid.dx()), overflow,
                            total};
}

GridDensity EmpiricalDensity::as_density() const {
    return GridDensity::normalized(grid.length, values, grid.origin);
}

EmpiricalPair empirical_pair(const ParticleEnsemble& ens, const GridSpec1D& grid) {
    const int n = grid.n_cells;
    Eigen::ArrayXXd counts = Eigen::ArrayXXd::Zero(n + 1, n + 1);
    for (int i = 0; i < ens.n(); ++i)
        counts(bin_of(ens.x0[i], grid), bin_of(ens.xh[i], grid)) += 1.0;
    return EmpiricalPair{grid, std::move(counts), ens.n()};
}

EmpiricalDensity EmpiricalPair::first_marginal() const {
    const int n = grid.n_cells;
    const Eigen::ArrayXd row = counts.rowwise().sum();
    return EmpiricalDensity{grid, row.head(n) / (static_cast<double>(total) * grid.dx()),
                            static_cast<long>(row[n]), total};
}

EmpiricalDensity EmpiricalPair::second_marginal() const {
    const int n = grid.n_cells;
    const Eigen::ArrayXd col = counts.colwise().sum().transpose();
    return EmpiricalDensity{grid, col.head(n) / (static_cast<double>(total) * grid.dx()),
                            static_cast<long>(col[n]), total};
}

PairDensity EmpiricalPair::as_pair_density() const {
    const int n = grid.n_cells;
    return PairDensity::normalized(
        PairGrid(grid.length, counts.topLeftCorner(n, n)));
}

HydroReport hydrodynamic_check(const GridDensity& rho0, int n, double h, std::uint64_t seed,
                               const GridSpec1D& grid, double c1, double c2) {
    if (rho0.n_cells() % grid.n_cells != 0)
        throw GridMismatch("hydrodynamic_check: rho0 cells must be a multiple of the bins");
    if (rho0.origin() != grid.origin || rho0.length() != grid.length)
        throw GridMismatch("hydrodynamic_check: binning window must match the density support");

    const ParticleEnsemble ens = simulate(rho0, n, h, seed);
    const EmpiricalDensity emp = empirical_density(ens.xh, grid);

    const EvolveResult evo = evolve(rho0, KernelParams::from_time_step(h));
    Eigen::ArrayXd fine =
        restrict_values(evo.density, grid.origin, grid.origin + grid.length);
    const int ratio = rho0.n_cells() / grid.n_cells;
    Eigen::ArrayXd coarse(grid.n_cells);
    for (int k = 0; k < grid.n_cells; ++k) coarse[k] = fine.segment(k * ratio, ratio).mean();

    const double l1 = (emp.values - coarse).abs().sum() * grid.dx();
    const double bound = c1 / std::sqrt(n * grid.dx()) + c2 * grid.dx();
    return HydroReport{l1, bound, static_cast<double>(emp.overflow) / emp.total, l1 <= bound};
}

}  // namespace gflow
