#pragma once

#include <cstdint>

#include "gflow/heat.hpp"

namespace gflow {

/// n independent Brownian particles observed at times 0 and h. Increments
/// have variance 2h (generator d^2/dx^2), matching the kernel exponent
/// (y-x)^2/(4h). Per-particle counter-based streams: the ensemble is a pure
/// function of (rho0, n, h, seed), independent of evaluation order.
struct ParticleEnsemble {
    Eigen::ArrayXd x0;
    Eigen::ArrayXd xh;
    std::uint64_t seed;
    double h;
    int n() const { return static_cast<int>(x0.size()); }
};

/// x0 ~ rho0 by inverse CDF, xh = x0 + sqrt(2h) * N(0,1), both by inverse
/// transform from a per-particle SplitMix64 stream.
ParticleEnsemble simulate(const GridDensity& rho0, int n, double h, std::uint64_t seed);

/// Binning grid for empirical measures.
struct GridSpec1D {
    double length;
    int n_cells;
    double origin = 0.0;
    double dx() const { return length / n_cells; }
};

/// Histogram density: values sum to (1 - overflow/total)/dx * dx, i.e. mass
/// equals the in-range fraction; out-of-range positions are counted, not
/// binned.
struct EmpiricalDensity {
    GridSpec1D grid;
    Eigen::ArrayXd values;
    long overflow;
    long total;
    double mass() const { return values.sum() * grid.dx(); }
    /// Renormalized probability view.
    GridDensity as_density() const;
};

EmpiricalDensity empirical_density(const Eigen::ArrayXd& positions, const GridSpec1D& grid);

/// 2D histogram of (x0_i, xh_i) with an overflow row/column, so that its
/// marginals reproduce the 1D histograms bit-exactly by construction.
struct EmpiricalPair {
    GridSpec1D grid;
    /// (n+1) x (n+1) counts; index n is the out-of-range slot.
    Eigen::ArrayXXd counts;
    long total;
    EmpiricalDensity first_marginal() const;
    EmpiricalDensity second_marginal() const;
    /// In-range block renormalized to a probability.
    PairDensity as_pair_density() const;
};

EmpiricalPair empirical_pair(const ParticleEnsemble& ens, const GridSpec1D& grid);

struct HydroReport {
    double l1_error;
    double bound;      // c1 / sqrt(n dx) + c2 dx
    double overflow_fraction;
    bool pass;
};

/// L1 distance between the terminal empirical density and the restriction of
/// evolve(rho0) to the binning window (rho0.n_cells() must be a multiple of
/// grid.n_cells()); passes when below the statistical + binning bound.
HydroReport hydrodynamic_check(const GridDensity& rho0, int n, double h, std::uint64_t seed,
                               const GridSpec1D& grid, double c1 = 1.2, double c2 = 2.0);

}  // namespace gflow
