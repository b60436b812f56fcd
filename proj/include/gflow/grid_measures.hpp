#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gflow/errors.hpp"

namespace gflow {

/// A probability density on an interval [origin, origin + L], sampled as
/// piecewise-constant values on n uniform cells of width dx = L/n.
///
/// Invariants: n >= 2, all values >= 0, sum(values)*dx = 1 within 1e-12.
/// The origin is 0 unless the density lives on an enlarged grid (see
/// heat::evolve); all integrals are midpoint sums.
class GridDensity {
public:
    GridDensity(double length, Eigen::ArrayXd values, double origin = 0.0);

    /// Rescales `values` to unit mass, then constructs.
    static GridDensity normalized(double length, Eigen::ArrayXd values, double origin = 0.0);

    double length() const { return length_; }
    double origin() const { return origin_; }
    int n_cells() const { return static_cast<int>(values_.size()); }
    double dx() const { return dx_; }
    const Eigen::ArrayXd& values() const { return values_; }
    double value(int i) const { return values_[i]; }
    double midpoint(int i) const { return origin_ + (i + 0.5) * dx_; }
    Eigen::ArrayXd midpoints() const;

    /// CDF values at the n+1 cell edges (0 at the left edge, 1 at the right).
    const Eigen::ArrayXd& cdf_edges() const { return cdf_; }

    bool same_grid(const GridDensity& o) const;

private:
    double length_, origin_, dx_;
    Eigen::ArrayXd values_;
    Eigen::ArrayXd cdf_;
};

/// Nonnegative cell values on the product grid [0,L]^2; not necessarily a
/// probability (e.g. the reference coupling before renormalization).
class PairGrid {
public:
    PairGrid(double length, Eigen::ArrayXXd values);

    double length() const { return length_; }
    int n_cells() const { return static_cast<int>(values_.rows()); }
    double dx() const { return dx_; }
    const Eigen::ArrayXXd& values() const { return values_; }
    double midpoint(int i) const { return (i + 0.5) * dx_; }

    double mass() const { return values_.sum() * dx_ * dx_; }
    /// Raw first/second marginal value arrays (row/column sums times dx).
    Eigen::ArrayXd marginal0_values() const;
    Eigen::ArrayXd marginal1_values() const;

private:
    double length_, dx_;
    Eigen::ArrayXXd values_;
};

/// A probability density on [0,L]^2: a PairGrid with mass 1 within 1e-10.
class PairDensity {
public:
    PairDensity(double length, Eigen::ArrayXXd values);
    explicit PairDensity(PairGrid g);

    /// Rescales to unit mass, then constructs.
    static PairDensity normalized(PairGrid g);

    const PairGrid& grid() const { return grid_; }
    double length() const { return grid_.length(); }
    int n_cells() const { return grid_.n_cells(); }
    double dx() const { return grid_.dx(); }
    const Eigen::ArrayXXd& values() const { return grid_.values(); }
    double midpoint(int i) const { return grid_.midpoint(i); }

private:
    PairGrid grid_;
};

/// The uniform-density window: all cell values within delta of 1/L.
struct ADeltaSpec {
    double delta;
    double length;
    ADeltaSpec(double delta_, double length_);
};

/// sum v log v dx  (0 log 0 = 0).
double entropy(const GridDensity& rho);

/// sum v log v dx^2 over the product grid.
double pair_entropy(const PairDensity& q);

/// sum q log(q/p) dx^2 over cells with q > 0; +infinity when q > 0 meets p = 0.
/// Throws GridMismatch if the grids differ.
double relative_entropy(const PairDensity& q, const PairDensity& p);
double relative_entropy(const PairDensity& q, const PairGrid& p);

/// (first, second) marginals as validated densities. The tiny mass defect a
/// PairDensity is allowed to carry (1e-10) is rescaled away.
std::pair<GridDensity, GridDensity> marginals(const PairDensity& q);

/// Smallest h (bisection, tolerance 1e-6) with
/// F(x-h)-h <= G(x) <= F(x+h)+h at every cell edge of either grid.
double levy_distance(const GridDensity& rho, const GridDensity& sigma);

/// max_i |v_i - 1/L| < delta.
bool in_a_delta(const GridDensity& rho, const ADeltaSpec& spec);

/// L1 distance of two densities on the same grid.
double l1_distance(const GridDensity& a, const GridDensity& b);

double mean(const GridDensity& rho);
double variance(const GridDensity& rho);

/// CSV: header `x,value`, rows by increasing x, shortest round-trip decimals.
/// Any `comments` are emitted first as `# ...` lines.
void write_csv(std::ostream& os, const GridDensity& rho,
               const std::vector<std::string>& comments = {});
/// CSV: header `x,y,value`, rows by increasing x then y.
void write_csv(std::ostream& os, const PairDensity& q,
               const std::vector<std::string>& comments = {});

/// Reads a `x,value` CSV (as written above) back into a density.
GridDensity read_density_csv(std::istream& is);

}  // namespace gflow
