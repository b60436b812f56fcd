#include "gflow/grid_measures.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "gflow/numeric.hpp"

namespace gflow {

namespace {

void check_values(const Eigen::ArrayXd& v, const char* what) {
    if (v.size() < 2) throw InvalidArgument(std::string(what) + ": need at least 2 cells");
    if (!v.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite value");
    if ((v < 0.0).any()) throw InvalidArgument(std::string(what) + ": negative value");
}

}  // namespace

GridDensity::GridDensity(double length, Eigen::ArrayXd values, double origin)
    : length_(length), origin_(origin), dx_(0.0), values_(std::move(values)) {
    if (!(length_ > 0.0)) throw InvalidArgument("GridDensity: length must be positive");
    check_values(values_, "GridDensity");
    dx_ = length_ / values_.size();
    const double mass = values_.sum() * dx_;
    if (std::abs(mass - 1.0) > 1e-12)
        throw InvalidArgument("GridDensity: mass " + format_double(mass) + " != 1 beyond 1e-12");
    cdf_.resize(values_.size() + 1);
    cdf_[0] = 0.0;
    for (int i = 0; i < values_.size(); ++i) cdf_[i + 1] = cdf_[i] + values_[i] * dx_;
    cdf_[values_.size()] = 1.0;
}

GridDensity GridDensity::normalized(double length, Eigen::ArrayXd values, double origin) {
    check_values(values, "GridDensity");
    const double dx = length / values.size();
    const double mass = values.sum() * dx;
    if (!(mass > 0.0)) throw InvalidArgument("GridDensity: zero mass");
    return GridDensity(length, values / mass, origin);
}

Eigen::ArrayXd GridDensity::midpoints() const {
    Eigen::ArrayXd x(values_.size());
    for (int i = 0; i < values_.size(); ++i) x[i] = midpoint(i);
    return x;
}

bool GridDensity::same_grid(const GridDensity& o) const {
    return length_ == o.length_ && origin_ == o.origin_ && values_.size() == o.values_.size();
}

PairGrid::PairGrid(double length, Eigen::ArrayXXd values)
    : length_(length), dx_(0.0), values_(std::move(values)) {
    if (!(length_ > 0.0)) throw InvalidArgument("PairGrid: length must be positive");
    if (values_.rows() != values_.cols() || values_.rows() < 2)
        throw InvalidArgument("PairGrid: values must be square, n >= 2");
    if (!values_.allFinite() || (values_ < 0.0).any())
        throw InvalidArgument("PairGrid: values must be finite and nonnegative");
    dx_ = length_ / values_.rows();
}

Eigen::ArrayXd PairGrid::marginal0_values() const {
    return values_.rowwise().sum() * dx_;
}

Eigen::ArrayXd PairGrid::marginal1_values() const {
    return values_.colwise().sum().transpose() * dx_;
}

PairDensity::PairDensity(double length, Eigen::ArrayXXd values)
    : PairDensity(PairGrid(length, std::move(values))) {}

PairDensity::PairDensity(PairGrid g) : grid_(std::move(g)) {
    const double mass = grid_.mass();
    if (std::abs(mass - 1.0) > 1e-10)
        throw InvalidArgument("PairDensity: mass " + format_double(mass) + " != 1 beyond 1e-10");
}

PairDensity PairDensity::normalized(PairGrid g) {
    const double mass = g.mass();
    if (!(mass > 0.0)) throw InvalidArgument("PairDensity: zero mass");
    return PairDensity(g.length(), g.values() / mass);
}

ADeltaSpec::ADeltaSpec(double delta_, double length_) : delta(delta_), length(length_) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("ADeltaSpec: delta outside (0,1)");
    if (!(length > 0.0)) throw InvalidArgument("ADeltaSpec: length must be positive");
}

double entropy(const GridDensity& rho) {
    return rho.values().unaryExpr(&xlogx).sum() * rho.dx();
}

double pair_entropy(const PairDensity& q) {
    return q.values().unaryExpr(&xlogx).sum() * q.dx() * q.dx();
}

static double relative_entropy_impl(const PairGrid& q, const PairGrid& p) {
    if (q.length() != p.length() || q.n_cells() != p.n_cells())
        throw GridMismatch("relative_entropy: grids differ");
    const auto& qv = q.values();
    const auto& pv = p.values();
    double s = 0.0;
    for (int j = 0; j < qv.cols(); ++j) {
        for (int i = 0; i < qv.rows(); ++i) {
            const double a = qv(i, j);
            if (a > 0.0) {
                const double b = pv(i, j);
                if (b <= 0.0) return std::numeric_limits<double>::infinity();
                s += a * (std::log(a) - std::log(b));
            }
        }
    }
    return s * q.dx() * q.dx();
}

double relative_entropy(const PairDensity& q, const PairDensity& p) {
    return relative_entropy_impl(q.grid(), p.grid());
}

double relative_entropy(const PairDensity& q, const PairGrid& p) {
    return relative_entropy_impl(q.grid(), p);
}

std::pair<GridDensity, GridDensity> marginals(const PairDensity& q) {
    return {GridDensity::normalized(q.length(), q.grid().marginal0_values()),
            GridDensity::normalized(q.length(), q.grid().marginal1_values())};
}

namespace {

// Piecewise-linear CDF evaluated anywhere on the line.
double cdf_at(const GridDensity& d, double x) {
    const double t = (x - d.origin()) / d.dx();
    if (t <= 0.0) return 0.0;
    const int n = d.n_cells();
    if (t >= n) return 1.0;
    const int k = std::min(static_cast<int>(t), n - 1);
    return d.cdf_edges()[k] + (t - k) * d.value(k) * d.dx();
}

bool levy_feasible(const GridDensity& f, const GridDensity& g, const Eigen::ArrayXd& pts, double h) {
    for (int i = 0; i < pts.size(); ++i) {
        const double gv = cdf_at(g, pts[i]);
        if (cdf_at(f, pts[i] - h) - h > gv + 1e-15) return false;
        if (gv > cdf_at(f, pts[i] + h) + h + 1e-15) return false;
    }
    return true;
}

}  // namespace

double levy_distance(const GridDensity& rho, const GridDensity& sigma) {
    if (rho.length() != sigma.length() || rho.origin() != sigma.origin())
        throw GridMismatch("levy_distance: intervals differ");
    // Check points: the union of both edge sets.
    Eigen::ArrayXd pts(rho.n_cells() + sigma.n_cells() + 2);
    int m = 0;
    for (int i = 0; i <= rho.n_cells(); ++i) pts[m++] = rho.origin() + i * rho.dx();
    for (int i = 0; i <= sigma.n_cells(); ++i) pts[m++] = sigma.origin() + i * sigma.dx();
    auto feasible = [&](double h) {
        return levy_feasible(rho, sigma, pts, h) && levy_feasible(sigma, rho, pts, h);
    };
    double lo = 0.0, hi = 1.0;  // h = 1 is always feasible since CDFs live in [0,1]
    if (feasible(0.0)) return 0.0;
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
}

bool in_a_delta(const GridDensity& rho, const ADeltaSpec& spec) {
    if (rho.length() != spec.length)
        throw GridMismatch("in_a_delta: density length differs from spec");
    return (rho.values() - 1.0 / spec.length).abs().maxCoeff() < spec.delta;
}

double l1_distance(const GridDensity& a, const GridDensity& b) {
    if (!a.same_grid(b)) throw GridMismatch("l1_distance: grids differ");
    return (a.values() - b.values()).abs().sum() * a.dx();
}

double mean(const GridDensity& rho) {
    return (rho.values() * rho.midpoints()).sum() * rho.dx();
}

double variance(const GridDensity& rho) {
    const double m = mean(rho);
    return ((rho.midpoints() - m).square() * rho.values()).sum() * rho.dx();
}

static void write_comments(std::ostream& os, const std::vector<std::string>& comments) {
    for (const auto& c : comments) os << "# " << c << "\n";
}

void write_csv(std::ostream& os, const GridDensity& rho, const std::vector<std::string>& comments) {
    write_comments(os, comments);
    os << "x,value\n";
    for (int i = 0; i < rho.n_cells(); ++i)
        os << format_g17(rho.midpoint(i)) << ',' << format_g17(rho.value(i)) << '\n';
}

void write_csv(std::ostream& os, const PairDensity& q, const std::vector<std::string>& comments) {
    write_comments(os, comments);
    os << "x,y,value\n";
    for (int i = 0; i < q.n_cells(); ++i)
        for (int j = 0; j < q.n_cells(); ++j)
            os << format_g17(q.midpoint(i)) << ',' << format_g17(q.midpoint(j)) << ','
               << format_g17(q.values()(i, j)) << '\n';
}

GridDensity read_density_csv(std::istream& is) {
    std::string line;
    std::vector<double> xs, vs;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("x,", 0) == 0) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw InvalidArgument("density CSV: malformed row");
        xs.push_back(std::stod(line.substr(0, comma)));
        vs.push_back(std::stod(line.substr(comma + 1)));
    }
    if (xs.size() < 2) throw InvalidArgument("density CSV: need at least 2 rows");
    const double dx = xs[1] - xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (std::abs(xs[i] - xs[i - 1] - dx) > 1e-9 * std::max(1.0, std::abs(dx)))
            throw InvalidArgument("density CSV: grid is not uniform");
    Eigen::ArrayXd v = Eigen::Map<Eigen::ArrayXd>(vs.data(), vs.size());
    const double origin = xs[0] - 0.5 * dx;
    return GridDensity::normalized(dx * static_cast<double>(xs.size()), v, origin);
}

}  // namespace gflow
