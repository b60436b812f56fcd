#include "gflow/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "gflow/numeric.hpp"

namespace gflow {

double quantile(const GridDensity& rho, double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw InvalidArgument("quantile: s outside [0,1]");
    if (s == 0.0) return rho.origin();
    if (s == 1.0) return rho.origin() + rho.length();
    const auto& F = rho.cdf_edges();
    // First edge with F > s, minus one: cell k with F[k] <= s < F[k+1].
    const double* begin = F.data();
    const double* end = F.data() + F.size();
    int k = static_cast<int>(std::upper_bound(begin, end, s) - begin) - 1;
    k = std::min(k, rho.n_cells() - 1);
    if (F[k] == s && k > 0 && rho.value(k - 1) <= 0.0)
        throw UndefinedQuantile("quantile: s lies on an interior flat CDF segment");
    return rho.origin() + k * rho.dx() + (s - F[k]) / rho.value(k);
}

double w2_distance(const GridDensity& rho0, const GridDensity& rho1) {
    const int m = 4 * std::max(rho0.n_cells(), rho1.n_cells());
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        const double s = (i + 0.5) / m;
        const double d = quantile(rho0, s) - quantile(rho1, s);
        acc += d * d;
    }
    return std::sqrt(acc / m);
}

double TransportPotentials::interp_linear(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b,
                                          double x) {
    const double* begin = a.data();
    const double* end = a.data() + a.size();
    int k = static_cast<int>(std::upper_bound(begin, end, x) - begin) - 1;
    k = std::clamp(k, 0, static_cast<int>(a.size()) - 2);
    const double w = a[k + 1] - a[k];
    if (w <= 0.0) return b[k];
    const double t = std::clamp((x - a[k]) / w, 0.0, 1.0);
    return b[k] + t * (b[k + 1] - b[k]);
}

double TransportPotentials::antideriv_at(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b,
                                         const Eigen::ArrayXd& cumint, double x) {
    const double* begin = a.data();
    const double* end = a.data() + a.size();
    int k = static_cast<int>(std::upper_bound(begin, end, x) - begin) - 1;
    k = std::clamp(k, 0, static_cast<int>(a.size()) - 2);
    const double w = a[k + 1] - a[k];
    double bx = b[k];
    if (w > 0.0) bx += std::clamp((x - a[k]) / w, 0.0, 1.0) * (b[k + 1] - b[k]);
    return cumint[k] + 0.5 * (b[k] + bx) * (x - a[k]);
}

double TransportPotentials::phi_at(double x) const { return antideriv_at(xk_, yk_, phik_, x); }
double TransportPotentials::phi_star_at(double y) const {
    return antideriv_at(yk_, xk_, phisk_, y);
}
double TransportPotentials::map_at(double x) const { return interp_linear(xk_, yk_, x); }
double TransportPotentials::inverse_map_at(double y) const { return interp_linear(yk_, xk_, y); }

TransportPotentials potentials(const GridDensity& rho0, const GridDensity& rho1) {
    if ((rho0.values() <= 0.0).any() || (rho1.values() <= 0.0).any())
        throw InvalidArgument("potentials: densities must be strictly positive");

    // Shared s-knots: union of both CDF edge value sets.
    std::vector<double> s;
    s.reserve(rho0.n_cells() + rho1.n_cells() + 2);
    for (int i = 0; i <= rho0.n_cells(); ++i) s.push_back(rho0.cdf_edges()[i]);
    for (int i = 0; i <= rho1.n_cells(); ++i) s.push_back(rho1.cdf_edges()[i]);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());

    TransportPotentials pot;
    const int nk = static_cast<int>(s.size());
    pot.xk_.resize(nk);
    pot.yk_.resize(nk);
    for (int i = 0; i < nk; ++i) {
        pot.xk_[i] = quantile(rho0, s[i]);
        pot.yk_[i] = quantile(rho1, s[i]);
    }
    // Exact trapezoid antiderivatives of the piecewise-linear map and its
    // inverse; the pairing telescopes so that phi + phi* = x y on the graph.
    pot.phik_.resize(nk);
    pot.phisk_.resize(nk);
    pot.phik_[0] = 0.0;
    pot.phisk_[0] = pot.xk_[0] * pot.yk_[0];  // = x0*y0 - phi(x0)
    for (int i = 1; i < nk; ++i) {
        pot.phik_[i] = pot.phik_[i - 1] +
                       0.5 * (pot.yk_[i] + pot.yk_[i - 1]) * (pot.xk_[i] - pot.xk_[i - 1]);
        pot.phisk_[i] = pot.phisk_[i - 1] +
                        0.5 * (pot.xk_[i] + pot.xk_[i - 1]) * (pot.yk_[i] - pot.yk_[i - 1]);
    }

    pot.xs_ = rho0.midpoints();
    pot.ys_ = rho1.midpoints();
    pot.phi_.resize(rho0.n_cells());
    pot.map_.resize(rho0.n_cells());
    pot.phi_star_.resize(rho1.n_cells());
    for (int i = 0; i < rho0.n_cells(); ++i) {
        pot.phi_[i] = pot.phi_at(pot.xs_[i]);
        pot.map_[i] = pot.map_at(pot.xs_[i]);
    }
    for (int j = 0; j < rho1.n_cells(); ++j) pot.phi_star_[j] = pot.phi_star_at(pot.ys_[j]);
    return pot;
}

void TransportPotentials::write_csv(std::ostream& xs, std::ostream& ys,
                                    const std::vector<std::string>& comments) const {
    for (const auto& c : comments) xs << "# " << c << "\n";
    xs << "x,phi,map\n";
    for (int i = 0; i < xs_.size(); ++i)
        xs << format_g17(xs_[i]) << ',' << format_g17(phi_[i]) << ','
           << format_g17(map_[i]) << '\n';
    for (const auto& c : comments) ys << "# " << c << "\n";
    ys << "y,phi_star\n";
    for (int j = 0; j < ys_.size(); ++j)
        ys << format_g17(ys_[j]) << ',' << format_g17(phi_star_[j]) << '\n';
}

double coupling_cost(const PairDensity& q) {
    const int n = q.n_cells();
    const double dx = q.dx();
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const double yj = q.midpoint(j);
        for (int i = 0; i < n; ++i) {
            const double d = q.midpoint(i) - yj;
            acc += d * d * q.values()(i, j);
        }
    }
    return acc * dx * dx;
}

double duality_gap(const PairDensity& q, const TransportPotentials& pot) {
    const int n = q.n_cells();
    const double dx = q.dx();
    const Eigen::ArrayXd pi0 = q.grid().marginal0_values();
    const Eigen::ArrayXd pi1 = q.grid().marginal1_values();
    Eigen::ArrayXd x(n);
    for (int i = 0; i < n; ++i) x[i] = q.midpoint(i);
    const double lin = (pot.phi() * pi0).sum() * dx + (pot.phi_star() * pi1).sum() * dx;
    // cross term sum_ij x_i y_j q_ij dx^2
    const Eigen::VectorXd qy = q.values().matrix() * x.matrix();
    const double cross = (x.matrix().dot(qy)) * dx * dx;
    return 2.0 * (lin - cross);
}

}  // namespace gflow
