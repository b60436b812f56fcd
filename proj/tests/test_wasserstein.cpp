#include <doctest.h>

#include <array>
#include <cmath>

#include "gflow/experiments.hpp"
#include "gflow/numeric.hpp"
#include "gflow/wasserstein.hpp"
#include "oracles.hpp"

using namespace gflow;

namespace {

GridDensity linear_density(int n) {
    Eigen::ArrayXd v(n);
    for (int i = 0; i < n; ++i) v[i] = 2.0 * (i + 0.5) / n;
    return GridDensity(1.0, v);
}

// Four equal-mass triangular bumps centered at the given cell indices.
GridDensity four_bumps(int n, const std::array<int, 4>& cells) {
    Eigen::ArrayXd v = Eigen::ArrayXd::Zero(n);
    const double profile[9] = {1, 2, 3, 4, 5, 4, 3, 2, 1};
    for (const int c : cells)
        for (int k = -4; k <= 4; ++k) v[c + k] += profile[k + 4] / 25.0 * 0.25 * n;
    return GridDensity(1.0, v);
}

}  // namespace

TEST_CASE("quantile: uniform line, endpoints, sqrt law") {
    const auto u = catalog_density("uniform", 128, 2.0, 0.0);
    CHECK(quantile(u, 0.25) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(quantile(u, 0.0) == 0.0);
    CHECK(quantile(u, 1.0) == 2.0);

    const auto lin = linear_density(4096);
    for (double s : {0.1, 0.3, 0.5, 0.77, 0.93})
        CHECK(std::abs(quantile(lin, s) - std::sqrt(s)) < 1e-6);

    double prev = -1.0;
    for (int i = 0; i <= 50; ++i) {
        const double q = quantile(lin, i / 50.0);
        CHECK(q >= prev);
        prev = q;
    }
}

TEST_CASE("quantile throws only on interior flat hits") {
    Eigen::ArrayXd v = Eigen::ArrayXd::Zero(8);
    v[1] = 4.0;
    v[6] = 4.0;  // two bumps, plateau between with F = 0.5
    const GridDensity rho(1.0, v);
    CHECK_NOTHROW(quantile(rho, 0.3));
    CHECK_NOTHROW(quantile(rho, 0.7));
    CHECK_THROWS_AS(quantile(rho, 0.5), UndefinedQuantile);
    CHECK_THROWS_AS(quantile(rho, 1.5), InvalidArgument);
}

TEST_CASE("w2: identity, translation, scaling, triangle inequality") {
    const auto rho = catalog_density("cosine", 512, 1.0, 0.2);
    CHECK(w2_distance(rho, rho) == doctest::Approx(0.0).epsilon(1e-14));

    // translated bump: shift by a whole number of cells
    const int n = 1024, shift = 150;
    Eigen::ArrayXd b0 = Eigen::ArrayXd::Zero(n);
    for (int k = 0; k < 9; ++k) b0[300 + k] = (k < 5 ? k + 1 : 9 - k);
    Eigen::ArrayXd b1 = Eigen::ArrayXd::Zero(n);
    for (int k = 0; k < 9; ++k) b1[300 + shift + k] = b0[300 + k];
    const auto d0 = GridDensity::normalized(1.0, b0);
    const auto d1 = GridDensity::normalized(1.0, b1);
    CHECK(w2_distance(d0, d1) ==
          doctest::Approx(static_cast<double>(shift) / n).epsilon(1e-6));

    SplitMix64 rng(5);
    for (int t = 0; t < 5; ++t) {
        const auto a = random_smooth_density(256, 1.0, 0.2, rng.next());
        const auto b = random_smooth_density(256, 1.0, 0.2, rng.next());
        const auto c = random_smooth_density(256, 1.0, 0.2, rng.next());
        CHECK(w2_distance(a, c) <= w2_distance(a, b) + w2_distance(b, c) + 1e-8);

        for (double scale : {0.5, 2.0}) {
            // rho(./c)/c on [0, c L]
            const GridDensity as(scale, a.values() / scale);
            const GridDensity bs(scale, b.values() / scale);
            CHECK(w2_distance(as, bs) ==
                  doctest::Approx(scale * w2_distance(a, b)).epsilon(1e-10));
        }
    }
}

TEST_CASE("w2 matches the 4-point LP after bump embedding") {
    SplitMix64 rng(17);
    const int n = 4096;
    for (int trial = 0; trial < 5; ++trial) {
        std::array<int, 4> cx, cy;
        for (int k = 0; k < 4; ++k) {
            cx[k] = 200 + 1000 * k + static_cast<int>(rng.next_open01() * 600);
            cy[k] = 200 + 1000 * k + static_cast<int>(rng.next_open01() * 600);
        }
        const auto mu = four_bumps(n, cx);
        const auto nu = four_bumps(n, cy);
        std::array<double, 4> xs, ys;
        for (int k = 0; k < 4; ++k) {
            xs[k] = (cx[k] + 0.5) / n;
            ys[k] = (cy[k] + 0.5) / n;
        }
        const double lp = oracles::lp4_cost_sq(xs, ys);
        const double w2 = w2_distance(mu, nu);
        CHECK(std::abs(w2 * w2 - lp) < 1e-9);
    }
}

TEST_CASE("potentials: identity, translation, Fenchel and Young") {
    const auto rho = catalog_density("cosine", 512, 1.0, 0.15);
    const auto pot_id = potentials(rho, rho);
    for (int i : {0, 128, 400, 511}) {
        const double x = rho.midpoint(i);
        CHECK(pot_id.map()[i] == doctest::Approx(x).epsilon(1e-12));
        CHECK(pot_id.phi()[i] == doctest::Approx(x * x / 2.0).epsilon(1e-12));
    }

    const auto u = catalog_density("uniform", 256, 1.0, 0.0);
    const auto tilt = catalog_density("tilt", 256, 1.0, 0.2);
    const auto pot = potentials(u, tilt);

    // Fenchel equality on the graph and Young's inequality on the product grid
    for (int i = 0; i < 256; ++i) {
        const double x = u.midpoint(i);
        const double tx = pot.map()[i];
        CHECK(std::abs(pot.phi()[i] + pot.phi_star_at(tx) - x * tx) < 1e-8);
    }
    for (int i = 0; i < 256; i += 17)
        for (int j = 0; j < 256; j += 13) {
            const double x = u.midpoint(i), y = tilt.midpoint(j);
            CHECK(pot.phi()[i] + pot.phi_star()[j] - x * y >= -1e-8);
        }

    // map is nondecreasing
    for (int i = 1; i < 256; ++i) CHECK(pot.map()[i] >= pot.map()[i - 1] - 1e-14);

    // pure translation: same values on a shifted grid gives T(x) = x + a
    const double a = 0.375;
    const auto rho_a = catalog_density("cosine", 256, 1.0, 0.15);
    const GridDensity rho_b(1.0, rho_a.values(), a);
    const auto pot_t = potentials(rho_a, rho_b);
    for (int i : {0, 64, 200, 255}) {
        const double x = rho_a.midpoint(i);
        CHECK(pot_t.map()[i] == doctest::Approx(x + a).epsilon(1e-12));
        CHECK(pot_t.phi()[i] == doctest::Approx(x * x / 2.0 + a * x).epsilon(1e-11));
    }

    CHECK_THROWS_AS(potentials(u, GridDensity(1.0, [] {
                        Eigen::ArrayXd v = Eigen::ArrayXd::Zero(8);
                        v[2] = 8.0;
                        return v;
                    }())),
                    InvalidArgument);
}

TEST_CASE("potentials serialize to the two-file CSV schema") {
    const auto r0 = catalog_density("uniform", 16, 1.0, 0.0);
    const auto r1 = catalog_density("cosine", 16, 1.0, 0.1);
    const auto pot = potentials(r0, r1);
    std::stringstream xs, ys;
    pot.write_csv(xs, ys, {"v test"});
    CHECK(xs.str().rfind("# v test\nx,phi,map\n", 0) == 0);
    CHECK(ys.str().find("y,phi_star\n") != std::string::npos);
    int rows = -1;  // minus the header
    for (char c : xs.str())
        if (c == '\n') ++rows;
    CHECK(rows == 16 + 1);  // comment line adds one
}

TEST_CASE("phi'' tracks rho0 / rho1(T) and the mirror identity") {
    SplitMix64 rng(23);
    const int n = 2048;
    for (int trial = 0; trial < 3; ++trial) {
        const auto r0 = random_smooth_density(n, 1.0, 0.2, rng.next());
        const auto r1 = random_smooth_density(n, 1.0, 0.2, rng.next());
        const auto pot = potentials(r0, r1);
        const double dx = r0.dx();
        double worst = 0.0, worst_mirror = 0.0;
        for (int i = 2; i < n - 2; ++i) {
            const double fd =
                (pot.phi()[i + 2] - 2.0 * pot.phi()[i] + pot.phi()[i - 2]) / (4.0 * dx * dx);
            const double tx = pot.map()[i];
            const int j = std::min(static_cast<int>(tx * n), n - 1);
            const double expected = r0.value(i) / r1.value(j);
            worst = std::max(worst, std::abs(fd - expected) / expected);

            const double fds = (pot.phi_star()[i + 2] - 2.0 * pot.phi_star()[i] +
                                pot.phi_star()[i - 2]) /
                               (4.0 * dx * dx);
            const double y = r1.midpoint(i);
            const double ti = pot.inverse_map_at(y);
            const int k = std::min(static_cast<int>(ti * n), n - 1);
            const double expected_s = r1.value(i) / r0.value(k);
            worst_mirror = std::max(worst_mirror, std::abs(fds - expected_s) / expected_s);
        }
        CHECK(worst < 1e-3);
        CHECK(worst_mirror < 1e-3);
    }
}

TEST_CASE("coupling cost: closed forms and the w2 lower bound") {
    // product of uniforms: int int (x-y)^2 = 1/6
    const int n = 512;
    const auto qu = PairDensity(1.0, Eigen::ArrayXXd::Constant(n, n, 1.0));
    CHECK(coupling_cost(qu) == doctest::Approx(1.0 / 6.0).epsilon(1e-6));
    // quadrature oracle for the same quantity
    const double oracle = oracles::integrate(
        [](double x) { return x * x - x + 1.0 / 3.0; }, 0.0, 1.0, 1e-12);
    CHECK(coupling_cost(qu) == doctest::Approx(oracle).epsilon(1e-6));

    // diagonal Gaussian ridge: cost ~ eps^2/2
    const double eps = 0.05;
    Eigen::ArrayXXd ridge(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double d = (i - j) / (eps * n);
            ridge(i, j) = std::exp(-d * d);
        }
    const auto qr = PairDensity::normalized(PairGrid(1.0, ridge));
    CHECK(std::abs(coupling_cost(qr) - eps * eps / 2.0) < 0.1 * eps * eps);

    const auto [m0, m1] = marginals(qr);
    const double w = w2_distance(m0, m1);
    CHECK(coupling_cost(qr) >= w * w - 1e-8);
}

TEST_CASE("duality gap: optimal coupling saturates, product coupling matches") {
    const int n = 1024;
    const auto r0 = catalog_density("cosine", n, 1.0, 0.15);
    const auto r1 = catalog_density("tilt", n, 1.0, 0.15);

    // product coupling
    Eigen::ArrayXXd prod(n, n);
    for (int j = 0; j < n; ++j) prod.col(j) = r0.values() * r1.value(j);
    const auto q = PairDensity(1.0, prod);
    const auto pot = potentials(r0, r1);
    const double gap = duality_gap(q, pot);
    const double w = w2_distance(r0, r1);
    CHECK(gap >= -1e-8);
    CHECK(std::abs(gap - (coupling_cost(q) - w * w)) < 1e-6);

    // monotone (diagonal band) coupling: gap near zero, cost near w2^2
    Eigen::ArrayXXd band = Eigen::ArrayXXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const double y = pot.map()[i];
        const double t = y * n - 0.5;
        const int j = std::max(0, std::min(n - 2, static_cast<int>(std::floor(t))));
        const double w1 = t - j;
        band(i, j) += r0.value(i) * (1.0 - w1) * n;
        band(i, j + 1) += r0.value(i) * w1 * n;
    }
    const auto qb = PairDensity::normalized(PairGrid(1.0, band));
    CHECK(duality_gap(qb, pot) < 5.0 / n);
    CHECK(std::abs(coupling_cost(qb) - w * w) < 5.0 / n);
}
