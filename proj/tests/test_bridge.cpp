#include <doctest.h>

#include <cmath>

#include "gflow/bridge.hpp"
#include "gflow/experiments.hpp"
#include "gflow/numeric.hpp"
#include "gflow/tildeq.hpp"
#include "oracles.hpp"

using namespace gflow;

TEST_CASE("solve_bridge refuses unresolvable kernels and bad inputs") {
    const auto u = catalog_density("uniform", 64, 1.0, 0.0);
    CHECK_THROWS_AS(solve_bridge(u, u, KernelParams::from_epsilon(0.01), 1e-8, 100),
                    InvalidArgument);  // eps < 4 dx
    CHECK_THROWS_AS(solve_bridge(u, catalog_density("uniform", 32, 1.0, 0.0),
                                 KernelParams::from_epsilon(0.5), 1e-8, 100),
                    GridMismatch);
    CHECK_THROWS_AS(solve_bridge(u, u, KernelParams::from_epsilon(0.5), 1e-8, 0),
                    Nonconvergence);

    BridgeOptions opt;
    opt.potential_bound = 1e-9;  // any real update trips the guard
    const auto rho1 = catalog_density("cosine", 64, 1.0, 0.2);
    CHECK_THROWS_AS(solve_bridge(u, rho1, KernelParams::from_epsilon(0.5), opt),
                    PotentialOverflow);
}

TEST_CASE("bridge to the evolved density has near-zero rate value") {
    const int n = 512;
    const auto rho0 = catalog_density("cosine", n, 1.0, 0.2);
    const double eps = 0.1;
    const auto p = KernelParams::from_epsilon(eps);

    const auto ev = evolve(rho0, p);
    const Eigen::ArrayXd window = restrict_values(ev.density, 0.0, 1.0);
    const auto rho1 = GridDensity::normalized(1.0, window);

    const auto sol = solve_bridge(rho0, rho1, p, 1e-9, 20000);
    const double leakage = ev.escaped_mass + (1.0 - reference_coupling(rho0, p).mass());
    CHECK(sol.j_value >= -1e-9);
    CHECK(sol.j_value <= 1e-9 + 2.0 * leakage);
    CHECK(sol.marginal_error <= 1e-9);
}

TEST_CASE("marginals of the solution match the inputs") {
    const int n = 256;
    const auto rho0 = random_smooth_density(n, 1.0, 0.2, 101);
    const auto rho1 = random_smooth_density(n, 1.0, 0.2, 102);
    const double tol = 1e-8;
    const auto sol = solve_bridge(rho0, rho1, KernelParams::from_epsilon(0.2), tol, 20000);

    const Eigen::ArrayXd pi0 = sol.q.grid().marginal0_values();
    const Eigen::ArrayXd pi1 = sol.q.grid().marginal1_values();
    CHECK((pi0 - rho0.values()).abs().sum() * rho0.dx() <= 1e-12);
    CHECK((pi1 - rho1.values()).abs().sum() * rho1.dx() <= tol);
    CHECK(sol.iterations > 0);
}

TEST_CASE("IPFP factorization invariant holds cellwise") {
    const int n = 128;
    const auto rho0 = random_smooth_density(n, 1.0, 0.2, 7);
    const auto rho1 = random_smooth_density(n, 1.0, 0.2, 8);
    const auto p = KernelParams::from_epsilon(0.25);
    const auto sol = solve_bridge(rho0, rho1, p, 1e-9, 20000);
    for (int i = 0; i < n; i += 13)
        for (int j = 0; j < n; j += 11) {
            const double q0 =
                rho0.value(i) * kernel_value(rho0.midpoint(i), rho0.midpoint(j), p);
            const double expected =
                q0 * std::exp(sol.log_scaling_x[i] + sol.log_scaling_y[j]);
            CHECK(sol.q.values()(i, j) == doctest::Approx(expected).epsilon(1e-8));
        }
}

TEST_CASE("3x3 toy bridge matches exhaustive minimization") {
    SplitMix64 rng(2024);
    const double L = 1.0;
    const int n = 3;
    const double dx = L / n;
    for (int trial = 0; trial < 4; ++trial) {
        Eigen::ArrayXd r0(3), r1(3);
        for (int i = 0; i < 3; ++i) {
            r0[i] = 0.2 + rng.next_open01();
            r1[i] = 0.2 + rng.next_open01();
        }
        const auto rho0 = GridDensity::normalized(L, r0);
        const auto rho1 = GridDensity::normalized(L, r1);
        const auto p = KernelParams::from_epsilon(1.5);
        const auto sol = solve_bridge(rho0, rho1, p, 1e-12, 50000);

        Eigen::Matrix3d ref;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                ref(i, j) = rho0.value(i) *
                            kernel_value(rho0.midpoint(i), rho0.midpoint(j), p) * dx * dx;
        Eigen::Vector3d rm, cm;
        for (int i = 0; i < 3; ++i) {
            rm[i] = rho0.value(i) * dx;
            cm[i] = rho1.value(i) * dx;
        }
        const double brute = oracles::bridge3x3_min(ref, rm, cm);
        CHECK(std::abs(sol.j_value - brute) < 1e-5);

        const auto rate = rate_functional(sol, rho0, p);
        CHECK(std::abs(rate - brute) < 1e-5);
    }
}

TEST_CASE("the two rate formulas agree to 1e-8") {
    const int n = 256;
    SplitMix64 rng(5150);
    for (int trial = 0; trial < 3; ++trial) {
        const auto rho0 = random_smooth_density(n, 1.0, 0.2, rng.next());
        const auto rho1 = random_smooth_density(n, 1.0, 0.2, rng.next());
        const auto p = KernelParams::from_epsilon(0.15);
        const auto sol = solve_bridge(rho0, rho1, p, 1e-10, 20000);
        CHECK(std::abs(rate_functional(sol, rho0, p) - sol.j_value) < 1e-8);
        CHECK(std::abs(relative_entropy(sol.q, reference_coupling(rho0, p)) - sol.j_value) <
              1e-8);
        // the literal Gibbs bound applies to the renormalized reference only
        CHECK(relative_entropy(sol.q, reference_coupling_normalized(rho0, p)) >= -1e-12);
    }
}

TEST_CASE("J is asymmetric while w2 is symmetric") {
    const int n = 512;
    const auto rho0 = catalog_density("uniform", n, 1.0, 0.0);
    const auto rho1 = catalog_density("cosine", n, 1.0, 0.2);
    const auto p = KernelParams::from_epsilon(0.2);
    const auto fwd = solve_bridge(rho0, rho1, p, 1e-9, 20000);
    const auto rev = solve_bridge(rho1, rho0, p, 1e-9, 20000);
    CHECK(std::abs(fwd.j_value - rev.j_value) > 1e-4);
    CHECK(std::abs(w2_distance(rho0, rho1) - w2_distance(rho1, rho0)) < 1e-13);
}

TEST_CASE("gamma functional: guards and grid convergence") {
    const auto rho0 = catalog_density("uniform", 256, 1.0, 0.0);
    const auto rho1 = catalog_density("cosine", 256, 1.0, 0.2);
    CHECK_THROWS_AS(
        gamma_functional(rho0, rho1, KernelParams::from_epsilon(0.2), 1e-8, 0.5),
        InvalidArgument);  // delta above 1/3
    CHECK_THROWS_AS(
        gamma_functional(rho0, rho1, KernelParams::from_epsilon(0.2), 1e-8, 0.1),
        InvalidArgument);  // outside the window

    // |F(n) - F(2n)| shrinks as the grid refines
    const double eps = 0.2;
    double F[3];
    int idx = 0;
    for (int n : {128, 256, 512}) {
        const auto a = catalog_density("uniform", n, 1.0, 0.0);
        const auto b = catalog_density("cosine", n, 1.0, 0.2);
        F[idx++] = gamma_functional(a, b, KernelParams::from_epsilon(eps), 1e-9, 0.25);
    }
    CHECK(std::abs(F[1] - F[0]) > std::abs(F[2] - F[1]));
}

TEST_CASE("lower-bound chain holds with all terms from their own modules") {
    const int n = 512;
    SplitMix64 rng(99);
    const auto p = KernelParams::from_epsilon(0.1);
    for (int trial = 0; trial < 2; ++trial) {
        const auto rho0 = random_smooth_density(n, 1.0, 0.2, rng.next());
        const auto rho1 = random_smooth_density(n, 1.0, 0.2, rng.next());
        const auto report = lower_bound_check(rho0, rho1, p, 1e-9);
        CHECK(report.h_direct >= 0.0);
        CHECK(std::abs(report.gap) < 1e-4);
        CHECK(report.chain_value >= -1e-4);
        CHECK(report.pass);
    }
    // rho1 = rho0: both sides small and equal
    const auto u = catalog_density("cosine", n, 1.0, 0.1);
    const auto rep = lower_bound_check(u, u, p, 1e-9);
    CHECK(std::abs(rep.gap) < 1e-4);
    CHECK(rep.h_direct < 0.05);
}
