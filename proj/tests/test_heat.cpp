#include <doctest.h>

#include <cmath>

#include "gflow/experiments.hpp"
#include "gflow/heat.hpp"
#include "gflow/numeric.hpp"
#include "oracles.hpp"

using namespace gflow;

namespace {

GridDensity gaussian_bump(int n, double L, double mean, double var) {
    Eigen::ArrayXd v(n);
    for (int i = 0; i < n; ++i) {
        const double x = (i + 0.5) * L / n;
        v[i] = std::exp(-(x - mean) * (x - mean) / (2.0 * var));
    }
    return GridDensity::normalized(L, v);
}

}  // namespace

TEST_CASE("kernel parametrizations are locked by eps^2 = 4h") {
    const auto p = KernelParams::from_epsilon(0.2);
    CHECK(p.h() == doctest::Approx(0.01).epsilon(1e-15));
    const auto q = KernelParams::from_time_step(0.01);
    CHECK(q.epsilon() == doctest::Approx(0.2).epsilon(1e-15));
    CHECK_THROWS_AS(KernelParams::from_epsilon(0.0), InvalidArgument);
}

TEST_CASE("kernel value: prefactor, symmetry, normalization") {
    const auto p = KernelParams::from_epsilon(1.0 / kSqrtPi);
    CHECK(kernel_value(0.3, 0.3, p) == doctest::Approx(1.0).epsilon(1e-14));

    const auto p2 = KernelParams::from_epsilon(0.37);
    SplitMix64 rng(11);
    for (int i = 0; i < 10; ++i) {
        const double x = rng.next_open01(), y = rng.next_open01();
        CHECK(kernel_value(x, y, p2) == doctest::Approx(kernel_value(y, x, p2)).epsilon(1e-15));
    }

    // midpoint sum over a wide grid
    const double eps = 0.1, dx = 0.01;
    double mass = 0.0;
    for (int i = -200; i < 200; ++i)
        mass += kernel_value(0.0, (i + 0.5) * dx, KernelParams::from_epsilon(eps)) * dx;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("evolve: small-eps identity, mass, variance growth") {
    // 1 - cos vanishes at both ends, so the zero extension stays Lipschitz.
    const int nc = 1024;
    Eigen::ArrayXd vals(nc);
    for (int i = 0; i < nc; ++i) vals[i] = 1.0 - std::cos(2.0 * kPi * (i + 0.5) / nc);
    const auto rho = GridDensity::normalized(1.0, vals);
    const double lip = 2.0 * kPi;

    const double eps = 0.01;
    const auto out = evolve(rho, KernelParams::from_epsilon(eps));
    CHECK(out.density.values().sum() * out.density.dx() == doctest::Approx(1.0).epsilon(1e-10));

    // L1 against the zero-extended input
    const auto& d = out.density;
    double l1 = 0.0;
    for (int i = 0; i < d.n_cells(); ++i) {
        const double x = d.midpoint(i);
        double ref = 0.0;
        if (x > 0.0 && x < 1.0) {
            const int k = std::min(static_cast<int>(x * rho.n_cells()), rho.n_cells() - 1);
            ref = rho.value(k);
        }
        l1 += std::abs(d.value(i) - ref) * d.dx();
    }
    CHECK(l1 <= lip * eps);

    const auto bump = gaussian_bump(2048, 1.0, 0.5, 0.01);
    const double v0 = variance(bump);
    const auto evolved = evolve(bump, KernelParams::from_epsilon(0.1));
    CHECK(variance(evolved.density) - v0 == doctest::Approx(0.1 * 0.1 / 2.0).epsilon(1e-4));
    CHECK(evolved.escaped_mass < 1e-4);
}

TEST_CASE("evolve semigroup and variance-growth invariants") {
    const auto rho = catalog_density("cosine", 1024, 1.0, 0.2);
    const double e1 = 0.1, e2 = 0.15;
    const auto once = evolve(rho, KernelParams::from_epsilon(e1));
    const auto twice = evolve(once.density, KernelParams::from_epsilon(e2));
    const auto direct = evolve(rho, KernelParams::from_epsilon(std::hypot(e1, e2)));

    // Align on the shared lattice (same dx, origins differ by whole cells).
    const auto& a = twice.density;
    const auto& b = direct.density;
    const double dx = a.dx();
    const int shift = static_cast<int>(std::lround((b.origin() - a.origin()) / dx));
    double l1 = 0.0;
    for (int i = 0; i < a.n_cells(); ++i) {
        const int j = i - shift;
        const double bv = (j >= 0 && j < b.n_cells()) ? b.value(j) : 0.0;
        l1 += std::abs(a.value(i) - bv) * dx;
    }
    CHECK(l1 < 1e-6);

    const auto bump = gaussian_bump(1024, 1.0, 0.5, 0.004);
    const auto ev = evolve(bump, KernelParams::from_epsilon(0.08));
    CHECK(std::abs(variance(ev.density) - variance(bump) - 0.08 * 0.08 / 2.0) < 1e-6);
}

TEST_CASE("reference coupling: marginals and cellwise definition") {
    const int n = 512;
    const auto rho = catalog_density("cosine", n, 1.0, 0.15);
    const auto p = KernelParams::from_epsilon(0.1);
    const auto q0 = reference_coupling(rho, p);

    // cellwise definition
    for (int i : {0, 100, 400}) {
        for (int j : {3, 250, 511}) {
            CHECK(q0.values()(i, j) ==
                  doctest::Approx(rho.value(i) * kernel_value(rho.midpoint(i), rho.midpoint(j), p))
                      .epsilon(1e-14));
        }
    }

    // mass deficit is the Gaussian leakage: bounded via the erfc tail oracle
    const double leak = 1.0 - q0.mass();
    const double leak_bound = oracles::integrate(
        [&](double x) {
            const double e = p.epsilon();
            return 0.5 * (std::erfc(x / e) + std::erfc((1.0 - x) / e)) * 1.2;
        },
        0.0, 1.0, 1e-10);
    CHECK(leak > 0.0);
    CHECK(leak < leak_bound);

    // first marginal of the renormalized coupling stays within the leakage of rho
    const auto qn = reference_coupling_normalized(rho, p);
    const auto [m0, m1] = marginals(qn);
    CHECK(l1_distance(m0, rho) < 2.0 * leak + 1e-10);

    // second marginal of the renormalized coupling tracks evolve (same quadrature)
    const auto ev = evolve(rho, p);
    const Eigen::ArrayXd window = restrict_values(ev.density, 0.0, 1.0);
    const Eigen::ArrayXd evo_renorm = window / (window.sum() * ev.density.dx());
    CHECK((m1.values() - evo_renorm).abs().sum() * m1.dx() < 1e-8);
}
