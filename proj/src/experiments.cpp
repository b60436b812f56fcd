#include "gflow/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gflow/bridge.hpp"
#include "gflow/jko.hpp"
#include "gflow/numeric.hpp"
#include "gflow/particles.hpp"
#include "gflow/seminorm.hpp"
#include "gflow/tildeq.hpp"

namespace gflow {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (key.empty()) throw ConfigError("empty config key");
    kv_[key] = value;
}

bool ExperimentConfig::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string ExperimentConfig::get_string(const std::string& key, const std::string& def) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? def : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double def) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: " + it->second);
    }
}

int ExperimentConfig::get_int(const std::string& key, int def) const {
    const double v = get_double(key, def);
    const int i = static_cast<int>(std::llround(v));
    if (v != i) throw ConfigError("config key '" + key + "': not an integer");
    return i;
}

std::uint64_t ExperimentConfig::get_uint(const std::string& key, std::uint64_t def) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not an unsigned integer");
    }
}

std::vector<double> ExperimentConfig::get_list(const std::string& key,
                                               const std::string& def) const {
    const std::string raw = get_string(key, def);
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': bad list entry: " + item);
        }
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

ExperimentConfig ExperimentConfig::resolved(
    const std::vector<std::pair<std::string, std::string>>& defaults) const {
    ExperimentConfig out = *this;
    for (const auto& [k, v] : defaults)
        if (!out.has(k)) out.set(k, v);
    return out;
}

std::string ExperimentConfig::canonical() const {
    std::string out;
    for (const auto& [k, v] : kv_) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

std::string ExperimentConfig::hash() const { return hex64(fnv1a64(canonical())); }

GridDensity catalog_density(const std::string& name, int n_cells, double L, double amp) {
    Eigen::ArrayXd v(n_cells);
    const double dx = L / n_cells;
    if (name == "uniform") {
        v.setConstant(1.0 / L);
    } else if (name == "cosine") {
        for (int i = 0; i < n_cells; ++i)
            v[i] = (1.0 + amp * std::cos(2.0 * kPi * (i + 0.5) * dx / L)) / L;
    } else if (name == "tilt") {
        for (int i = 0; i < n_cells; ++i)
            v[i] = (1.0 + amp * (2.0 * (i + 0.5) * dx / L - 1.0)) / L;
    } else {
        throw ConfigError("unknown catalog density: " + name);
    }
    return GridDensity::normalized(L, std::move(v));
}

GridDensity random_smooth_density(int n_cells, double L, double delta, std::uint64_t seed) {
    SplitMix64 rng = SplitMix64::stream(seed, 0x5EEDD35171ull);
    Eigen::ArrayXd bump = Eigen::ArrayXd::Zero(n_cells);
    const double dx = L / n_cells;
    for (int k = 1; k <= 4; ++k) {
        const double a = rng.next_normal() / k;
        const double b = rng.next_normal() / k;
        for (int i = 0; i < n_cells; ++i) {
            const double ang = 2.0 * kPi * k * (i + 0.5) * dx / L;
            bump[i] += a * std::cos(ang) + b * std::sin(ang);
        }
    }
    const double sup = bump.abs().maxCoeff();
    Eigen::ArrayXd v = (1.0 + bump * (0.85 * delta / std::max(sup, 1e-12))) / L;
    return GridDensity::normalized(L, std::move(v));
}

namespace {

struct PairSpec {
    GridDensity rho0;
    GridDensity rho1;
};

PairSpec resolve_pair(const ExperimentConfig& cfg) {
    const int n = cfg.get_int("n_cells", 1024);
    const double L = cfg.get_double("L", 1.0);
    const std::string pair = cfg.get_string("pair", "cosine");
    if (pair == "csv") {
        std::ifstream f0(cfg.get_string("rho0_csv", ""));
        std::ifstream f1(cfg.get_string("rho1_csv", ""));
        if (!f0 || !f1) throw ConfigError("pair=csv requires readable rho0_csv and rho1_csv");
        return {read_density_csv(f0), read_density_csv(f1)};
    }
    GridDensity rho0 = catalog_density("uniform", n, L, 0.0);
    if (pair == "uniform") return {rho0, catalog_density("uniform", n, L, 0.0)};
    if (pair == "cosine")
        return {std::move(rho0),
                catalog_density("cosine", n, L, cfg.get_double("cosine_amp", 0.2))};
    if (pair == "tilt")
        return {std::move(rho0), catalog_density("tilt", n, L, cfg.get_double("tilt_slope", 0.15))};
    throw ConfigError("unknown pair: " + pair);
}

std::vector<double> resolve_ladder(const ExperimentConfig& cfg, double dx,
                                   const char* def = "0.4,0.2,0.1,0.05") {
    const std::vector<double> ladder = cfg.get_list("eps_ladder", def);
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!(ladder[i] > 0.0)) throw ConfigError("eps_ladder: entries must be positive");
        if (i > 0 && !(ladder[i] < ladder[i - 1]))
            throw ConfigError("eps_ladder: must be strictly decreasing");
        if (ladder[i] < 4.0 * dx)
            throw ConfigError("eps_ladder: eps = " + format_double(ladder[i]) +
                              " below 4 dx = " + format_double(4.0 * dx));
    }
    return ladder;
}

std::ofstream open_csv(const std::string& out_dir, const std::string& name,
                       const ExperimentConfig& resolved) {
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << "# " << kToolName << ' ' << kToolVersion << " config=" << resolved.hash() << '\n';
    return os;
}

const std::vector<std::pair<std::string, std::string>> kGammaDefaults = {
    {"L", "1"},          {"n_cells", "1024"},          {"pair", "cosine"},
    {"cosine_amp", "0.2"}, {"delta", "0.25"},          {"eps_ladder", "0.4,0.2,0.1,0.05"},
    {"tol", "1e-8"},     {"max_iter", "20000"},        {"gap_threshold", "0.02"},
    {"seed", "0"},
};

const std::vector<std::pair<std::string, std::string>> kJkoDefaults = {
    {"jko_mean", "2"},      {"jko_sigma2", "0.04"}, {"jko_h", "0.001"},
    {"jko_steps", "50"},    {"jko_m", "2048"},      {"newton_tol", "1e-9"},
    {"max_newton", "60"},   {"variance_tol", "0.001"}, {"seed", "0"},
};

const std::vector<std::pair<std::string, std::string>> kParticlesDefaults = {
    {"L", "1"},        {"n_cells", "1024"},      {"bins", "256"},
    {"n_particles", "100000"}, {"particle_h", "0.01"}, {"seeds", "5"},
    {"seed", "1"},     {"c1", "1.2"},            {"c2", "2.0"},
    {"min_n", "1000"}, {"density", "uniform"},   {"density_amp", "0.2"},
    {"write_ensemble", "0"},
};

const std::vector<std::pair<std::string, std::string>> kSeminormDefaults = {
    {"seed", "0"}, {"n_modes", "64"}, {"kmax", "16"}, {"draws", "5"}, {"eps", "0.3"},
};

const std::vector<std::pair<std::string, std::string>> kTildeqDefaults = {
    {"L", "1"},           {"n_cells", "1024"}, {"pair", "cosine"},
    {"cosine_amp", "0.15"}, {"delta", "0.2"},  {"eps_ladder", "0.4,0.2,0.1"},
    {"chi_bound", "3"},   {"seed", "0"},
};

}  // namespace

int cmd_gamma_sweep(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
    const ExperimentConfig rc = cfg.resolved(kGammaDefaults);
    const auto pair = resolve_pair(rc);
    const double delta = rc.get_double("delta", 0.25);
    if (!(delta > 0.0 && delta <= 1.0 / 3.0))
        throw ConfigError("delta must lie in (0, 1/3]");
    const ADeltaSpec window(delta, pair.rho0.length());
    if (!in_a_delta(pair.rho0, window) || !in_a_delta(pair.rho1, window))
        throw ConfigError("densities are outside A_delta for delta = " + format_double(delta));
    const auto ladder = resolve_ladder(rc, pair.rho0.dx());
    const double tol = rc.get_double("tol", 1e-8);
    const int max_iter = rc.get_int("max_iter", 20000);
    const double threshold = rc.get_double("gap_threshold", 0.02);

    const double target = 0.5 * entropy(pair.rho1) - 0.5 * entropy(pair.rho0);
    const double w2 = w2_distance(pair.rho0, pair.rho1);

    auto os = open_csv(out_dir, "gamma_sweep.csv", rc);
    os << "epsilon,F_eps,target,abs_gap\n";
    std::vector<double> gaps;
    for (const double eps : ladder) {
        const auto p = KernelParams::from_epsilon(eps);
        const BridgeSolution sol = solve_bridge(pair.rho0, pair.rho1, p, tol, max_iter);
        const double F = sol.j_value - w2 * w2 / (eps * eps);
        const double gap = std::abs(F - target);
        gaps.push_back(gap);
        os << format_double(eps) << ',' << format_double(F) << ',' << format_double(target)
           << ',' << format_double(gap) << '\n';
        log << "gamma-sweep eps=" << format_double(eps) << " F=" << format_double(F)
            << " gap=" << format_double(gap) << " iters=" << sol.iterations << '\n';
    }
    bool ok = gaps.back() <= threshold;
    if (!ok)
        log << "gamma-sweep: gap " << format_double(gaps.back()) << " at smallest eps above threshold "
            << format_double(threshold) << '\n';
    const std::size_t k = gaps.size();
    if (k >= 3) {
        const bool mono = gaps[k - 3] >= gaps[k - 2] - 1e-12 && gaps[k - 2] >= gaps[k - 1] - 1e-12;
        if (!mono) log << "gamma-sweep: gap sequence not nonincreasing on its last three entries\n";
        ok = ok && mono;
    }
    return ok ? kExitPass : kExitCheckFailure;
}

int cmd_bridge_solve(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
    const ExperimentConfig rc = cfg.resolved(kGammaDefaults);
    const auto pair = resolve_pair(rc);
    const auto ladder = resolve_ladder(rc, pair.rho0.dx());
    const double tol = rc.get_double("tol", 1e-8);
    const int max_iter = rc.get_int("max_iter", 20000);
    const double w2 = w2_distance(pair.rho0, pair.rho1);

    auto os = open_csv(out_dir, "bridge_solve.csv", rc);
    os << "epsilon,j_value,w2_sq,F_eps,marginal_error,iterations\n";
    bool ok = true;
    for (const double eps : ladder) {
        const BridgeSolution sol =
            solve_bridge(pair.rho0, pair.rho1, KernelParams::from_epsilon(eps), tol, max_iter);
        const double F = sol.j_value - w2 * w2 / (eps * eps);
        os << format_double(eps) << ',' << format_double(sol.j_value) << ','
           << format_double(w2 * w2) << ',' << format_double(F) << ','
           << format_double(sol.marginal_error) << ',' << sol.iterations << '\n';
        if (sol.marginal_error > tol) {
            ok = false;
            log << "bridge-solve: marginal defect above tol at eps=" << format_double(eps) << '\n';
        }
    }
    return ok ? kExitPass : kExitCheckFailure;
}

int cmd_jko_run(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
    const ExperimentConfig rc = cfg.resolved(kJkoDefaults);
    JkoConfig jc(rc.get_double("jko_h", 1e-3), rc.get_int("jko_m", 2048));
    jc.newton_tol = rc.get_double("newton_tol", 1e-9);
    jc.max_newton = rc.get_int("max_newton", 60);
    const int steps = rc.get_int("jko_steps", 50);
    if (steps < 1) throw ConfigError("jko_steps must be >= 1");
    const double sigma2 = rc.get_double("jko_sigma2", 0.04);
    const double mean = rc.get_double("jko_mean", 2.0);

    const QuantileProfile start = QuantileProfile::gaussian(mean, sigma2, jc.m);
    const auto profiles = jko_flow_profiles(start, jc, steps);

    auto os = open_csv(out_dir, "jko_run.csv", rc);
    os << "step,t,variance,entropy,w2_step\n";
    bool dissipates = true;
    for (std::size_t k = 0; k < profiles.size(); ++k) {
        double w2_step = 0.0;
        if (k > 0) {
            w2_step = std::sqrt(
                (profiles[k].values() - profiles[k - 1].values()).square().mean());
            if (jko_objective(profiles[k], profiles[k - 1], jc) > 1e-12) dissipates = false;
        }
        os << k << ',' << format_double(k * jc.h) << ','
           << format_double(profiles[k].variance()) << ','
           << format_double(profiles[k].entropy()) << ',' << format_double(w2_step) << '\n';
    }
    const double var_target = sigma2 + 2.0 * steps * jc.h;
    const double var_err = std::abs(profiles.back().variance() - var_target);
    const bool var_ok = var_err <= rc.get_double("variance_tol", 1e-3);
    if (!var_ok)
        log << "jko-run: terminal variance off by " << format_double(var_err) << '\n';
    if (!dissipates) log << "jko-run: energy-dissipation inequality violated\n";
    return (var_ok && dissipates) ? kExitPass : kExitCheckFailure;
}

int cmd_particles_run(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
    const ExperimentConfig rc = cfg.resolved(kParticlesDefaults);
    const int n = rc.get_int("n_particles", 100000);
    const double h = rc.get_double("particle_h", 0.01);
    const int bins = rc.get_int("bins", 256);
    const int n_cells = rc.get_int("n_cells", 1024);
    const double L = rc.get_double("L", 1.0);
    if (n_cells % bins != 0) throw ConfigError("n_cells must be a multiple of bins");
    const GridDensity rho0 = catalog_density(rc.get_string("density", "uniform"), n_cells, L,
                                             rc.get_double("density_amp", 0.2));
    const GridSpec1D grid{L, bins, 0.0};
    const int n_seeds = rc.get_int("seeds", 5);
    const std::uint64_t seed0 = rc.get_uint("seed", 1);
    const double c1 = rc.get_double("c1", 1.2), c2 = rc.get_double("c2", 2.0);

    auto os = open_csv(out_dir, "particles_run.csv", rc);
    os << "n,h,l1_error,overflow\n";
    double l1_sum = 0.0, bound = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
        const auto report = hydrodynamic_check(rho0, n, h, seed0 + s, grid, c1, c2);
        l1_sum += report.l1_error;
        bound = report.bound;
        os << n << ',' << format_double(h) << ',' << format_double(report.l1_error) << ','
           << format_double(report.overflow_fraction) << '\n';
        if (rc.get_int("write_ensemble", 0) != 0) {
            auto es = open_csv(out_dir, "ensemble_" + std::to_string(seed0 + s) + ".csv", rc);
            es << "i,x0,xh\n";
            const auto ens = simulate(rho0, n, h, seed0 + s);
            for (int i = 0; i < ens.n(); ++i)
                es << i << ',' << format_double(ens.x0[i]) << ',' << format_double(ens.xh[i])
                   << '\n';
        }
    }
    if (n < rc.get_int("min_n", 1000)) {
        log << "particles-run: n = " << n
            << " below the statistical minimum; check skipped (warning)\n";
        return kExitPass;
    }
    const double l1_mean = l1_sum / n_seeds;
    if (l1_mean > bound) {
        log << "particles-run: mean L1 " << format_double(l1_mean) << " above bound "
            << format_double(bound) << '\n';
        return kExitCheckFailure;
    }
    return kExitPass;
}

int cmd_seminorm_check(const ExperimentConfig& cfg, const std::string& out_dir,
                       std::ostream& log) {
    const ExperimentConfig rc = cfg.resolved(kSeminormDefaults);
    const std::uint64_t seed = rc.get_uint("seed", 0);
    const int n_modes = rc.get_int("n_modes", 64);
    const int kmax = std::min(rc.get_int("kmax", 16), n_modes / 4);
    const int draws = rc.get_int("draws", 5);
    const double eps = rc.get_double("eps", 0.3);

    auto os = open_csv(out_dir, "seminorm_check.csv", rc);
    os << "case,lhs,rhs,pass\n";
    bool all_ok = true;
    auto emit = [&](const std::string& name, double lhs, double rhs, bool ok) {
        os << name << ',' << format_double(lhs) << ',' << format_double(rhs) << ','
           << (ok ? 1 : 0) << '\n';
        if (!ok) {
            all_ok = false;
            log << "seminorm-check: " << name << " failed (lhs=" << format_double(lhs)
                << " rhs=" << format_double(rhs) << ")\n";
        }
    };

    const auto& rule = gauss_weight_rule();
    auto zmoment = [&](auto f) {
        double acc = 0.0;
        for (int i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(rule.nodes[i]);
        return acc;
    };
    const double om = 3.0;
    const double e4 = std::exp(-om * om / 4.0);
    emit("moment_1", zmoment([](double) { return 1.0; }), kSqrtPi,
         std::abs(zmoment([](double) { return 1.0; }) - kSqrtPi) <= 1e-12);
    emit("moment_z4", zmoment([](double z) { return z * z * z * z; }), 0.75 * kSqrtPi,
         std::abs(zmoment([](double z) { return z * z * z * z; }) - 0.75 * kSqrtPi) <= 1e-12);
    {
        const double lhs = zmoment([&](double z) { return std::cos(om * z); });
        emit("moment_cos", lhs, kSqrtPi * e4, std::abs(lhs - kSqrtPi * e4) <= 1e-12);
    }
    {
        const double lhs = zmoment([&](double z) { return z * std::sin(om * z); });
        const double rhs = 0.5 * om * kSqrtPi * e4;
        emit("moment_zsin", lhs, rhs, std::abs(lhs - rhs) <= 1e-12);
    }
    {
        const double lhs = zmoment([&](double z) { return z * z * std::cos(om * z); });
        const double rhs = kSqrtPi * e4 * (0.5 - om * om / 4.0);
        emit("moment_z2cos", lhs, rhs, std::abs(lhs - rhs) <= 1e-12);
    }

    auto random_torus = [&](std::uint64_t idx) {
        SplitMix64 rng = SplitMix64::stream(seed, idx);
        std::vector<std::pair<int, std::complex<double>>> modes;
        for (int k = 1; k <= kmax; ++k)
            modes.emplace_back(
                k, std::complex<double>(rng.next_normal(), rng.next_normal()) / double(k));
        return TorusFunction::from_positive_modes(n_modes, modes);
    };

    {
        const auto u = TorusFunction::from_positive_modes(n_modes, {{1, {0.5, 0.0}}});
        const auto sides = fd_identity_check(u, 0.5);
        emit("fd_mode_k1", sides.lhs, sides.rhs, std::abs(sides.lhs - sides.rhs) <= 1e-8);
    }
    for (int d = 0; d < draws; ++d) {
        const auto sides = fd_identity_check(random_torus(100 + d), eps);
        emit("fd_random_" + std::to_string(d), sides.lhs, sides.rhs,
             std::abs(sides.lhs - sides.rhs) <= 1e-8);
    }
    {
        const double omega = 2.0 * kPi;
        double quad = 0.0;
        for (int i = 0; i < rule.nodes.size(); ++i) {
            const double z = rule.nodes[i];
            quad += rule.weights[i] * z * z * z * z *
                    std::norm(one_minus_kappa_multiplier(omega, z));
        }
        const double closed = uksq_mode_integral(omega);
        emit("uksq_mode_closed", quad, closed, std::abs(quad - closed) <= 1e-8);
    }
    {
        double worst_ratio = 0.0;
        for (int i = 0; i <= 30; ++i) {
            const double omega = 0.1 + i * (20.0 - 0.1) / 30.0;
            const double lhs = uksq_mode_integral(omega);
            const double rhs = (5.0 / 6.0) * kSqrtPi * (1.0 - std::exp(-omega * omega / 4.0));
            worst_ratio = std::max(worst_ratio, lhs / rhs);
        }
        emit("uksq_omega_sweep", worst_ratio, 1.0, worst_ratio <= 1.0 + 1e-12);
    }
    for (int d = 0; d < draws; ++d) {
        const auto sides = uksq_bound_check(random_torus(200 + d), eps);
        emit("uksq_random_" + std::to_string(d), sides.lhs, sides.rhs,
             sides.lhs <= sides.rhs + 1e-8);
    }
    for (int d = 0; d < draws; ++d) {
        SplitMix64 rng = SplitMix64::stream(seed, 300 + d);
        const double alpha = std::exp(rng.next_normal());
        const auto u = random_torus(400 + d);
        const bool ok = xee_scaling_check(u, eps, alpha);
        emit("xee_alpha_" + std::to_string(d), std::sqrt(seminorm_sq(u, eps / alpha)),
             (alpha >= 1.0 ? 1.0 : 1.0 / alpha) * std::sqrt(seminorm_sq(u, eps)), ok);
    }
    {
        double worst = -1e300;
        for (const double s : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0})
            worst = std::max(worst, h_function(s) - std::exp(-s) / (2.0 * std::sqrt(s)));
        emit("h_upper_bound", worst, 0.0, worst <= 1e-14);
    }
    {
        const int n = 2048;
        const GridDensity rho0 = catalog_density("uniform", n, 1.0, 0.0);
        const GridDensity rho1 = catalog_density("cosine", n, 1.0, 0.15);
        const auto pot = potentials(rho0, rho1);
        SplitMix64 rng = SplitMix64::stream(seed, 999);
        std::vector<std::pair<double, double>> samples;
        for (int i = 0; i < 100; ++i) {
            const double xi = 0.25 + 0.5 * rng.next_open01();
            const double z = 2.0 * rng.next_open01() - 1.0;
            samples.emplace_back(xi, z);
        }
        const auto report = exponent_identity_check(pot, rho0, 0.1, samples);
        emit("exponent_identity", report.max_rel_error, 1e-4, report.max_rel_error <= 1e-4);
    }
    return all_ok ? kExitPass : kExitCheckFailure;
}

int cmd_tildeq_report(const ExperimentConfig& cfg, const std::string& out_dir,
                      std::ostream& log) {
    const ExperimentConfig rc = cfg.resolved(kTildeqDefaults);
    const auto pair = resolve_pair(rc);
    const double delta = rc.get_double("delta", 0.2);
    if (!(delta > 0.0 && delta <= 1.0 / 3.0)) throw ConfigError("delta must lie in (0, 1/3]");
    const ADeltaSpec window(delta, pair.rho0.length());
    if (!in_a_delta(pair.rho0, window) || !in_a_delta(pair.rho1, window))
        throw ConfigError("densities are outside A_delta for delta = " + format_double(delta));
    const auto ladder = resolve_ladder(rc, pair.rho0.dx(), "0.4,0.2,0.1");
    const double chi_bound = rc.get_double("chi_bound", 3.0);

    const auto pot = potentials(pair.rho0, pair.rho1);
    auto os = open_csv(out_dir, "tildeq_report.csv", rc);
    os << "epsilon,Z,l1_pi0,l1_pi1,chi_min,chi_max\n";
    bool ok = true;
    double prev_zgap = 1e300, prev_l0 = 1e300, prev_l1 = 1e300;
    for (const double eps : ladder) {
        const auto p = KernelParams::from_epsilon(eps);
        const auto bundle = build_tilde_q(pair.rho0, pair.rho1, pot, p);
        const auto rep = marginal_convergence_report(bundle, pair.rho0, pair.rho1, p);
        os << format_double(eps) << ',' << format_double(rep.z_epsilon) << ','
           << format_double(rep.l1_pi0) << ',' << format_double(rep.l1_pi1) << ','
           << format_double(rep.chi_min) << ',' << format_double(rep.chi_max) << '\n';
        const double zgap = std::abs(rep.z_epsilon - 1.0);
        if (zgap > prev_zgap + 1e-12 || rep.l1_pi0 > prev_l0 + 1e-12 ||
            rep.l1_pi1 > prev_l1 + 1e-12) {
            ok = false;
            log << "tildeq-report: convergence trend broken at eps=" << format_double(eps) << '\n';
        }
        if (rep.chi_min < 1.0 / chi_bound || rep.chi_max > chi_bound) {
            ok = false;
            log << "tildeq-report: interior chi outside [1/" << format_double(chi_bound) << ", "
                << format_double(chi_bound) << "] at eps=" << format_double(eps) << '\n';
        }
        prev_zgap = zgap;
        prev_l0 = rep.l1_pi0;
        prev_l1 = rep.l1_pi1;
    }
    return ok ? kExitPass : kExitCheckFailure;
}

int run_command(const std::string& name, const ExperimentConfig& cfg, const std::string& out_dir,
                std::ostream& log) {
    try {
        if (name == "gamma-sweep") return cmd_gamma_sweep(cfg, out_dir, log);
        if (name == "bridge-solve") return cmd_bridge_solve(cfg, out_dir, log);
        if (name == "jko-run") return cmd_jko_run(cfg, out_dir, log);
        if (name == "particles-run") return cmd_particles_run(cfg, out_dir, log);
        if (name == "seminorm-check") return cmd_seminorm_check(cfg, out_dir, log);
        if (name == "tildeq-report") return cmd_tildeq_report(cfg, out_dir, log);
        log << "unknown command: " << name << '\n';
        return kExitConfigError;
    } catch (const Nonconvergence& e) {
        log << "solver failure: " << e.what() << '\n';
        return kExitSolverFailure;
    } catch (const PotentialOverflow& e) {
        log << "solver failure: " << e.what() << '\n';
        return kExitSolverFailure;
    } catch (const MonotonicityViolation& e) {
        log << "solver failure: " << e.what() << '\n';
        return kExitSolverFailure;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const Error& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }
}

}  // namespace gflow
