#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "gflow/experiments.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "Config file (key = value lines)");
    cmd->add_option("--out", opts.out_dir, "Output directory for CSV files");
    cmd->add_option("--set", opts.sets, "Override: key=value (repeatable)");
    cmd->add_option("--seed", opts.seed, "Base RNG seed")->each([&](const std::string&) {
        opts.seed_given = true;
    });
}

int dispatch(const std::string& name, const CommonOpts& opts) {
    gflow::ExperimentConfig cfg;
    try {
        if (!opts.config_path.empty())
            cfg = gflow::ExperimentConfig::from_file(opts.config_path);
        for (const auto& kv : opts.sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                std::cerr << "config error: --set expects key=value, got " << kv << '\n';
                return gflow::kExitConfigError;
            }
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (opts.seed_given) cfg.set("seed", std::to_string(opts.seed));
    } catch (const gflow::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return gflow::kExitConfigError;
    }
    return gflow::run_command(name, cfg, opts.out_dir, std::cerr);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for entropic bridges, 1D optimal transport "
                 "and entropy-driven gradient-flow steps"};
    app.set_version_flag("--version", std::string(gflow::kToolName) + " " + gflow::kToolVersion);
    app.require_subcommand(1);

    const std::vector<std::string> names = {"gamma-sweep",    "jko-run",       "particles-run",
                                            "bridge-solve",   "seminorm-check", "tildeq-report"};
    std::vector<CommonOpts> opts(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        auto* cmd = app.add_subcommand(names[i]);
        add_common(cmd, opts[i]);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < names.size(); ++i)
        if (app.get_subcommand(names[i])->parsed()) return dispatch(names[i], opts[i]);
    return gflow::kExitConfigError;
}
