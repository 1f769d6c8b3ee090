#include "xpinnlab/errors.hpp"
#include "xpinnlab/runner.hpp"
#include "xpinnlab/selfcheck.hpp"

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

using namespace xpinnlab;

int main(int argc, char** argv) {
    CLI::App app{"physics-informed network lab: training, domain decomposition and "
                 "posterior/prior generalization bounds"};
    app.require_subcommand(1);

    // train
    std::string config_path;
    std::int64_t seed = 0;
    double delta = 0.1, c1 = 1.0;
    bool include_bias = true;
    std::string out;
    auto* train = app.add_subcommand("train", "train from a TOML config and write run artifacts");
    train->add_option("config", config_path, "run configuration (TOML)")->required();
    train->add_option("--seed", seed, "train a single seed, overriding the config list")
        ->check(CLI::NonNegativeNumber);
    train->add_option("--delta", delta, "confidence level for the bound reports");
    train->add_option("--c1", c1, "domain constant in the L2 bound");
    train->add_option("--include-bias", include_bias,
                      "fold biases into the per-layer capacity matrices");
    train->add_option("--out", out, "output directory, overriding the config");

    // bounds
    run::BoundsArgs bargs;
    auto* bnd = app.add_subcommand(
        "bounds", "posterior bounds for saved checkpoints (first = undecomposed baseline)");
    bnd->add_option("checkpoints", bargs.checkpoints, "network checkpoint JSON files")
        ->required()
        ->expected(-1);
    bnd->add_option("--benchmark", bargs.benchmark, "benchmark the nets were trained on")
        ->capture_default_str();
    bnd->add_option("--nb", bargs.n_b, "boundary sample count")->capture_default_str();
    bnd->add_option("--nr", bargs.n_r, "residual sample count")->capture_default_str();
    bnd->add_option("--sub-nb", bargs.sub_nb, "per-sub-net boundary counts (default: even split)")
        ->delimiter(',');
    bnd->add_option("--sub-nr", bargs.sub_nr, "per-sub-net residual counts (default: even split)")
        ->delimiter(',');
    bnd->add_option("--subnets", bargs.subnets,
                    "confidence divisor (default: number of sub-net checkpoints)");
    bnd->add_option("--delta", bargs.delta, "confidence level")->capture_default_str();
    bnd->add_option("--c1", bargs.c1, "domain constant in the L2 bound")->capture_default_str();
    bnd->add_option("--include-bias", bargs.include_bias,
                    "fold biases into the capacity matrices")
        ->capture_default_str();
    bnd->add_option("--out", bargs.out, "directory for bounds.json / bounds.csv");

    // compare
    std::vector<std::string> run_dirs;
    std::string cmp_out;
    auto* cmp = app.add_subcommand("compare", "tabulate finished runs against a baseline");
    cmp->add_option("runs", run_dirs, "run directories containing summary.json")
        ->required()
        ->expected(-1);
    cmp->add_option("--out", cmp_out, "directory for compare.json / compare.csv");

    // example
    std::string example_name;
    double q = -1.0;
    auto* exa = app.add_subcommand("example",
                                   "closed-form prior comparisons on sinusoidal targets");
    exa->add_option("name", example_name, "one of: 4.1, 4.2, 4.3")->required();
    exa->add_option("--q", q, "second-coordinate amplitude for the diagonal-split target");

    // check
    auto* chk = app.add_subcommand("check", "run the built-in consistency checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*train) {
            run::CliOverrides ov;
            if (train->count("--seed")) ov.seed = static_cast<std::uint64_t>(seed);
            if (train->count("--delta")) ov.delta = delta;
            if (train->count("--c1")) ov.c1 = c1;
            if (train->count("--include-bias")) ov.include_bias = include_bias;
            if (train->count("--out")) ov.out = out;
            return run::cmd_train(config_path, ov);
        }
        if (*bnd) return run::cmd_bounds(bargs);
        if (*cmp) return run::cmd_compare(run_dirs, cmp_out);
        if (*exa)
            return run::cmd_example(example_name,
                                    exa->count("--q") ? std::optional<double>(q) : std::nullopt);
        if (*chk) return selfcheck::run_all();
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
