#pragma once

#include "xpinnlab/config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace xpinnlab::run {

/// Command-line overrides applied on top of a parsed config file.
struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> delta;
    std::optional<double> c1;
    std::optional<bool> include_bias;
    std::optional<std::string> out;
};

struct BoundsArgs {
    std::vector<std::string> checkpoints; // first = single-net baseline
    std::string benchmark = "poisson";    // sets K and the assumption flag
    std::size_t n_b = 100;
    std::size_t n_r = 1000;
    std::vector<std::size_t> sub_nb; // per-sub-net counts; empty = even split
    std::vector<std::size_t> sub_nr;
    std::size_t subnets = 0; // δ divisor for sub-nets; 0 = their count
    double delta = 0.1;
    double c1 = 1.0;
    bool include_bias = true;
    std::string out; // directory for bounds.json / bounds.csv ("" = print only)
};

/// Construct a benchmark problem, loading or computing the reference
/// solution it needs (KdV: required file; Poisson: FD solve when no file).
PdeProblem make_problem(const std::string& benchmark, const std::string& reference_path,
                        std::size_t fd_n = 401);

/// Worker-thread cap from XPINN_LAB_THREADS (default 1).
std::size_t thread_cap();

int cmd_train(const std::string& config_path, const CliOverrides& ov);
int cmd_bounds(const BoundsArgs& args);
int cmd_compare(const std::vector<std::string>& run_dirs, const std::string& out_dir);
int cmd_example(const std::string& name, std::optional<double> q);

} // namespace xpinnlab::run
