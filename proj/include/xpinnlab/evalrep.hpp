#pragma once

#include "xpinnlab/domain.hpp"
#include "xpinnlab/network.hpp"
#include "xpinnlab/pde.hpp"

#include <string>
#include <utility>
#include <vector>

namespace xpinnlab::evalrep {

/// Uniform test grid; zero entries pick the per-benchmark default
/// (320×320 for the KdV problem, 401×401 otherwise).
struct GridSpec {
    std::size_t n0 = 0, n1 = 0;
};
GridSpec default_grid(const PdeProblem& p);

struct Evaluation {
    double rel_l2 = 0.0;
    double max_abs_err = 0.0;
    std::size_t n0 = 0, n1 = 0;
    ReferenceGrid error; // |u_pred − u_ref| on the grid
};

/// Dense-grid comparison against the exact solution (or the problem's
/// reference grid when no closed form exists). Each node is predicted by
/// exactly the sub-net owning its subdomain.
Evaluation evaluate(const PdeProblem& p, const domain::Decomposition& dec,
                    const std::vector<Mlp>& nets, GridSpec spec = {});

double relative_l2(const PdeProblem& p, const domain::Decomposition& dec,
                   const std::vector<Mlp>& nets, GridSpec spec = {});

/// Write the |error| field in the refgrid v1 format for external plotting.
Evaluation error_field(const PdeProblem& p, const domain::Decomposition& dec,
                       const std::vector<Mlp>& nets, const std::string& path,
                       GridSpec spec = {});

struct SeedStats {
    double mean = 0.0;
    double stddev = 0.0; // population convention
};
SeedStats seed_stats(const std::vector<double>& values);

/// Scientific notation with 4 significant digits and a bare exponent,
/// e.g. 0.0017784 → "1.778e-3".
std::string format_sci(double v);
std::string format_mean_std(double mean, double stddev);

struct SeedTableRow {
    std::string field;
    SeedStats stats;
    std::string formatted; // "mean±std"
};
/// One row per field over the per-seed values.
std::vector<SeedTableRow> seed_table(
    const std::vector<std::pair<std::string, std::vector<double>>>& fields);

} // namespace xpinnlab::evalrep
