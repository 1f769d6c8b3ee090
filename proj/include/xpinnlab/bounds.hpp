#pragma once

#include "xpinnlab/network.hpp"
#include "xpinnlab/pde.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace xpinnlab::bounds {

/// Per-layer integer capacity caps and the raw norms they were ceiled from.
/// With include_bias the norms are taken over the augmented matrices [W|b].
struct LayerCaps {
    std::vector<std::int64_t> m; // ⌈‖W^l‖₂⌉, at least 1
    std::vector<std::int64_t> n; // ⌈‖W^l‖₂,₁ / ‖W^l‖₂⌉, at least 1
    std::vector<double> spectral;
    std::vector<double> norm21;
    bool include_bias = true;

    std::size_t layers() const { return m.size(); }
};

LayerCaps layer_caps(const Mlp& net, bool include_bias = true);

/// δ(M,N) = δ / Π_l M(l)(M(l)+1)N(l)(N(l)+1).
double delta_split(double delta, const LayerCaps& caps);

struct BoundInputs {
    LayerCaps caps;
    std::size_t n_b = 2;
    std::size_t n_r = 2;
    std::size_t d = 1; // input dimension
    std::size_t h = 1; // maximum layer width
    std::size_t depth = 1;
    double k_bound = 1.0;
    double delta = 0.1;
};

/// Convenience: derive d/h/L and caps from a network.
BoundInputs bound_inputs(const Mlp& net, const PdeProblem& p, std::size_t n_b, std::size_t n_r,
                         double delta, bool include_bias = true);

/// Boundary-term generalization bound (K-independent).
double boundary_bound(const BoundInputs& in);

/// Residual-term generalization bound.
double residual_bound(const BoundInputs& in);

/// √2/C1 · √(boundary + residual): the L₂-level comparison quantity.
double l2_bound(double boundary, double residual, double c1);

/// Count-weighted convex combination Σ (w_i/Σw)·b_i of sub-net bounds.
double xpinn_aggregate(const std::vector<double>& bound_values,
                       const std::vector<std::size_t>& weights);

struct Complexity {
    double spectral_product = 0.0; // Π raw ‖W^l‖₂ (un-ceiled)
    double full_product = 0.0;     // ΠM(l) · (ΣN(l)^{2/3})^{3/2}
};
Complexity complexity(const Mlp& net, bool include_bias = true);

/// Everything the CLI reports for one network on one problem instance.
struct BoundReport {
    std::string model;
    LayerCaps caps;
    std::size_t n_b = 0;
    std::size_t n_r = 0;
    double delta = 0.1;
    double delta_mn = 0.0;
    std::optional<double> boundary; // absent when the net sees no boundary points
    double residual = 0.0;
    double l2 = 0.0; // up to the C1 constant
    double c1 = 1.0;
    Complexity complexity;
    bool out_of_assumption = false;
};

BoundReport bound_report(const Mlp& net, const PdeProblem& p, std::size_t n_b, std::size_t n_r,
                         double delta, double c1, bool include_bias, std::string model);

struct ComparisonEntry {
    std::string model;
    double boundary = 0.0; // aggregated over sub-nets for the decomposed model
    double residual = 0.0;
    double l2 = 0.0;
    double bound_pct = 100.0;
    double complexity_spectral = 0.0;
    double complexity_pct = 100.0;
};

struct ComparisonReport {
    ComparisonEntry pinn;                // always exactly 100.00%
    std::vector<BoundReport> sub_reports;
    std::vector<double> sub_complexity_pct; // per sub-net, vs the PINN
    ComparisonEntry xpinn;
    std::string verdict; // "pinn" | "xpinn" | "tie"
};

/// Aggregate sub-net bounds (residual weighted by n_{r,i}, boundary by
/// n_{b,i}; zero-count entries are skipped) and normalize against the
/// single-net baseline.
ComparisonReport compare_posterior(const BoundReport& pinn,
                                   const std::vector<BoundReport>& subs);

/// Sum of sine terms a·sin(x_axis) with, per subdomain, the axes that are
/// pinned to a constant value there (absent entry = the axis varies).
struct SinusoidTarget {
    struct Term {
        double coeff = 0.0;
        std::size_t axis = 0;
    };
    std::vector<Term> terms;
    // pinned[s][axis] = the constant the axis takes on subdomain s
    std::vector<std::vector<std::optional<double>>> pinned;
    std::size_t input_dim = 0;
};

/// Σ|a_i| over terms whose axis varies on the subdomain. A term pinned where
/// the sine vanishes contributes 0; pinned at a nonzero value is rejected.
double barron_norm(const SinusoidTarget& target, std::size_t subdomain);

/// The whole-domain norm: a term counts if it varies on any subdomain.
double barron_norm_whole(const SinusoidTarget& target);

struct PriorComparison {
    double pinn_q = 0.0;  // ‖u*‖³
    double xpinn_q = 0.0; // Σ w_i ‖u*‖³_{Ω_i}
    std::string verdict;  // "pinn" | "xpinn" | "tie"
    bool asymptotic = false;
};

/// Cubed-norm comparison with weights (log n_i √n_i)/(log n √n); the
/// asymptotic mode drops the log ratio, leaving √(n_i/n).
PriorComparison prior_compare(const SinusoidTarget& target, std::size_t n_r,
                              const std::vector<std::size_t>& n_ri, bool asymptotic);

/// a·sin x + b·sin y on the two axis segments through the origin
/// (y pinned to 0 on the first part, x pinned to 0 on the second).
SinusoidTarget broken_line_target(double a, double b);

/// a·sin x + b·sin y on an axis segment (y=0) joined to a diagonal segment
/// where both coordinates vary.
SinusoidTarget diagonal_target(double a, double b);

/// Bisection for the coefficient q where 2·sin x + q·sin y on the diagonal
/// geometry switches verdict (asymptotic mode, equal halves).
double prior_crossover_q(double lo, double hi, double tol);

} // namespace xpinnlab::bounds
