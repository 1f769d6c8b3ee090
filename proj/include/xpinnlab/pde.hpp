#pragma once

#include "xpinnlab/batched.hpp"
#include "xpinnlab/domain.hpp"
#include "xpinnlab/network.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace xpinnlab {

/// Linear operator Σ aᵢⱼ ∂ᵢ∂ⱼu + Σ bᵢ ∂ᵢu + c·u with coefficient callables
/// (null ⇒ identically zero). `active_pairs` lists the unordered (i ≤ j)
/// second-order pairs that can be nonzero so evaluation skips dead chains.
struct SecondOrderOperator {
    std::size_t dim = 2;
    int order = 2; // 1 or 2
    std::function<double(const linalg::Vector&, std::size_t, std::size_t)> a;
    std::function<double(const linalg::Vector&, std::size_t)> b;
    std::function<double(const linalg::Vector&)> c;
    std::vector<std::pair<int, int>> active_pairs;
    std::vector<int> active_b;
};

/// Uniform tensor grid with bilinear interpolation; the exchange format for
/// external reference solutions ("refgrid v1").
struct ReferenceGrid {
    std::string axis0_name = "x", axis1_name = "t";
    std::vector<double> axis0, axis1;  // strictly ascending
    std::vector<double> values;        // axis0-major: values[i·|axis1| + j]

    double at(std::size_t i, std::size_t j) const { return values[i * axis1.size() + j]; }
    double interpolate(double u, double v) const;
    bool covers(const domain::Box& box) const;
};

ReferenceGrid load_reference_grid(const std::string& path);
void save_reference_grid(const ReferenceGrid& grid, const std::string& path);

struct PdeProblem {
    std::string name;
    domain::Box box;
    std::vector<std::string> axis_names; // one label per input coordinate

    int operator_order = 2;          // highest input-derivative order in the residual
    std::vector<int> third_axes;     // axes with third derivatives (order-3 residuals)
    bool out_of_assumption = false;  // residual outside the linear-operator class
    double k_bound = 1.0;            // K: coefficient magnitude bound

    std::optional<SecondOrderOperator> op;
    std::function<double(const linalg::Vector&)> exact;          // null ⇒ reference-based
    std::function<double(const linalg::Vector&)> source;         // f
    /// f evaluated as subdomain `branch` sees it (discontinuous sources at
    /// interfaces); falls back to `source` when null.
    std::function<double(const linalg::Vector&, std::size_t)> source_branch;
    std::function<double(const linalg::Vector&)> boundary_data;  // g on labeled faces
    std::shared_ptr<ReferenceGrid> reference;

    /// L u over a batch, as a 1×n row built from batched derivatives.
    std::function<ad::EvalBackend::Val(ad::EvalBackend&, const linalg::Matrix&,
                                       const ad::BatchOut<ad::EvalBackend>&)> residual_eval;
    std::function<ad::TapeBackend::Val(ad::TapeBackend&, const linalg::Matrix&,
                                       const ad::BatchOut<ad::TapeBackend>&)> residual_tape;

    ad::DerivPlan deriv_plan() const;
    double source_at(const linalg::Vector& x, std::size_t branch) const;
};

/// Install one generic residual functional for both backends.
template <class F>
void set_residual(PdeProblem& p, F f) {
    p.residual_eval = [f](ad::EvalBackend& bk, const linalg::Matrix& X,
                          const ad::BatchOut<ad::EvalBackend>& o) { return f(bk, X, o); };
    p.residual_tape = [f](ad::TapeBackend& bk, const linalg::Matrix& X,
                          const ad::BatchOut<ad::TapeBackend>& o) { return f(bk, X, o); };
}

/// Pointwise L u via the closed-form network derivatives.
double apply_operator(const SecondOrderOperator& op, const Mlp& net, const linalg::Vector& x);

/// u_t = u_xx on [−1,1]×[0,1]; boundary data on x = ±1 and t = 0 from the
/// four-term analytic solution.
PdeProblem make_heat();

/// u_t + 0.5 u_x = 0 on [−1,1]×[0,1]; exact solution is the transported
/// indicator 1{−0.2 ≤ x − 0.5t ≤ 0.2}.
PdeProblem make_advection();

/// u_xx + u_yy = f on [0,1]², f = 1 on [0.25,0.75]² else 0, zero boundary.
/// No analytic exact; pair with fd_poisson_reference.
PdeProblem make_poisson();

/// u_t + u·u_x = 0.0025 u_xxx on [−1,1]×[0,1], u(x,0) = cos(πx); nonlinear
/// third-order residual (flagged out-of-assumption), x = ±1 data and the
/// evaluation reference both come from the supplied grid.
PdeProblem make_kdv(std::shared_ptr<ReferenceGrid> reference);

/// Five-point finite-difference solve of the Poisson benchmark on an n×n
/// grid (conjugate gradient, relative residual < 1e-12). The discontinuous
/// source enters with tensor-product trapezoid weights so the solve keeps
/// second-order accuracy.
ReferenceGrid fd_poisson_reference(std::size_t n);

} // namespace xpinnlab
