#pragma once

#include "xpinnlab/autodiff.hpp"
#include "xpinnlab/domain.hpp"
#include "xpinnlab/pde.hpp"

#include <optional>
#include <vector>

namespace xpinnlab::losses {

struct LossWeights {
    double residual = 1.0;
    double boundary = 1.0;
    double interface_u = 1.0;
    double interface_res = 0.0;
    double interface_grad = 0.0;
};

/// Raw (unweighted) mean-square components; total is the weighted sum.
struct LossBreakdown {
    double boundary = 0.0;
    double residual = 0.0;
    double iface_u = 0.0;
    double iface_res = 0.0;
    double iface_grad = 0.0;
    double total = 0.0;
};

/// (1/n)Σ (u(x) − g)² over the given points.
double boundary_loss(const Mlp& net, const linalg::Matrix& X, const linalg::Vector& g);

/// (1/n)Σ (L u(x) − f(x))², f resolved through the given subdomain branch.
double residual_loss(const PdeProblem& p, const Mlp& net, const linalg::Matrix& X,
                     std::size_t branch = 0);

/// The two coupling terms at shared points: the distance-to-average term
/// (identical value for both nets) and the residual-continuity term.
struct InterfaceTerms {
    double u_avg = 0.0;
    double res_cont = 0.0;
};
InterfaceTerms interface_losses(const PdeProblem& p, const Mlp& a, const Mlp& b,
                                const linalg::Matrix& X, std::size_t branch_a,
                                std::size_t branch_b);

/// (1/n)Σ Σ_m (∂u_a/∂x_m − ∂u_b/∂x_m)².
double interface_grad_loss(const Mlp& a, const Mlp& b, const linalg::Matrix& X);

/// Full single-net objective on a set sampled without decomposition.
LossBreakdown pinn_total(const PdeProblem& p, const Mlp& net, const domain::TrainingSet& set,
                         const LossWeights& w);

struct XpinnLoss {
    std::vector<LossBreakdown> parts;
    LossBreakdown global; // componentwise sum of the parts
};
/// Per-subdomain objectives: each part owns its data terms plus its copy of
/// every adjacent interface's coupling terms (so the symmetric terms appear
/// in both adjacent parts, and interface gradients reach both nets).
XpinnLoss xpinn_total(const PdeProblem& p, const std::vector<Mlp>& nets,
                      const domain::TrainingSet& set, const domain::Decomposition& dec,
                      const LossWeights& w);

/// Differentiable objective of one subdomain block (expects all nets).
ad::LossFn make_block_loss(const PdeProblem& p, const domain::TrainingSet& set,
                           const domain::Decomposition& dec, const LossWeights& w,
                           std::size_t block);

// ---- generic assembly (one definition for both backends) ----

namespace detail {

inline ad::EvalBackend::Val call_residual(ad::EvalBackend& bk, const PdeProblem& p,
                                          const linalg::Matrix& X,
                                          const ad::BatchOut<ad::EvalBackend>& o) {
    return p.residual_eval(bk, X, o);
}
inline ad::TapeBackend::Val call_residual(ad::TapeBackend& bk, const PdeProblem& p,
                                          const linalg::Matrix& X,
                                          const ad::BatchOut<ad::TapeBackend>& o) {
    return p.residual_tape(bk, X, o);
}

template <class B>
typename B::Val mean_sq(B& bk, const typename B::Val& row, std::size_t n) {
    return bk.scale(bk.sum(bk.hadamard(row, row)), 1.0 / static_cast<double>(n));
}

inline linalg::Matrix as_row(const linalg::Vector& v) {
    linalg::Matrix m(1, v.size());
    for (std::size_t i = 0; i < v.size(); ++i) m(0, i) = v[i];
    return m;
}

template <class B>
typename B::Val residual_minus_f(B& bk, const PdeProblem& p, ad::BNet<B>& net,
                                 const linalg::Matrix& X, std::size_t branch,
                                 const ad::BatchOut<B>& o) {
    auto lu = call_residual(bk, p, X, o);
    linalg::Matrix f(1, X.cols());
    bool nonzero = false;
    for (std::size_t q = 0; q < X.cols(); ++q) {
        linalg::Vector x(X.rows());
        for (std::size_t k = 0; k < X.rows(); ++k) x[k] = X(k, q);
        f(0, q) = p.source_at(x, branch);
        nonzero = nonzero || f(0, q) != 0.0;
    }
    (void)net;
    return nonzero ? bk.sub(lu, bk.constant(f)) : lu;
}

inline ad::DerivPlan interface_plan(const PdeProblem& p, const LossWeights& w) {
    ad::DerivPlan plan;
    plan.order = 0;
    if (w.interface_grad != 0.0) plan.order = 1;
    if (w.interface_res != 0.0) {
        const ad::DerivPlan base = p.deriv_plan();
        plan.order = std::max(plan.order, base.order);
        plan.third_axes = base.third_axes;
    }
    return plan;
}

template <class B>
struct BlockVals {
    std::optional<typename B::Val> boundary, residual, iface_u, iface_res, iface_grad;
};

template <class B>
BlockVals<B> block_components(B& bk, const PdeProblem& p, const domain::TrainingSet& set,
                              const domain::Decomposition& dec, const LossWeights& w,
                              std::vector<ad::BNet<B>>& nets, std::size_t block) {
    using Val = typename B::Val;
    if (nets.size() != dec.size()) throw ShapeError("one network per subdomain required");
    if (block >= dec.size()) throw ShapeError("block index out of range");
    BlockVals<B> out;
    auto accum = [&bk](std::optional<Val>& slot, Val v) {
        slot = slot ? bk.add(*slot, v) : v;
    };

    if (w.boundary != 0.0 && set.n_boundary_of(block) > 0) {
        const linalg::Matrix& X = set.boundary_part_x[block];
        auto o = ad::batch_eval(bk, nets[block], X, ad::DerivPlan{0, {}});
        auto diff = bk.sub(o.u, bk.constant(as_row(set.boundary_part_g[block])));
        out.boundary = mean_sq(bk, diff, X.cols());
    }

    if (w.residual != 0.0) {
        if (set.n_residual_of(block) == 0)
            throw DomainError("subdomain '" + dec.parts[block].name + "' has no residual points");
        const linalg::Matrix& X = set.residual_part_x[block];
        auto o = ad::batch_eval(bk, nets[block], X, p.deriv_plan());
        out.residual = mean_sq(bk, residual_minus_f(bk, p, nets[block], X, block, o), X.cols());
    }

    const ad::DerivPlan iplan = interface_plan(p, w);
    for (std::size_t k = 0; k < dec.interfaces.size(); ++k) {
        const auto& iface = dec.interfaces[k];
        if (iface.i != block && iface.j != block) continue;
        const std::size_t other = iface.i == block ? iface.j : iface.i;
        const linalg::Matrix& X = set.interface_x[k];
        if (X.cols() == 0) continue;
        const bool any = w.interface_u != 0.0 || w.interface_res != 0.0 ||
                         w.interface_grad != 0.0;
        if (!any) continue;
        auto oi = ad::batch_eval(bk, nets[block], X, iplan);
        auto oj = ad::batch_eval(bk, nets[other], X, iplan);
        if (w.interface_u != 0.0) {
            auto avg = bk.scale(bk.add(oi.u, oj.u), 0.5);
            accum(out.iface_u, mean_sq(bk, bk.sub(oi.u, avg), X.cols()));
        }
        if (w.interface_res != 0.0) {
            auto ri = residual_minus_f(bk, p, nets[block], X, block, oi);
            auto rj = residual_minus_f(bk, p, nets[other], X, other, oj);
            accum(out.iface_res, mean_sq(bk, bk.sub(ri, rj), X.cols()));
        }
        if (w.interface_grad != 0.0) {
            std::optional<Val> acc;
            for (std::size_t m = 0; m < X.rows(); ++m)
                accum(acc, mean_sq(bk, bk.sub(oi.du[m], oj.du[m]), X.cols()));
            accum(out.iface_grad, *acc);
        }
    }
    return out;
}

template <class B>
typename B::Val block_total(B& bk, const PdeProblem& p, const domain::TrainingSet& set,
                            const domain::Decomposition& dec, const LossWeights& w,
                            std::vector<ad::BNet<B>>& nets, std::size_t block) {
    using Val = typename B::Val;
    BlockVals<B> parts = block_components(bk, p, set, dec, w, nets, block);
    std::optional<Val> total;
    auto put = [&](const std::optional<Val>& v, double weight) {
        if (!v || weight == 0.0) return;
        Val t = bk.scale(*v, weight);
        total = total ? bk.add(*total, t) : t;
    };
    put(parts.boundary, w.boundary);
    put(parts.residual, w.residual);
    put(parts.iface_u, w.interface_u);
    put(parts.iface_res, w.interface_res);
    put(parts.iface_grad, w.interface_grad);
    if (!total) return bk.constant(linalg::Matrix(1, 1, 0.0));
    return *total;
}

} // namespace detail

} // namespace xpinnlab::losses
