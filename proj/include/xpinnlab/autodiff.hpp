#pragma once

#include "xpinnlab/batched.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace xpinnlab::ad {

/// Per-layer parameter gradients mirroring an Mlp's weights and biases
/// (biases as m×1 columns).
struct ParamGradient {
    std::vector<linalg::Matrix> w;
    std::vector<linalg::Matrix> b;
};

/// A scalar loss written once against the backend op set; `eval` computes
/// the plain value, `taped` records the same computation for reverse mode.
/// Both are instantiated from one generic callable by make_loss, so the two
/// paths cannot drift apart.
struct LossFn {
    std::function<EvalBackend::Val(EvalBackend&, std::vector<BNet<EvalBackend>>&)> eval;
    std::function<TapeBackend::Val(TapeBackend&, std::vector<BNet<TapeBackend>>&)> taped;
};

template <class F>
LossFn make_loss(F f) {
    LossFn out;
    out.eval = [f](EvalBackend& bk, std::vector<BNet<EvalBackend>>& nets) { return f(bk, nets); };
    out.taped = [f](TapeBackend& bk, std::vector<BNet<TapeBackend>>& nets) { return f(bk, nets); };
    return out;
}

/// Untaped loss value.
double eval_loss(const LossFn& loss, const std::vector<Mlp>& nets);

/// Loss value plus one ParamGradient per net, from a single recorded tape.
std::pair<double, std::vector<ParamGradient>> grad(const LossFn& loss, const std::vector<Mlp>& nets);

/// Central finite differences over every parameter coordinate of every net;
/// returns the worst relative error against the reverse-mode gradient.
/// Coordinates below a millionth of the largest gradient magnitude are
/// compared at that scale instead (they are FD-roundoff-dominated).
double check_gradient(const LossFn& loss, const std::vector<Mlp>& nets, double step = 1e-6);

linalg::Vector flatten_gradient(const ParamGradient& g);

} // namespace xpinnlab::ad
