#include "xpinnlab/autodiff.hpp"

#include "xpinnlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace xpinnlab::ad {

using linalg::Matrix;
using linalg::Vector;

double eval_loss(const LossFn& loss, const std::vector<Mlp>& nets) {
    EvalBackend bk;
    std::vector<BNet<EvalBackend>> lifted;
    lifted.reserve(nets.size());
    for (const Mlp& n : nets) lifted.push_back(lift(bk, n));
    return bk.scalar_value(loss.eval(bk, lifted));
}

std::pair<double, std::vector<ParamGradient>> grad(const LossFn& loss, const std::vector<Mlp>& nets) {
    if (nets.empty()) throw InvalidInput("grad: no networks");
    Tape tape;
    TapeBackend bk{&tape};
    std::vector<BNet<TapeBackend>> lifted;
    lifted.reserve(nets.size());
    for (const Mlp& n : nets) lifted.push_back(lift(bk, n));

    const Tape::Id root = loss.taped(bk, lifted);
    const double value = tape.scalar_value(root);

    std::vector<Tape::Id> param_ids;
    for (const auto& bn : lifted)
        for (std::size_t l = 0; l < bn.depth(); ++l) {
            param_ids.push_back(bn.w[l]);
            param_ids.push_back(bn.b[l]);
        }
    std::vector<Matrix> adj = tape.gradients(root, param_ids);

    std::vector<ParamGradient> grads(nets.size());
    std::size_t pos = 0;
    for (std::size_t k = 0; k < nets.size(); ++k)
        for (std::size_t l = 0; l < nets[k].depth(); ++l) {
            grads[k].w.push_back(std::move(adj[pos++]));
            grads[k].b.push_back(std::move(adj[pos++]));
        }
    return {value, std::move(grads)};
}

Vector flatten_gradient(const ParamGradient& g) {
    Vector flat;
    for (std::size_t l = 0; l < g.w.size(); ++l) {
        flat.insert(flat.end(), g.w[l].data(), g.w[l].data() + g.w[l].size());
        flat.insert(flat.end(), g.b[l].data(), g.b[l].data() + g.b[l].size());
    }
    return flat;
}

double check_gradient(const LossFn& loss, const std::vector<Mlp>& nets, double step) {
    if (step <= 0.0) throw InvalidInput("check_gradient: step must be positive");
    auto [value, grads] = grad(loss, nets);
    (void)value;

    double gmax = 0.0;
    for (const auto& g : grads) {
        const Vector f = flatten_gradient(g);
        for (double v : f) gmax = std::max(gmax, std::abs(v));
    }
    const double floor = 1e-6 * std::max(1.0, gmax);

    double worst = 0.0;
    std::vector<Mlp> work = nets;
    for (std::size_t k = 0; k < nets.size(); ++k) {
        const Vector base = flatten_params(nets[k]);
        const Vector gk = flatten_gradient(grads[k]);
        Vector pert = base;
        for (std::size_t i = 0; i < base.size(); ++i) {
            pert[i] = base[i] + step;
            unflatten_params(work[k], pert);
            const double fp = eval_loss(loss, work);
            pert[i] = base[i] - step;
            unflatten_params(work[k], pert);
            const double fm = eval_loss(loss, work);
            pert[i] = base[i];
            const double fd = (fp - fm) / (2.0 * step);
            const double denom = std::max({std::abs(fd), std::abs(gk[i]), floor});
            worst = std::max(worst, std::abs(fd - gk[i]) / denom);
        }
        unflatten_params(work[k], base);
    }
    return worst;
}

} // namespace xpinnlab::ad
