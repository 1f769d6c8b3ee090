#include "xpinnlab/losses.hpp"

#include <cmath>

namespace xpinnlab::losses {

namespace {

double scalar(const linalg::Matrix& m) {
    if (m.rows() != 1 || m.cols() != 1) throw ShapeError("loss value must be a scalar");
    return m(0, 0);
}

double opt_scalar(const std::optional<linalg::Matrix>& m) { return m ? scalar(*m) : 0.0; }

LossBreakdown breakdown_of(const detail::BlockVals<ad::EvalBackend>& v, const LossWeights& w) {
    LossBreakdown b;
    b.boundary = opt_scalar(v.boundary);
    b.residual = opt_scalar(v.residual);
    b.iface_u = opt_scalar(v.iface_u);
    b.iface_res = opt_scalar(v.iface_res);
    b.iface_grad = opt_scalar(v.iface_grad);
    b.total = w.boundary * b.boundary + w.residual * b.residual + w.interface_u * b.iface_u +
              w.interface_res * b.iface_res + w.interface_grad * b.iface_grad;
    return b;
}

} // namespace

double boundary_loss(const Mlp& net, const linalg::Matrix& X, const linalg::Vector& g) {
    if (X.cols() == 0) throw DomainError("boundary loss needs at least one point");
    if (g.size() != X.cols()) throw ShapeError("boundary targets must match the points");
    ad::EvalBackend bk;
    auto bn = ad::lift(bk, net);
    auto o = ad::batch_eval(bk, bn, X, ad::DerivPlan{0, {}});
    auto diff = bk.sub(o.u, bk.constant(detail::as_row(g)));
    return scalar(detail::mean_sq(bk, diff, X.cols()));
}

double residual_loss(const PdeProblem& p, const Mlp& net, const linalg::Matrix& X,
                     std::size_t branch) {
    if (X.cols() == 0) throw DomainError("residual loss needs at least one point");
    ad::EvalBackend bk;
    auto bn = ad::lift(bk, net);
    auto o = ad::batch_eval(bk, bn, X, p.deriv_plan());
    return scalar(detail::mean_sq(bk, detail::residual_minus_f(bk, p, bn, X, branch, o), X.cols()));
}

InterfaceTerms interface_losses(const PdeProblem& p, const Mlp& a, const Mlp& b,
                                const linalg::Matrix& X, std::size_t branch_a,
                                std::size_t branch_b) {
    if (X.cols() == 0) throw DomainError("interface losses need at least one point");
    ad::EvalBackend bk;
    auto na = ad::lift(bk, a);
    auto nb = ad::lift(bk, b);
    auto oa = ad::batch_eval(bk, na, X, p.deriv_plan());
    auto ob = ad::batch_eval(bk, nb, X, p.deriv_plan());
    InterfaceTerms out;
    auto avg = bk.scale(bk.add(oa.u, ob.u), 0.5);
    out.u_avg = scalar(detail::mean_sq(bk, bk.sub(oa.u, avg), X.cols()));
    auto ra = detail::residual_minus_f(bk, p, na, X, branch_a, oa);
    auto rb = detail::residual_minus_f(bk, p, nb, X, branch_b, ob);
    out.res_cont = scalar(detail::mean_sq(bk, bk.sub(ra, rb), X.cols()));
    return out;
}

double interface_grad_loss(const Mlp& a, const Mlp& b, const linalg::Matrix& X) {
    if (X.cols() == 0) throw DomainError("interface gradient loss needs at least one point");
    if (a.input_dim() != b.input_dim() || a.input_dim() != X.rows())
        throw ShapeError("interface gradient loss: dimension mismatch");
    ad::EvalBackend bk;
    auto na = ad::lift(bk, a);
    auto nb = ad::lift(bk, b);
    auto oa = ad::batch_eval(bk, na, X, ad::DerivPlan{1, {}});
    auto ob = ad::batch_eval(bk, nb, X, ad::DerivPlan{1, {}});
    double total = 0.0;
    for (std::size_t m = 0; m < X.rows(); ++m)
        total += scalar(detail::mean_sq(bk, bk.sub(oa.du[m], ob.du[m]), X.cols()));
    return total;
}

LossBreakdown pinn_total(const PdeProblem& p, const Mlp& net, const domain::TrainingSet& set,
                         const LossWeights& w) {
    const auto dec = domain::identity_decomposition();
    if (set.boundary_part_x.size() != 1)
        throw DomainError("single-network loss expects an undecomposed training set");
    ad::EvalBackend bk;
    std::vector<ad::BNet<ad::EvalBackend>> nets;
    nets.push_back(ad::lift(bk, net));
    auto vals = detail::block_components(bk, p, set, dec, w, nets, 0);
    return breakdown_of(vals, w);
}

XpinnLoss xpinn_total(const PdeProblem& p, const std::vector<Mlp>& nets,
                      const domain::TrainingSet& set, const domain::Decomposition& dec,
                      const LossWeights& w) {
    if (nets.size() != dec.size()) throw ShapeError("one network per subdomain required");
    ad::EvalBackend bk;
    std::vector<ad::BNet<ad::EvalBackend>> lifted;
    lifted.reserve(nets.size());
    for (const auto& n : nets) lifted.push_back(ad::lift(bk, n));
    XpinnLoss out;
    out.parts.reserve(dec.size());
    for (std::size_t i = 0; i < dec.size(); ++i) {
        auto vals = detail::block_components(bk, p, set, dec, w, lifted, i);
        out.parts.push_back(breakdown_of(vals, w));
        out.global.boundary += out.parts.back().boundary;
        out.global.residual += out.parts.back().residual;
        out.global.iface_u += out.parts.back().iface_u;
        out.global.iface_res += out.parts.back().iface_res;
        out.global.iface_grad += out.parts.back().iface_grad;
        out.global.total += out.parts.back().total;
    }
    return out;
}

ad::LossFn make_block_loss(const PdeProblem& p, const domain::TrainingSet& set,
                           const domain::Decomposition& dec, const LossWeights& w,
                           std::size_t block) {
    return ad::make_loss([&p, &set, &dec, w, block](auto& bk, auto& nets) {
        return detail::block_total(bk, p, set, dec, w, nets, block);
    });
}

} // namespace xpinnlab::losses
