#pragma once

#include "xpinnlab/errors.hpp"
#include "xpinnlab/network.hpp"
#include "xpinnlab/tape.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace xpinnlab::ad {

/// The loss pipeline is written once against a backend with this op set and
/// instantiated twice: EvalBackend computes plain values (no recording),
/// TapeBackend records onto a Tape for reverse-mode gradients.
struct EvalBackend {
    using Val = linalg::Matrix;
    Val constant(linalg::Matrix m) { return m; }
    Val matmul(const Val& a, const Val& b) { return linalg::matmul(a, b); }
    Val add(const Val& a, const Val& b) { return linalg::add(a, b); }
    Val sub(const Val& a, const Val& b) { return linalg::sub(a, b); }
    Val hadamard(const Val& a, const Val& b) { return linalg::hadamard(a, b); }
    Val scale(const Val& a, double c) { return linalg::scale(a, c); }
    Val add_col(const Val& a, const Val& c) {
        if (c.cols() != 1 || c.rows() != a.rows()) throw ShapeError("add_col: bias shape mismatch");
        Val out = a;
        for (std::size_t r = 0; r < out.rows(); ++r)
            for (std::size_t j = 0; j < out.cols(); ++j) out(r, j) += c(r, 0);
        return out;
    }
    Val act(const Val& a, ActivationKind kind, int order) {
        Val out(a.rows(), a.cols());
        for (std::size_t i = 0; i < a.size(); ++i)
            out.data()[i] = activation_eval(kind, order, a.data()[i]);
        return out;
    }
    Val sum(const Val& a) {
        Val out(1, 1);
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) acc += a.data()[i];
        out(0, 0) = acc;
        return out;
    }
    Val col(const Val& a, std::size_t k) {
        Val out(a.rows(), 1);
        for (std::size_t r = 0; r < a.rows(); ++r) out(r, 0) = a(r, k);
        return out;
    }
    double scalar_value(const Val& v) const {
        if (v.rows() != 1 || v.cols() != 1) throw ShapeError("scalar_value: not 1×1");
        return v(0, 0);
    }
};

struct TapeBackend {
    Tape* tape;
    using Val = Tape::Id;
    Val constant(linalg::Matrix m) { return tape->constant(std::move(m)); }
    Val matmul(Val a, Val b) { return tape->matmul(a, b); }
    Val add(Val a, Val b) { return tape->add(a, b); }
    Val sub(Val a, Val b) { return tape->sub(a, b); }
    Val hadamard(Val a, Val b) { return tape->hadamard(a, b); }
    Val scale(Val a, double c) { return tape->scale(a, c); }
    Val add_col(Val a, Val c) { return tape->add_col(a, c); }
    Val act(Val a, ActivationKind kind, int order) { return tape->act(a, kind, order); }
    Val sum(Val a) { return tape->sum(a); }
    Val col(Val a, std::size_t k) { return tape->col(a, k); }
    double scalar_value(Val v) const { return tape->scalar_value(v); }
};

/// A network's parameters lifted into a backend.
template <class B>
struct BNet {
    ActivationKind activation = ActivationKind::Tanh;
    std::vector<typename B::Val> w; // W^l
    std::vector<typename B::Val> b; // b^l as m×1 columns
    std::size_t depth() const { return w.size(); }
};

inline linalg::Matrix bias_column(const linalg::Vector& b) {
    linalg::Matrix m(b.size(), 1);
    for (std::size_t i = 0; i < b.size(); ++i) m(i, 0) = b[i];
    return m;
}

inline BNet<EvalBackend> lift(EvalBackend&, const Mlp& net) {
    BNet<EvalBackend> out;
    out.activation = net.activation;
    out.w = net.weights;
    for (const auto& b : net.biases) out.b.push_back(bias_column(b));
    return out;
}

/// Parameters become tape roots; their adjoints are the training gradients.
inline BNet<TapeBackend> lift(TapeBackend& bk, const Mlp& net) {
    BNet<TapeBackend> out;
    out.activation = net.activation;
    for (std::size_t l = 0; l < net.depth(); ++l) {
        out.w.push_back(bk.tape->param(net.weights[l]));
        out.b.push_back(bk.tape->param(bias_column(net.biases[l])));
    }
    return out;
}

/// What to propagate alongside the batched forward pass.
struct DerivPlan {
    int order = 0;                 // 0: values only, 1: +gradients, 2: +full Hessian
    std::vector<int> third_axes;   // axes needing ∂³ (adds the matching ∂² diagonal)
};

/// Batched network outputs on a backend. Every entry is a 1×n row over the
/// batch; d2u holds the upper-triangle pairs the plan asked for.
template <class B>
struct BatchOut {
    typename B::Val u{};
    std::vector<typename B::Val> du;
    std::map<std::pair<int, int>, typename B::Val> d2u;
    std::map<int, typename B::Val> d3u;
};

/// One forward sweep propagating input-derivative chains of the requested
/// orders for every point in the batch at once. X is d×n and constant with
/// respect to parameters; derivative recurrences per layer:
///   a = Wz + b,    a' = Wz',    a'' = Wz'',    a''' = Wz'''
///   z = σ(a),      z' = σ′a',   z'' = σ″a'² + σ′a'',
///   z''' = σ‴a'³ + 3σ″a'a'' + σ′a'''
/// (primes = directional input derivatives, all elementwise over the batch).
template <class B>
BatchOut<B> batch_eval(B& bk, const BNet<B>& net, const linalg::Matrix& X, const DerivPlan& plan) {
    using Val = typename B::Val;
    using OVal = std::optional<Val>;
    const std::size_t d = X.rows(), n = X.cols(), L = net.depth();
    if (L == 0) throw ShapeError("batch_eval: empty network");
    if (n == 0) throw ShapeError("batch_eval: empty batch");

    std::vector<std::pair<int, int>> pairs;
    if (plan.order >= 2)
        for (int i = 0; i < static_cast<int>(d); ++i)
            for (int j = i; j < static_cast<int>(d); ++j) pairs.emplace_back(i, j);
    for (int ax : plan.third_axes) {
        const std::pair<int, int> p{ax, ax};
        bool have = false;
        for (const auto& q : pairs) have = have || q == p;
        if (!have) pairs.push_back(p);
    }
    const bool want_first = plan.order >= 1 || !pairs.empty();

    const Val ones = bk.constant(linalg::Matrix(1, n, 1.0));
    auto zero_row = [&]() { return bk.constant(linalg::Matrix(1, n, 0.0)); };

    // State: z-level value and derivative chains (absent ⇒ identically zero).
    Val z = bk.constant(X);
    std::vector<Val> gz;
    std::map<std::pair<int, int>, OVal> sz;
    std::map<int, OVal> tz;

    for (std::size_t l = 0; l < L; ++l) {
        const bool hidden = l + 1 < L;

        Val a = bk.add_col(bk.matmul(net.w[l], z), net.b[l]);
        std::vector<Val> ga;
        std::map<std::pair<int, int>, OVal> sa;
        std::map<int, OVal> ta;

        if (want_first)
            for (std::size_t k = 0; k < d; ++k)
                ga.push_back(l == 0 ? bk.matmul(bk.col(net.w[0], k), ones)
                                    : bk.matmul(net.w[l], gz[k]));
        for (const auto& pr : pairs)
            sa[pr] = (l > 0 && sz.at(pr)) ? OVal(bk.matmul(net.w[l], *sz.at(pr))) : std::nullopt;
        for (int ax : plan.third_axes)
            ta[ax] = (l > 0 && tz.at(ax)) ? OVal(bk.matmul(net.w[l], *tz.at(ax))) : std::nullopt;

        if (!hidden) {
            BatchOut<B> out;
            out.u = a;
            if (plan.order >= 1) out.du = ga;
            for (const auto& pr : pairs) out.d2u[pr] = sa.at(pr) ? *sa.at(pr) : zero_row();
            for (int ax : plan.third_axes) out.d3u[ax] = ta.at(ax) ? *ta.at(ax) : zero_row();
            return out;
        }

        const Val s1 = bk.act(a, net.activation, 1);
        Val s2{}, s3{};
        const bool need2 = !pairs.empty();
        const bool need3 = !plan.third_axes.empty();
        if (need2) s2 = bk.act(a, net.activation, 2);
        if (need3) s3 = bk.act(a, net.activation, 3);

        std::vector<Val> ngz;
        std::map<std::pair<int, int>, OVal> nsz;
        std::map<int, OVal> ntz;
        if (want_first)
            for (std::size_t k = 0; k < d; ++k) ngz.push_back(bk.hadamard(s1, ga[k]));
        for (const auto& pr : pairs) {
            Val quad = bk.hadamard(s2, bk.hadamard(ga[pr.first], ga[pr.second]));
            nsz[pr] = sa.at(pr) ? bk.add(quad, bk.hadamard(s1, *sa.at(pr))) : quad;
        }
        for (int ax : plan.third_axes) {
            const std::pair<int, int> dd{ax, ax};
            const Val& g1 = ga[ax];
            Val term = bk.hadamard(s3, bk.hadamard(g1, bk.hadamard(g1, g1)));
            if (sa.at(dd))
                term = bk.add(term, bk.scale(bk.hadamard(s2, bk.hadamard(g1, *sa.at(dd))), 3.0));
            if (ta.at(ax)) term = bk.add(term, bk.hadamard(s1, *ta.at(ax)));
            ntz[ax] = term;
        }

        z = bk.act(a, net.activation, 0);
        gz = std::move(ngz);
        sz = std::move(nsz);
        tz = std::move(ntz);
    }
    throw ShapeError("batch_eval: unreachable");
}

} // namespace xpinnlab::ad
