#include "xpinnlab/bounds.hpp"

#include "xpinnlab/errors.hpp"
#include "xpinnlab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace xpinnlab::bounds {

namespace {

std::int64_t snapped_ceil(double x) {
    // Iterative norms can land a hair above an exact integer; snap within
    // 1e-9 relative so ⌈3.0000000000004⌉ stays 3.
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) x = r;
    return static_cast<std::int64_t>(std::max(1.0, std::ceil(x)));
}

void validate_caps(const LayerCaps& caps) {
    if (caps.layers() == 0) throw ShapeError("layer caps are empty");
    if (caps.n.size() != caps.m.size()) throw ShapeError("layer caps M/N length mismatch");
    for (std::size_t l = 0; l < caps.layers(); ++l)
        if (caps.m[l] < 1 || caps.n[l] < 1)
            throw InvalidInput("layer caps must be positive integers");
}

double cap_product(const LayerCaps& caps) {
    double p = 1.0;
    for (auto m : caps.m) p *= static_cast<double>(m);
    return p;
}

double cap_width_sum(const LayerCaps& caps) {
    double s = 0.0;
    for (auto n : caps.n) s += std::pow(static_cast<double>(n), 2.0 / 3.0);
    return std::pow(s, 1.5);
}

void validate_inputs(const BoundInputs& in) {
    validate_caps(in.caps);
    if (!(in.delta > 0.0 && in.delta < 1.0))
        throw ConfigError("confidence level must lie strictly between 0 and 1");
    if (in.d < 1 || in.h < 1) throw ConfigError("input dimension and width must be positive");
    if (in.depth != in.caps.layers())
        throw ShapeError("depth does not match the number of layer caps");
    if (!(in.k_bound > 0.0)) throw ConfigError("coefficient bound K must be positive");
}

double statistical_term(double delta_mn, std::size_t n) {
    return 2.0 * std::sqrt(std::log(2.0 / delta_mn) / (2.0 * static_cast<double>(n)));
}

} // namespace

LayerCaps layer_caps(const Mlp& net, bool include_bias) {
    LayerCaps caps;
    caps.include_bias = include_bias;
    for (std::size_t l = 0; l < net.depth(); ++l) {
        const linalg::Matrix a = include_bias ? augmented_layer(net, l) : net.weights[l];
        const double s = linalg::spectral_norm(a);
        const double t = linalg::norm_2_1(a);
        caps.spectral.push_back(s);
        caps.norm21.push_back(t);
        if (s == 0.0) {
            caps.m.push_back(1); // zero layer: smallest admissible caps
            caps.n.push_back(1);
        } else {
            caps.m.push_back(snapped_ceil(s));
            caps.n.push_back(snapped_ceil(t / s));
        }
    }
    return caps;
}

double delta_split(double delta, const LayerCaps& caps) {
    if (!(delta > 0.0 && delta < 1.0))
        throw ConfigError("confidence level must lie strictly between 0 and 1");
    validate_caps(caps);
    double denom = 1.0;
    for (std::size_t l = 0; l < caps.layers(); ++l) {
        const double m = static_cast<double>(caps.m[l]);
        const double n = static_cast<double>(caps.n[l]);
        denom *= m * (m + 1.0) * n * (n + 1.0);
    }
    return delta / denom;
}

BoundInputs bound_inputs(const Mlp& net, const PdeProblem& p, std::size_t n_b, std::size_t n_r,
                         double delta, bool include_bias) {
    BoundInputs in;
    in.caps = layer_caps(net, include_bias);
    in.n_b = n_b;
    in.n_r = n_r;
    in.d = net.input_dim();
    in.h = net.max_width();
    in.depth = net.depth();
    in.k_bound = p.k_bound;
    in.delta = delta;
    return in;
}

double boundary_bound(const BoundInputs& in) {
    validate_inputs(in);
    if (in.n_b < 2) throw ConfigError("boundary bound needs at least 2 boundary points");
    const double n = static_cast<double>(in.n_b);
    const double dmn = delta_split(in.delta, in.caps);
    const double pq = cap_product(in.caps) * cap_width_sum(in.caps);
    const double width_fac =
        std::sqrt(static_cast<double>(in.d) *
                  std::log(2.0 * static_cast<double>(in.h) * static_cast<double>(in.h)));
    return 32.0 / (n * std::sqrt(n)) +
           144.0 * width_fac * std::log(n) / std::sqrt(n) * pq + statistical_term(dmn, in.n_b);
}

double residual_bound(const BoundInputs& in) {
    validate_inputs(in);
    if (in.n_r < 2) throw ConfigError("residual bound needs at least 2 residual points");
    const double n = static_cast<double>(in.n_r);
    const double d = static_cast<double>(in.d);
    const double depth = static_cast<double>(in.depth);
    const double k = in.k_bound;
    const double dmn = delta_split(in.delta, in.caps);
    const double p = cap_product(in.caps);
    const double pq = p * cap_width_sum(in.caps);
    const double width_fac = std::sqrt(
        d * std::log(2.0 * static_cast<double>(in.h) * static_cast<double>(in.h)));
    const double sqrt2 = std::sqrt(2.0);
    const double operator_fac =
        1.0 + sqrt2 * depth * p + sqrt2 * d * (depth * depth - 1.0) * p * p;
    return (64.0 * k + 32.0 * d * (depth - 1.0) * k) / (n * std::sqrt(n)) +
           statistical_term(dmn, in.n_r) +
           144.0 * k * width_fac * std::log(n) / std::sqrt(n) * pq * operator_fac;
}

double l2_bound(double boundary, double residual, double c1) {
    if (!(c1 > 0.0)) throw ConfigError("the L2 bridge constant C1 must be positive");
    if (boundary < 0.0 || residual < 0.0)
        throw InvalidInput("bound values must be nonnegative");
    return std::sqrt(2.0) / c1 * std::sqrt(boundary + residual);
}

double xpinn_aggregate(const std::vector<double>& bound_values,
                       const std::vector<std::size_t>& weights) {
    if (bound_values.size() != weights.size())
        throw ShapeError("aggregate: one weight per bound required");
    if (bound_values.empty()) throw InvalidInput("aggregate: empty input");
    double wsum = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] == 0) throw InvalidInput("aggregate: weights must be positive");
        wsum += static_cast<double>(weights[i]);
        acc += static_cast<double>(weights[i]) * bound_values[i];
    }
    return acc / wsum;
}

Complexity complexity(const Mlp& net, bool include_bias) {
    const LayerCaps caps = layer_caps(net, include_bias);
    Complexity out;
    out.spectral_product = 1.0;
    for (double s : caps.spectral) out.spectral_product *= s;
    out.full_product = cap_product(caps) * cap_width_sum(caps);
    return out;
}

BoundReport bound_report(const Mlp& net, const PdeProblem& p, std::size_t n_b, std::size_t n_r,
                         double delta, double c1, bool include_bias, std::string model) {
    BoundReport rep;
    rep.model = std::move(model);
    rep.n_b = n_b;
    rep.n_r = n_r;
    rep.delta = delta;
    rep.c1 = c1;
    rep.out_of_assumption = p.out_of_assumption;
    BoundInputs in = bound_inputs(net, p, n_b, n_r, delta, include_bias);
    rep.caps = in.caps;
    rep.delta_mn = delta_split(delta, in.caps);
    rep.residual = residual_bound(in);
    if (n_b > 0) rep.boundary = boundary_bound(in);
    rep.l2 = l2_bound(rep.boundary.value_or(0.0), rep.residual, c1);
    rep.complexity = complexity(net, include_bias);
    return rep;
}

ComparisonReport compare_posterior(const BoundReport& pinn,
                                   const std::vector<BoundReport>& subs) {
    if (subs.empty()) throw InvalidInput("comparison needs at least one sub-net report");
    if (!pinn.boundary)
        throw InvalidInput("the single-net baseline must include a boundary bound");
    ComparisonReport rep;
    rep.pinn.model = pinn.model.empty() ? "PINN" : pinn.model;
    rep.pinn.boundary = *pinn.boundary;
    rep.pinn.residual = pinn.residual;
    rep.pinn.l2 = l2_bound(*pinn.boundary, pinn.residual, pinn.c1);
    rep.pinn.bound_pct = 100.0;
    rep.pinn.complexity_spectral = pinn.complexity.spectral_product;
    rep.pinn.complexity_pct = 100.0;
    rep.sub_reports = subs;

    std::vector<double> res_b, bnd_b;
    std::vector<std::size_t> res_w, bnd_w;
    for (const auto& s : subs) {
        res_b.push_back(s.residual);
        res_w.push_back(s.n_r);
        if (s.n_b > 0) { // a purely interior sub-net carries no boundary term
            if (!s.boundary)
                throw InvalidInput("sub-net report with boundary points lacks its bound");
            bnd_b.push_back(*s.boundary);
            bnd_w.push_back(s.n_b);
        }
        rep.sub_complexity_pct.push_back(
            100.0 * s.complexity.spectral_product / pinn.complexity.spectral_product);
    }
    if (bnd_b.empty()) throw InvalidInput("no sub-net carries boundary points");
    rep.xpinn.model = "XPINN";
    rep.xpinn.boundary = xpinn_aggregate(bnd_b, bnd_w);
    rep.xpinn.residual = xpinn_aggregate(res_b, res_w);
    rep.xpinn.l2 = l2_bound(rep.xpinn.boundary, rep.xpinn.residual, pinn.c1);
    rep.xpinn.bound_pct = 100.0 * rep.xpinn.l2 / rep.pinn.l2;
    double cmax = 0.0;
    for (const auto& s : subs) cmax = std::max(cmax, s.complexity.spectral_product);
    rep.xpinn.complexity_spectral = cmax; // headline row: the widest sub-net
    rep.xpinn.complexity_pct = 100.0 * cmax / pinn.complexity.spectral_product;

    const double diff = rep.xpinn.l2 - rep.pinn.l2;
    const double scale = std::max(rep.xpinn.l2, rep.pinn.l2);
    if (std::abs(diff) <= 1e-12 * scale)
        rep.verdict = "tie";
    else
        rep.verdict = diff < 0.0 ? "xpinn" : "pinn";
    return rep;
}

namespace {

bool term_active(const SinusoidTarget& t, std::size_t sub, std::size_t axis) {
    if (sub >= t.pinned.size()) throw DomainError("subdomain index out of range");
    const auto& pins = t.pinned[sub];
    if (axis >= pins.size()) return true; // unlisted axes vary
    return !pins[axis].has_value();
}

double pinned_value(const SinusoidTarget& t, std::size_t sub, std::size_t axis) {
    return *t.pinned[sub][axis];
}

double term_contribution(const SinusoidTarget& t, const SinusoidTarget::Term& term,
                         std::size_t sub) {
    if (term_active(t, sub, term.axis)) return std::abs(term.coeff);
    const double c = std::sin(pinned_value(t, sub, term.axis));
    if (std::abs(c) <= 1e-12) return 0.0;
    throw UnsupportedError("target term is constant at a nonzero value on a subdomain");
}

} // namespace

double barron_norm(const SinusoidTarget& target, std::size_t subdomain) {
    double total = 0.0;
    for (const auto& term : target.terms) {
        if (!std::isfinite(term.coeff)) throw InvalidInput("target coefficients must be finite");
        total += term_contribution(target, term, subdomain);
    }
    return total;
}

double barron_norm_whole(const SinusoidTarget& target) {
    double total = 0.0;
    for (const auto& term : target.terms) {
        if (!std::isfinite(term.coeff)) throw InvalidInput("target coefficients must be finite");
        bool active = false;
        for (std::size_t s = 0; s < target.pinned.size(); ++s)
            active = active || term_active(target, s, term.axis);
        if (active) {
            total += std::abs(term.coeff);
        } else {
            // constant on the whole domain: only a zero constant is representable
            for (std::size_t s = 0; s < target.pinned.size(); ++s)
                (void)term_contribution(target, term, s);
        }
    }
    return total;
}

PriorComparison prior_compare(const SinusoidTarget& target, std::size_t n_r,
                              const std::vector<std::size_t>& n_ri, bool asymptotic) {
    if (target.pinned.size() != n_ri.size())
        throw ShapeError("one residual count per subdomain required");
    if (n_r < 2) throw ConfigError("total residual count must be at least 2");
    std::size_t sum = 0;
    for (auto n : n_ri) {
        if (n < 2) throw ConfigError("per-subdomain residual counts must be at least 2");
        sum += n;
    }
    if (sum != n_r) throw ConfigError("per-subdomain residual counts must sum to the total");

    PriorComparison out;
    out.asymptotic = asymptotic;
    const double whole = barron_norm_whole(target);
    out.pinn_q = whole * whole * whole;
    const double n = static_cast<double>(n_r);
    for (std::size_t i = 0; i < n_ri.size(); ++i) {
        const double ni = static_cast<double>(n_ri[i]);
        const double w = asymptotic
                             ? std::sqrt(ni / n)
                             : (std::log(ni) * std::sqrt(ni)) / (std::log(n) * std::sqrt(n));
        const double b = barron_norm(target, i);
        out.xpinn_q += w * b * b * b;
    }
    const double diff = out.xpinn_q - out.pinn_q;
    const double scale = std::max(out.xpinn_q, out.pinn_q);
    if (std::abs(diff) <= 1e-12 * scale)
        out.verdict = "tie";
    else
        out.verdict = diff < 0.0 ? "xpinn" : "pinn";
    return out;
}

SinusoidTarget broken_line_target(double a, double b) {
    SinusoidTarget t;
    t.input_dim = 2;
    t.terms = {{a, 0}, {b, 1}};
    t.pinned = {{std::nullopt, 0.0}, {0.0, std::nullopt}};
    return t;
}

SinusoidTarget diagonal_target(double a, double b) {
    SinusoidTarget t;
    t.input_dim = 2;
    t.terms = {{a, 0}, {b, 1}};
    t.pinned = {{std::nullopt, 0.0}, {std::nullopt, std::nullopt}};
    return t;
}

double prior_crossover_q(double lo, double hi, double tol) {
    if (!(tol > 0.0) || !(lo < hi)) throw ConfigError("invalid bisection bracket");
    auto gap = [](double q) {
        const auto cmp = prior_compare(diagonal_target(2.0, q), 1000, {500, 500}, true);
        return cmp.xpinn_q - cmp.pinn_q; // positive while the single net wins
    };
    double glo = gap(lo), ghi = gap(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if ((glo > 0.0) == (ghi > 0.0)) throw DomainError("bisection bracket does not straddle the crossover");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double gm = gap(mid);
        if (gm == 0.0) return mid;
        if ((gm > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace xpinnlab::bounds
