#include "xpinnlab/bounds.hpp"
#include "xpinnlab/errors.hpp"
#include "xpinnlab/network.hpp"
#include "xpinnlab/pde.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include <doctest.h>

using namespace xpinnlab;
using doctest::Approx;

namespace {

bounds::LayerCaps caps_of(std::vector<std::int64_t> m, std::vector<std::int64_t> n) {
    bounds::LayerCaps c;
    c.m = std::move(m);
    c.n = std::move(n);
    return c;
}

// The instance every constant below was worked out for by hand: two layers,
// all caps 1, d=1, h=2, K=1, 100 points of each kind, delta 0.1.
bounds::BoundInputs pinned_instance() {
    bounds::BoundInputs in;
    in.caps = caps_of({1, 1}, {1, 1});
    in.n_b = 100;
    in.n_r = 100;
    in.d = 1;
    in.h = 2;
    in.depth = 2;
    in.k_bound = 1.0;
    in.delta = 0.1;
    return in;
}

PdeProblem traits(double k, bool out_of_assumption) {
    PdeProblem p;
    p.name = "traits";
    p.k_bound = k;
    p.out_of_assumption = out_of_assumption;
    return p;
}

void zero_params(Mlp& net) {
    for (auto& w : net.weights)
        for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = 0.0;
    for (auto& b : net.biases)
        for (double& v : b) v = 0.0;
}

} // namespace

TEST_CASE("layer caps ceil the augmented norms and never drop below one") {
    // All-zero parameters: both caps clamp to 1 on every layer.
    Mlp zero = make_mlp({1, 3, 1}, ActivationKind::Tanh, 0);
    zero_params(zero);
    const auto zc = bounds::layer_caps(zero, true);
    REQUIRE(zc.layers() == 2);
    CHECK(zc.m == std::vector<std::int64_t>{1, 1});
    CHECK(zc.n == std::vector<std::int64_t>{1, 1});
    CHECK(zc.spectral[0] == 0.0);
    CHECK(zc.include_bias);

    // Hand-picked weights with known spectral and (2,1) norms.
    Mlp net = make_mlp({2, 3, 1}, ActivationKind::Tanh, 0);
    zero_params(net);
    net.weights[0](0, 0) = 2.0; // columns (2,0,0) and (0,2,0): spectral 2, ‖·‖₂,₁ = 4
    net.weights[0](1, 1) = 2.0;
    net.weights[1](0, 0) = 0.5; // single row: spectral 0.5, ‖·‖₂,₁ = 0.5
    for (bool bias : {true, false}) { // biases are zero, so augmenting changes nothing
        const auto c = bounds::layer_caps(net, bias);
        CHECK(c.m == std::vector<std::int64_t>{2, 1});
        CHECK(c.n == std::vector<std::int64_t>{2, 1});
        CHECK(c.spectral[0] == Approx(2.0).epsilon(1e-12));
        CHECK(c.spectral[1] == Approx(0.5).epsilon(1e-12));
        CHECK(c.norm21[0] == Approx(4.0).epsilon(1e-12));
        CHECK(c.include_bias == bias);
    }

    // A nonzero bias only enters the caps when include_bias is set:
    // [W|b] = [3 4] has spectral norm 5 and column norms 3+4=7.
    Mlp one = make_mlp({1, 1}, ActivationKind::Tanh, 0);
    one.weights[0](0, 0) = 3.0;
    one.biases[0] = {4.0};
    const auto with = bounds::layer_caps(one, true);
    const auto without = bounds::layer_caps(one, false);
    CHECK(with.m == std::vector<std::int64_t>{5});
    CHECK(with.n == std::vector<std::int64_t>{2}); // ceil(7/5)
    CHECK(without.m == std::vector<std::int64_t>{3});
    CHECK(without.n == std::vector<std::int64_t>{1});

    // Norms that land on an integer must not be bumped by rounding noise.
    Mlp snap = make_mlp({1, 1}, ActivationKind::Tanh, 0);
    snap.weights[0](0, 0) = 2.0;
    snap.biases[0] = {0.0};
    const auto sc = bounds::layer_caps(snap, true);
    CHECK(sc.m == std::vector<std::int64_t>{2});
    CHECK(sc.n == std::vector<std::int64_t>{1});
}

TEST_CASE("confidence split over the cap grid") {
    // delta / prod M(M+1)N(N+1), checked against hand-expanded products.
    CHECK(bounds::delta_split(0.1, caps_of({1, 1}, {1, 1})) == Approx(0.00625).epsilon(1e-15));
    CHECK(bounds::delta_split(0.1, caps_of({2}, {1})) == Approx(0.1 / 12.0).epsilon(1e-15));
    CHECK(bounds::delta_split(0.1, caps_of({1, 1, 1}, {1, 1, 1})) ==
          Approx(0.1 / 64.0).epsilon(1e-15)); // all caps one: delta / 4^depth
    CHECK(bounds::delta_split(0.1, caps_of({2, 3}, {1, 2})) ==
          Approx(0.1 / 864.0).epsilon(1e-15)); // (2·3·1·2)·(3·4·2·3)

    CHECK_THROWS_AS(bounds::delta_split(0.1, caps_of({}, {})), ShapeError);
    CHECK_THROWS_AS(bounds::delta_split(0.1, caps_of({1, 1}, {1})), ShapeError);
    CHECK_THROWS_AS(bounds::delta_split(0.1, caps_of({0}, {1})), InvalidInput);
    CHECK_THROWS_AS(bounds::delta_split(0.0, caps_of({1}, {1})), ConfigError);
    CHECK_THROWS_AS(bounds::delta_split(1.0, caps_of({1}, {1})), ConfigError);
}

TEST_CASE("the split budget telescopes to nearly the full confidence level") {
    // For one layer, sum over M,N in 1..50 of delta/(M(M+1)N(N+1)) is
    // delta·(50/51)² because 1/(k(k+1)) telescopes.
    const double delta = 0.1;
    double total = 0.0;
    for (std::int64_t m = 1; m <= 50; ++m)
        for (std::int64_t n = 1; n <= 50; ++n)
            total += bounds::delta_split(delta, caps_of({m}, {n}));
    const double want = delta * (50.0 / 51.0) * (50.0 / 51.0);
    CHECK(total == Approx(want).epsilon(1e-12));
    CHECK(total < delta); // a valid union budget never exceeds delta
}

TEST_CASE("pinned bound values on the hand-worked instance") {
    const auto in = pinned_instance();
    const double bnd = bounds::boundary_bound(in);
    const double res = bounds::residual_bound(in);
    CHECK(std::abs(bnd - 270.8462816372515) <= 1e-9 * 270.8462816372515);
    CHECK(std::abs(res - 2183.4546986007254) <= 1e-9 * 2183.4546986007254);

    // Sanity on the shared pieces: the boundary term is K-independent, the
    // residual term scales with K through every non-statistical piece.
    auto k2 = in;
    k2.k_bound = 2.0;
    CHECK(bounds::boundary_bound(k2) == bnd);
    CHECK(bounds::residual_bound(k2) > res);

    // More samples shrink both bounds (n ≥ 8 keeps log n/√n decreasing).
    auto more = in;
    more.n_b = 400;
    more.n_r = 400;
    CHECK(bounds::boundary_bound(more) < bnd);
    CHECK(bounds::residual_bound(more) < res);

    auto bad = in;
    bad.n_b = 1;
    CHECK_THROWS_AS(bounds::boundary_bound(bad), ConfigError);
    bad = in;
    bad.n_r = 1;
    CHECK_THROWS_AS(bounds::residual_bound(bad), ConfigError);
    bad = in;
    bad.d = 0;
    CHECK_THROWS_AS(bounds::boundary_bound(bad), ConfigError);
    bad = in;
    bad.depth = 3; // two caps but depth three
    CHECK_THROWS_AS(bounds::residual_bound(bad), ShapeError);
    bad = in;
    bad.k_bound = 0.0;
    CHECK_THROWS_AS(bounds::residual_bound(bad), ConfigError);
}

TEST_CASE("bumping any capacity cap strictly increases both bounds") {
    bounds::BoundInputs base;
    base.caps = caps_of({2, 3}, {1, 2});
    base.n_b = 500;
    base.n_r = 500;
    base.d = 2;
    base.h = 8;
    base.depth = 2;
    base.k_bound = 1.0;
    base.delta = 0.1;
    const double bnd0 = bounds::boundary_bound(base);
    const double res0 = bounds::residual_bound(base);
    for (int trial = 0; trial < 100; ++trial) {
        auto in = base;
        const std::uint64_t r = mix_seed(2026, static_cast<std::uint64_t>(trial));
        const std::size_t layer = r % 2;
        const std::int64_t bump = 1 + static_cast<std::int64_t>((r >> 8) % 5);
        if ((r >> 4) % 2 == 0)
            in.caps.m[layer] += bump;
        else
            in.caps.n[layer] += bump;
        CHECK(bounds::boundary_bound(in) > bnd0);
        CHECK(bounds::residual_bound(in) > res0);
    }
}

TEST_CASE("the L2 bridge and the count-weighted aggregate") {
    CHECK(bounds::l2_bound(3.0, 5.0, 2.0) == Approx(2.0).epsilon(1e-14));
    CHECK(bounds::l2_bound(0.0, 0.0, 1.0) == 0.0);
    CHECK_THROWS_AS(bounds::l2_bound(1.0, 1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(bounds::l2_bound(-1.0, 1.0, 1.0), InvalidInput);

    CHECK(bounds::xpinn_aggregate({2.0, 4.0}, {1, 3}) == Approx(3.5).epsilon(1e-15));
    CHECK(bounds::xpinn_aggregate({7.0}, {9}) == 7.0);
    CHECK_THROWS_AS(bounds::xpinn_aggregate({}, {}), InvalidInput);
    CHECK_THROWS_AS(bounds::xpinn_aggregate({1.0}, {1, 2}), ShapeError);
    CHECK_THROWS_AS(bounds::xpinn_aggregate({1.0, 2.0}, {1, 0}), InvalidInput);

    // Convexity: the aggregate stays inside [min, max] of its inputs.
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> vals;
        std::vector<std::size_t> wts;
        double lo = 1e300, hi = -1e300;
        for (int i = 0; i < 4; ++i) {
            const double v = 10.0 * u64_to_unit(mix_seed(77, 8 * trial + i));
            vals.push_back(v);
            wts.push_back(1 + mix_seed(78, 8 * trial + i) % 40);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double agg = bounds::xpinn_aggregate(vals, wts);
        CHECK(agg >= lo - 1e-12);
        CHECK(agg <= hi + 1e-12);
    }
}

TEST_CASE("complexity products follow the capped norms") {
    Mlp net = make_mlp({2, 3, 1}, ActivationKind::Tanh, 0);
    zero_params(net);
    net.weights[0](0, 0) = 2.0;
    net.weights[0](1, 1) = 2.0;
    net.weights[1](0, 0) = 0.5;
    const auto cx = bounds::complexity(net, true);
    CHECK(cx.spectral_product == Approx(1.0).epsilon(1e-12)); // 2 · 0.5
    // caps M={2,1}, N={2,1}: product 2, width sum (2^(2/3)+1)^(3/2)
    const double q = std::pow(std::cbrt(4.0) + 1.0, 1.5);
    CHECK(cx.full_product == Approx(2.0 * q).epsilon(1e-12));
}

TEST_CASE("report assembly derives every field from the network and instance") {
    const PdeProblem p = traits(2.5, false);
    Mlp net = make_mlp({2, 5, 3, 1}, ActivationKind::Tanh, 3);
    const auto in = bounds::bound_inputs(net, p, 100, 400, 0.1, true);
    CHECK(in.d == 2);
    CHECK(in.h == 5);
    CHECK(in.depth == 3);
    CHECK(in.caps.layers() == 3);
    CHECK(in.k_bound == 2.5);

    const auto rep = bounds::bound_report(net, p, 100, 400, 0.1, 2.0, true, "PINN");
    CHECK(rep.model == "PINN");
    CHECK(rep.n_b == 100);
    CHECK(rep.n_r == 400);
    CHECK(rep.delta == 0.1);
    CHECK(rep.c1 == 2.0);
    CHECK_FALSE(rep.out_of_assumption);
    CHECK(rep.caps.m == in.caps.m);
    CHECK(rep.caps.n == in.caps.n);
    CHECK(rep.delta_mn == bounds::delta_split(0.1, in.caps));
    REQUIRE(rep.boundary.has_value());
    CHECK(*rep.boundary == bounds::boundary_bound(in));
    CHECK(rep.residual == bounds::residual_bound(in));
    CHECK(rep.l2 == bounds::l2_bound(*rep.boundary, rep.residual, 2.0));

    // Purely interior nets carry no boundary bound; the bridge then uses 0.
    const auto interior = bounds::bound_report(net, p, 0, 400, 0.1, 2.0, true, "sub");
    CHECK_FALSE(interior.boundary.has_value());
    CHECK(interior.l2 == bounds::l2_bound(0.0, interior.residual, 2.0));

    const auto off = bounds::bound_report(net, traits(1.0, true), 10, 10, 0.1, 1.0, true, "x");
    CHECK(off.out_of_assumption);

    // A large bias inflates the caps only when it is included.
    net.biases[0][0] = 50.0;
    const auto cb = bounds::layer_caps(net, true);
    const auto cn = bounds::layer_caps(net, false);
    CHECK(cb.m[0] > cn.m[0]);
}

TEST_CASE("posterior comparison normalizes sub-net bounds against the single net") {
    const PdeProblem p = traits(1.0, false);
    const Mlp net = make_mlp({2, 6, 6, 1}, ActivationKind::Tanh, 11);
    const auto base = bounds::bound_report(net, p, 100, 1000, 0.1, 1.0, true, "PINN");

    // One sub-net with the same instance is the identity comparison.
    const auto same = bounds::compare_posterior(base, {base});
    CHECK(same.pinn.bound_pct == 100.0);
    CHECK(same.xpinn.bound_pct == Approx(100.0).epsilon(1e-12));
    CHECK(same.verdict == "tie");
    CHECK(same.xpinn.complexity_pct == Approx(100.0).epsilon(1e-12));
    REQUIRE(same.sub_complexity_pct.size() == 1);
    CHECK(same.sub_complexity_pct[0] == Approx(100.0).epsilon(1e-12));

    // Splitting the same net in two (half the points, half the confidence
    // budget each) can only make the bound larger.
    const auto half = bounds::bound_report(net, p, 50, 500, 0.05, 1.0, true, "sub");
    const auto split = bounds::compare_posterior(base, {half, half});
    CHECK(split.xpinn.bound_pct > 100.0);
    CHECK(split.verdict == "pinn");
    CHECK(split.xpinn.boundary == Approx(*half.boundary).epsilon(1e-15));
    CHECK(split.xpinn.residual == Approx(half.residual).epsilon(1e-15));
    CHECK(split.xpinn.l2 ==
          Approx(bounds::l2_bound(*half.boundary, half.residual, 1.0)).epsilon(1e-14));

    // Small sub-nets against an inflated baseline flip the verdict.
    Mlp big = make_mlp({2, 6, 6, 1}, ActivationKind::Tanh, 11);
    for (auto& w : big.weights)
        for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] *= 40.0;
    const auto fat = bounds::bound_report(big, p, 100, 1000, 0.1, 1.0, true, "PINN");
    Mlp small = make_mlp({2, 6, 6, 1}, ActivationKind::Tanh, 12);
    const auto lean = bounds::bound_report(small, p, 50, 500, 0.05, 1.0, true, "sub");
    const auto flip = bounds::compare_posterior(fat, {lean, lean});
    CHECK(flip.verdict == "xpinn");
    CHECK(flip.xpinn.bound_pct < 100.0);
    CHECK(flip.sub_complexity_pct[0] < 100.0);

    // Interior sub-nets skip the boundary aggregate but keep their residual
    // weight; someone has to carry boundary points.
    const auto inner = bounds::bound_report(net, p, 0, 500, 0.05, 1.0, true, "sub");
    const auto mixed = bounds::compare_posterior(base, {half, inner});
    CHECK(mixed.xpinn.boundary == Approx(*half.boundary).epsilon(1e-15));
    CHECK(mixed.xpinn.residual ==
          Approx(0.5 * half.residual + 0.5 * inner.residual).epsilon(1e-14));
    CHECK_THROWS_AS(bounds::compare_posterior(base, {inner, inner}), InvalidInput);
    CHECK_THROWS_AS(bounds::compare_posterior(base, {}), InvalidInput);
    CHECK_THROWS_AS(bounds::compare_posterior(inner, {half}), InvalidInput);
}

TEST_CASE("prior comparison reproduces the worked examples") {
    // Two axis segments: 2·sin x on one, 1·sin y on the other.
    const auto broken = bounds::broken_line_target(2.0, 1.0);
    CHECK(bounds::barron_norm(broken, 0) == 2.0);
    CHECK(bounds::barron_norm(broken, 1) == 1.0);
    CHECK(bounds::barron_norm_whole(broken) == 3.0);
    const auto cb = bounds::prior_compare(broken, 1000, {500, 500}, true);
    CHECK(cb.pinn_q == Approx(27.0).epsilon(1e-14));
    CHECK(cb.xpinn_q == Approx(6.363961030678928).epsilon(1e-12));
    CHECK(cb.verdict == "xpinn");
    CHECK(cb.asymptotic);

    // Axis segment joined to a diagonal where both coordinates vary.
    const auto diag = bounds::diagonal_target(2.0, 0.5);
    CHECK(bounds::barron_norm(diag, 0) == 2.0);
    CHECK(bounds::barron_norm(diag, 1) == 2.5);
    CHECK(bounds::barron_norm_whole(diag) == 2.5);
    const auto cd = bounds::prior_compare(diag, 1000, {500, 500}, true);
    CHECK(cd.pinn_q == Approx(15.625).epsilon(1e-14));
    CHECK(cd.xpinn_q == Approx(16.705397705532185).epsilon(1e-12));
    CHECK(cd.verdict == "pinn");

    // Finite-sample weights keep the log ratio.
    const auto cf = bounds::prior_compare(broken, 1000, {500, 500}, false);
    const double w =
        std::log(500.0) * std::sqrt(500.0) / (std::log(1000.0) * std::sqrt(1000.0));
    CHECK(cf.xpinn_q == Approx(w * 9.0).epsilon(1e-14));
    CHECK_FALSE(cf.asymptotic);

    // Uneven point budgets re-weight the subdomains.
    const auto cu = bounds::prior_compare(broken, 1000, {800, 200}, true);
    CHECK(cu.xpinn_q ==
          Approx(std::sqrt(0.8) * 8.0 + std::sqrt(0.2) * 1.0).epsilon(1e-14));

    // A single subdomain covering everything is an exact tie.
    bounds::SinusoidTarget whole;
    whole.input_dim = 2;
    whole.terms = {{2.0, 0}, {1.0, 1}};
    whole.pinned = {{std::nullopt, std::nullopt}};
    CHECK(bounds::prior_compare(whole, 1000, {1000}, true).verdict == "tie");

    CHECK_THROWS_AS(bounds::prior_compare(broken, 1000, {1000}, true), ShapeError);
    CHECK_THROWS_AS(bounds::prior_compare(broken, 1000, {999, 1}, true), ConfigError);
    CHECK_THROWS_AS(bounds::prior_compare(broken, 900, {500, 500}, true), ConfigError);
}

TEST_CASE("terms pinned at a nonzero value are rejected, pinned at zero vanish") {
    auto t = bounds::broken_line_target(2.0, 1.0);
    t.pinned[0][1] = 0.5; // sin is nonzero there: not representable
    CHECK_THROWS_AS(bounds::barron_norm(t, 0), UnsupportedError);
    CHECK_THROWS_AS(bounds::prior_compare(t, 1000, {500, 500}, true), UnsupportedError);
    CHECK(bounds::barron_norm(t, 1) == 1.0); // the other subdomain is fine
    CHECK_THROWS_AS(bounds::barron_norm(t, 7), DomainError);

    bounds::SinusoidTarget flat;
    flat.input_dim = 1;
    flat.terms = {{1.0, 0}};
    flat.pinned = {{0.0}}; // sin(0) = 0 everywhere: contributes nothing
    CHECK(bounds::barron_norm(flat, 0) == 0.0);
    CHECK(bounds::barron_norm_whole(flat) == 0.0);
    flat.pinned = {{0.5}};
    CHECK_THROWS_AS(bounds::barron_norm_whole(flat), UnsupportedError);
}

TEST_CASE("crossover coefficient for the diagonal family") {
    const double q = bounds::prior_crossover_q(0.0, 2.0, 1e-8);
    CHECK(std::abs(q - 0.6830075252611549) <= 1e-6);
    // The verdict flips across it.
    CHECK(bounds::prior_compare(bounds::diagonal_target(2.0, q - 1e-3), 1000, {500, 500}, true)
              .verdict == "pinn");
    CHECK(bounds::prior_compare(bounds::diagonal_target(2.0, q + 1e-3), 1000, {500, 500}, true)
              .verdict == "xpinn");
    CHECK_THROWS_AS(bounds::prior_crossover_q(1.0, 2.0, 1e-8), DomainError);
    CHECK_THROWS_AS(bounds::prior_crossover_q(2.0, 1.0, 1e-8), ConfigError);
    CHECK_THROWS_AS(bounds::prior_crossover_q(0.0, 2.0, 0.0), ConfigError);
}
