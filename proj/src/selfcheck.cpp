#include "xpinnlab/selfcheck.hpp"

#include "xpinnlab/autodiff.hpp"
#include "xpinnlab/bounds.hpp"
#include "xpinnlab/config.hpp"
#include "xpinnlab/errors.hpp"
#include "xpinnlab/evalrep.hpp"
#include "xpinnlab/network.hpp"
#include "xpinnlab/pde.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace xpinnlab::selfcheck {

namespace {

using linalg::Matrix;
using linalg::Vector;

struct Failure {
    std::string what;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure{what};
}

void require_close(double got, double want, double tol, const std::string& what) {
    const double err = std::abs(got - want) / std::max(1.0, std::abs(want));
    if (!(err <= tol))
        throw Failure{what + ": got " + std::to_string(got) + ", want " + std::to_string(want)};
}

double fd1(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

double fd2(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

void check_activations() {
    const double z = 0.7;
    require_close(activation_eval(ActivationKind::Sine, 0, z), std::sin(z), 1e-14, "sin value");
    require_close(activation_eval(ActivationKind::Sine, 1, z), std::cos(z), 1e-14, "sin'");
    require_close(activation_eval(ActivationKind::Sine, 2, z), -std::sin(z), 1e-14, "sin''");
    require_close(activation_eval(ActivationKind::Sine, 3, z), -std::cos(z), 1e-14, "sin'''");
    require_close(activation_eval(ActivationKind::Sine, 4, z), std::sin(z), 1e-14, "sin''''");
    for (int k = 1; k <= 2; ++k) {
        auto f = [&](double t) { return activation_eval(ActivationKind::Tanh, k - 1, t); };
        const double fd = fd1(f, z, 1e-6);
        require_close(activation_eval(ActivationKind::Tanh, k, z), fd, 1e-8,
                      "tanh derivative order " + std::to_string(k));
    }
}

Mlp demo_net(ActivationKind act, std::uint64_t seed) {
    return make_mlp({2, 8, 8, 1}, act, seed);
}

void check_network_derivatives() {
    for (auto act : {ActivationKind::Tanh, ActivationKind::Sine}) {
        const Mlp net = demo_net(act, 11);
        const Vector x{0.31, -0.45};
        const Vector g = input_gradient(net, x);
        const Matrix hess = input_hessian(net, x);
        for (std::size_t a = 0; a < 2; ++a) {
            auto f = [&](double t) {
                Vector y = x;
                y[a] = t;
                return forward(net, y);
            };
            require_close(g[a], fd1(f, x[a], 1e-5), 1e-6, "gradient axis " + std::to_string(a));
            require_close(hess(a, a), fd2(f, x[a], 1e-4), 1e-5,
                          "hessian diag axis " + std::to_string(a));
        }
        require(std::abs(hess(0, 1) - hess(1, 0)) <= 1e-12, "hessian symmetry");
        for (std::size_t a = 0; a < 2; ++a) {
            const Jet3 jet = directional_jet(net, x, a, 3);
            require_close(jet.v, forward(net, x), 1e-13, "jet value");
            require_close(jet.d1, g[a], 1e-11, "jet first derivative");
            require_close(jet.d2, hess(a, a), 1e-10, "jet second derivative");
            auto d2 = [&](double t) {
                Vector y = x;
                y[a] = t;
                return input_hessian(net, y)(a, a);
            };
            require_close(jet.d3, fd1(d2, x[a], 1e-5), 1e-5, "jet third derivative");
        }
    }
}

void check_parameter_gradient() {
    for (auto act : {ActivationKind::Tanh, ActivationKind::Sine}) {
        std::vector<Mlp> nets{make_mlp({1, 6, 1}, act, 3)};
        Matrix xs(1, 4);
        xs(0, 0) = -0.8;
        xs(0, 1) = -0.1;
        xs(0, 2) = 0.4;
        xs(0, 3) = 0.9;
        auto loss = ad::make_loss([xs](auto& bk, auto& nets_) {
            auto out = ad::batch_eval(bk, nets_[0], xs, ad::DerivPlan{1, {}});
            auto sq = bk.hadamard(out.u, out.u);
            auto gq = bk.hadamard(out.du[0], out.du[0]);
            return bk.scale(bk.sum(bk.add(sq, gq)), 0.25);
        });
        const double worst = ad::check_gradient(loss, nets, 1e-6);
        require(worst <= 1e-6, "parameter gradient FD mismatch " + std::to_string(worst));
    }
}

void check_spectral_norm() {
    Matrix a(2, 2);
    a(0, 0) = 1;
    a(0, 1) = 2;
    a(1, 0) = 3;
    a(1, 1) = 4;
    require_close(linalg::spectral_norm(a), std::sqrt(15.0 + std::sqrt(221.0)), 1e-10,
                  "2x2 spectral norm");
    std::uint64_t state = 99;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t r = 1 + mix_seed(state, 1) % 6, c = 1 + mix_seed(state, 2) % 6;
        Matrix m(r, c);
        for (std::size_t i = 0; i < m.size(); ++i)
            m.data()[i] = 2.0 * u64_to_unit(mix_seed(state, 3 + i)) - 1.0;
        ++state;
        const double s = linalg::spectral_norm(m);
        require(s <= linalg::frobenius_norm(m) + 1e-12, "spectral <= frobenius");
        require(linalg::norm_2_1(m) >= s - 1e-12, "(2,1) norm >= spectral");
        Vector x(c);
        for (std::size_t i = 0; i < c; ++i) x[i] = u64_to_unit(mix_seed(state, 77 + i)) - 0.5;
        double nx = 0, ny = 0;
        Vector y(r, 0.0);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) y[i] += m(i, j) * x[j];
        for (double v : x) nx += v * v;
        for (double v : y) ny += v * v;
        require(std::sqrt(ny) <= s * std::sqrt(nx) + 1e-10, "operator norm inequality");
    }
}

void check_bound_constants() {
    bounds::LayerCaps caps;
    caps.m = {1, 1};
    caps.n = {1, 1};
    caps.spectral = {1.0, 1.0};
    caps.norm21 = {1.0, 1.0};
    bounds::BoundInputs in;
    in.caps = caps;
    in.n_b = 100;
    in.n_r = 100;
    in.d = 1;
    in.h = 2;
    in.depth = 2;
    in.k_bound = 1.0;
    in.delta = 0.1;
    require_close(bounds::delta_split(0.1, caps), 0.00625, 1e-12, "confidence split");
    require_close(bounds::boundary_bound(in), 270.8462816372515, 1e-9, "boundary bound");
    require_close(bounds::residual_bound(in), 2183.4546986007254, 1e-9, "residual bound");
    bounds::LayerCaps one;
    one.m = {2};
    one.n = {1};
    one.spectral = {2.0};
    one.norm21 = {2.0};
    require_close(bounds::delta_split(0.1, one), 0.1 / 12.0, 1e-12, "one-layer split");
}

void check_prior_examples() {
    const std::vector<std::size_t> halves{500, 500};
    const auto a = bounds::prior_compare(bounds::broken_line_target(2.0, 1.0), 1000, halves, true);
    require_close(a.pinn_q, 27.0, 1e-12, "two-segment single-net norm");
    require_close(a.xpinn_q, 9.0 / std::sqrt(2.0), 1e-12, "two-segment decomposed norm");
    require(a.verdict == "xpinn", "two-segment verdict");
    const auto b = bounds::prior_compare(bounds::diagonal_target(2.0, 0.5), 1000, halves, true);
    require_close(b.pinn_q, 15.625, 1e-12, "diagonal single-net norm");
    require_close(b.xpinn_q, (8.0 + 15.625) / std::sqrt(2.0), 1e-12, "diagonal decomposed norm");
    require(b.verdict == "pinn", "diagonal verdict");
    const double qs = bounds::prior_crossover_q(0.0, 2.0, 1e-8);
    require_close(qs, 0.6830075252611549, 1e-6, "crossover coefficient");
}

void check_reference_grid() {
    ReferenceGrid g;
    g.axis0_name = "x";
    g.axis1_name = "t";
    g.axis0 = {-1.0, 0.0, 1.0};
    g.axis1 = {0.0, 0.5};
    g.values = {0.125, -3.75, 2.0, 0.0078125, 19.5, -0.333333333333333315};
    const auto path =
        (std::filesystem::temp_directory_path() / "xpinnlab_selfcheck_grid.json").string();
    save_reference_grid(g, path);
    const ReferenceGrid back = load_reference_grid(path);
    std::filesystem::remove(path);
    require(back.axis0 == g.axis0 && back.axis1 == g.axis1, "grid axes round trip");
    require(back.values == g.values, "grid values round trip");
    require_close(back.interpolate(0.5, 0.25), g.interpolate(0.5, 0.25), 1e-15,
                  "grid interpolation");
}

void check_config_parsing() {
    const char* text = R"(schema = 1
benchmark = "heat"
model = "xpinn"

[net]
hidden = [4, 4]
activation = "sine"

[train]
optimizer = "adam"
epochs = 10
lr = 0.05
)";
    const auto doc = toml::parse_string(text, "inline");
    const auto cfg = config::run_config_from_document(doc);
    require(cfg.benchmark == "heat" && cfg.model == "xpinn", "config fields");
    require(cfg.net.hidden == std::vector<std::size_t>{4, 4}, "config hidden sizes");
    require(cfg.net.activation == ActivationKind::Sine, "config activation");
    require(cfg.train.epochs == 10 && cfg.train.lr == 0.05, "config training block");
}

void check_formatting() {
    require(evalrep::format_sci(0.0017784) == "1.778e-3", "scientific formatting");
    require(evalrep::format_sci(0.0) == "0", "zero formatting");
    const auto st = evalrep::seed_stats({1.0, 3.0});
    require_close(st.mean, 2.0, 1e-15, "seed mean");
    require_close(st.stddev, 1.0, 1e-15, "seed std");
}

void check_heat_exact() {
    const PdeProblem p = make_heat();
    require(static_cast<bool>(p.exact), "heat has a closed-form solution");
    require_close(p.exact(Vector{0.0, 0.0}), 1.6054946916666204, 1e-12, "heat value at origin");
}

} // namespace

int run_all() {
    struct Entry {
        const char* name;
        void (*fn)();
    };
    const Entry entries[] = {
        {"activation derivatives", check_activations},
        {"network input derivatives vs finite differences", check_network_derivatives},
        {"parameter gradients vs finite differences", check_parameter_gradient},
        {"spectral norm identities", check_spectral_norm},
        {"generalization bound reference values", check_bound_constants},
        {"prior comparison closed forms", check_prior_examples},
        {"reference grid round trip", check_reference_grid},
        {"config parsing", check_config_parsing},
        {"formatting and statistics", check_formatting},
        {"heat benchmark exact solution", check_heat_exact},
    };
    int failures = 0;
    for (const auto& e : entries) {
        try {
            e.fn();
            std::printf("ok   %s\n", e.name);
        } catch (const Failure& f) {
            std::printf("FAIL %s: %s\n", e.name, f.what.c_str());
            ++failures;
        } catch (const std::exception& ex) {
            std::printf("FAIL %s: %s\n", e.name, ex.what());
            ++failures;
        }
    }
    if (failures) {
        std::printf("%d check(s) failed\n", failures);
        return 3;
    }
    std::printf("all %zu checks passed\n", std::size(entries));
    return 0;
}

} // namespace xpinnlab::selfcheck
