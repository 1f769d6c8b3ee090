// Acceptance gate: ten end-to-end checks with pinned tolerances. Each prints
// one PASS/FAIL line; the process exits nonzero if any hard check fails.

#include "xpinnlab/autodiff.hpp"
#include "xpinnlab/batched.hpp"
#include "xpinnlab/bounds.hpp"
#include "xpinnlab/domain.hpp"
#include "xpinnlab/errors.hpp"
#include "xpinnlab/evalrep.hpp"
#include "xpinnlab/linalg.hpp"
#include "xpinnlab/losses.hpp"
#include "xpinnlab/network.hpp"
#include "xpinnlab/pde.hpp"
#include "xpinnlab/runner.hpp"
#include "xpinnlab/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using namespace xpinnlab;
using linalg::Matrix;
using linalg::Vector;

namespace {

struct Check {
    std::string label;
    std::function<std::string()> body; // returns detail text, throws on failure
};

struct Failure {
    std::string what;
    explicit Failure(std::string w) : what(std::move(w)) {}
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw Failure(msg);
}

void require_close(double got, double want, double rel, const std::string& what) {
    const double scale = std::max(1.0, std::abs(want));
    if (!(std::abs(got - want) <= rel * scale)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: got %.17g, want %.17g (rel tol %g)", what.c_str(),
                      got, want, rel);
        throw Failure(buf);
    }
}

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double rand_unit(std::uint64_t a, std::uint64_t b) { return u64_to_unit(mix_seed(a, b)); }

// ---- independent singular-value oracle: one-sided Jacobi ----------------
// Orthogonalizes the columns of A by plane rotations; the largest resulting
// column norm is the spectral norm. Shares nothing with the library path
// (power iteration).
double jacobi_spectral(const Matrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<std::vector<double>> u(n, std::vector<double>(m));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) u[j][i] = a(i, j);
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                double app = 0, aqq = 0, apq = 0;
                for (std::size_t i = 0; i < m; ++i) {
                    app += u[p][i] * u[p][i];
                    aqq += u[q][i] * u[q][i];
                    apq += u[p][i] * u[q][i];
                }
                off = std::max(off, std::abs(apq));
                if (std::abs(apq) <= 1e-15 * std::sqrt(app * aqq) || apq == 0.0) continue;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double up = u[p][i], uq = u[q][i];
                    u[p][i] = c * up - s * uq;
                    u[q][i] = s * up + c * uq;
                }
            }
        if (off == 0.0) break;
    }
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double nrm = 0.0;
        for (std::size_t i = 0; i < m; ++i) nrm += u[j][i] * u[j][i];
        best = std::max(best, std::sqrt(nrm));
    }
    return best;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

double trained_rel_l2(const PdeProblem& p, const domain::Decomposition& dec,
                      const train::TrainConfig& base, const std::vector<std::size_t>& dims,
                      std::uint64_t seed) {
    train::TrainConfig cfg = base;
    cfg.seed = seed;
    std::vector<Mlp> nets;
    for (std::size_t i = 0; i < dec.size(); ++i)
        nets.push_back(make_mlp(dims, ActivationKind::Tanh, mix_seed(seed, 500 + i)));
    const auto res = train::train(p, dec, nets, cfg);
    if (res.diverged) return std::numeric_limits<double>::infinity();
    return evalrep::relative_l2(p, dec, res.nets, {0, 0});
}

// ---- criterion bodies -----------------------------------------------------

std::string analytic_examples() {
    const auto broken = bounds::prior_compare(bounds::broken_line_target(2.0, 1.0), 1000,
                                              {500, 500}, true);
    require(std::abs(broken.pinn_q - 27.0) <= 1e-9, "broken-line single-net value drifted");
    require(std::abs(broken.xpinn_q - 9.0 / std::sqrt(2.0)) <= 1e-9,
            "broken-line decomposed value drifted");
    require(broken.verdict == "xpinn", "broken-line verdict should favor the decomposition");

    const auto diag = bounds::prior_compare(bounds::diagonal_target(2.0, 0.5), 1000, {500, 500},
                                            true);
    require(std::abs(diag.pinn_q - 15.625) <= 1e-9, "diagonal single-net value drifted");
    require(std::abs(diag.xpinn_q - 23.625 / std::sqrt(2.0)) <= 1e-9,
            "diagonal decomposed value drifted");
    require(diag.verdict == "pinn", "diagonal verdict should favor the single net");

    const double q = bounds::prior_crossover_q(0.0, 2.0, 1e-8);
    const double want = std::cbrt(8.0 / (std::sqrt(2.0) - 1.0)) - 2.0;
    require(std::abs(q - want) <= 1e-3, "crossover coefficient drifted");
    return fmt("27 vs %.6g, 15.625 vs %.6g, q*=%.6f", broken.xpinn_q, diag.xpinn_q, q);
}

std::string derivative_oracles() {
    double worst_g = 0.0, worst_h = 0.0, worst_jet = 0.0, worst_sym = 0.0;
    for (ActivationKind act : {ActivationKind::Tanh, ActivationKind::Sine}) {
        for (int k = 0; k < 100; ++k) {
            const std::uint64_t tag = (act == ActivationKind::Tanh ? 1000 : 3000) + k;
            const Mlp net = make_mlp({2, 8, 8, 1}, act, mix_seed(11, tag));
            Vector x{2.0 * rand_unit(21, tag) - 1.0, 2.0 * rand_unit(22, tag) - 1.0};
            const Vector g = input_gradient(net, x);
            const Matrix h = input_hessian(net, x);

            // central differences, scale-aware comparison
            const double step = 1e-5;
            for (std::size_t i = 0; i < 2; ++i) {
                Vector xp = x, xm = x;
                xp[i] += step;
                xm[i] -= step;
                const double fd = (forward(net, xp) - forward(net, xm)) / (2.0 * step);
                worst_g = std::max(worst_g, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
                const Vector gp = input_gradient(net, xp), gm = input_gradient(net, xm);
                for (std::size_t j = 0; j < 2; ++j) {
                    const double fdh = (gp[j] - gm[j]) / (2.0 * step);
                    worst_h = std::max(worst_h, std::abs(fdh - h(i, j)) /
                                                    std::max(1.0, std::abs(h(i, j))));
                }
            }
            worst_sym = std::max(worst_sym, std::abs(h(0, 1) - h(1, 0)) /
                                                std::max(1.0, std::abs(h(0, 1))));

            // axis jets recover g and the Hessian diagonal
            for (std::size_t i = 0; i < 2; ++i) {
                const auto jet = directional_jet(net, x, i, 2);
                worst_jet = std::max(worst_jet, std::abs(jet.d1 - g[i]) /
                                                    std::max(1.0, std::abs(g[i])));
                worst_jet = std::max(worst_jet, std::abs(jet.d2 - h(i, i)) /
                                                    std::max(1.0, std::abs(h(i, i))));
            }
            // the batched recurrences supply the mixed second derivative
            ad::EvalBackend bk;
            Matrix xs(2, 1);
            xs(0, 0) = x[0];
            xs(1, 0) = x[1];
            const auto o = ad::batch_eval(bk, ad::lift(bk, net), xs, ad::DerivPlan{2, {}});
            const double mixed = o.d2u.at({0, 1})(0, 0);
            worst_jet = std::max(worst_jet,
                                 std::abs(mixed - h(0, 1)) / std::max(1.0, std::abs(h(0, 1))));
        }
    }
    require(worst_g <= 1e-5, fmt("gradient vs finite differences: %.3g > 1e-5", worst_g));
    require(worst_h <= 1e-4, fmt("hessian vs finite differences: %.3g > 1e-4", worst_h));
    require(worst_jet <= 1e-10, fmt("jets vs gradient/hessian: %.3g > 1e-10", worst_jet));
    require(worst_sym <= 1e-12, fmt("hessian asymmetry: %.3g > 1e-12", worst_sym));
    return fmt("max rel err: grad %.2g, hess %.2g, jet %.2g, sym %.2g", worst_g, worst_h,
               worst_jet, worst_sym);
}

std::string parameter_gradients() {
    const PdeProblem p = make_heat();
    const auto dec = domain::builtin_decomposition("heat");
    domain::SampleCounts counts;
    counts.n_boundary = 16;
    counts.n_residual = 32;
    counts.n_interface = 12;
    const auto set = domain::sample(p, dec, counts, 5);
    losses::LossWeights w;
    w.residual = 1.0;
    w.boundary = 1.0;
    w.interface_u = 1.0;
    w.interface_res = 1.0;
    w.interface_grad = 1.0;
    double worst = 0.0;
    for (ActivationKind act : {ActivationKind::Tanh, ActivationKind::Sine}) {
        std::vector<Mlp> nets{make_mlp({2, 8, 8, 8, 1}, act, 17),
                              make_mlp({2, 8, 8, 8, 1}, act, 18)};
        for (std::size_t block = 0; block < dec.size(); ++block) {
            const auto loss = losses::make_block_loss(p, set, dec, w, block);
            worst = std::max(worst, ad::check_gradient(loss, nets));
        }
    }
    require(worst <= 1e-5, fmt("parameter gradient vs finite differences: %.3g > 1e-5", worst));
    return fmt("max rel err over every coordinate, both activations: %.2g", worst);
}

std::string norm_oracles() {
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t r = 1 + mix_seed(31, t) % 32;
        const std::size_t c = 1 + mix_seed(32, t) % 32;
        const double amp = (t % 3 == 0) ? 1e-3 : (t % 3 == 1 ? 1.0 : 50.0);
        Matrix a(r, c);
        for (std::size_t i = 0; i < a.size(); ++i)
            a.data()[i] = amp * (2.0 * rand_unit(33, 1000 * t + i) - 1.0);
        const double got = linalg::spectral_norm(a);
        const double want = jacobi_spectral(a);
        worst = std::max(worst, std::abs(got - want) / std::max(1.0, want));
        const double fro = linalg::frobenius_norm(a);
        const double n21 = linalg::norm_2_1(a);
        require(got <= fro + 1e-12 * std::max(1.0, fro), "spectral > frobenius");
        require(fro <= n21 + 1e-12 * std::max(1.0, n21), "frobenius > (2,1)-norm");
    }
    require(worst <= 1e-8, fmt("spectral norm vs plane-rotation oracle: %.3g > 1e-8", worst));
    // integer caps never drop below one, whatever the weights look like
    for (int t = 0; t < 50; ++t) {
        Mlp net = make_mlp({2, 6, 4, 1}, ActivationKind::Tanh, 900 + t);
        for (auto& wm : net.weights)
            for (std::size_t i = 0; i < wm.size(); ++i) wm.data()[i] *= rand_unit(34, t);
        const auto caps = bounds::layer_caps(net, t % 2 == 0);
        for (std::size_t l = 0; l < caps.layers(); ++l) {
            require(caps.m[l] >= 1, "cap M dropped below 1");
            require(caps.n[l] >= 1, "cap N dropped below 1");
        }
    }
    return fmt("1000 matrices up to 32x32, max rel err %.2g", worst);
}

std::string bound_regression() {
    bounds::BoundInputs in;
    in.caps.m = {1, 1};
    in.caps.n = {1, 1};
    in.n_b = 100;
    in.n_r = 100;
    in.d = 1;
    in.h = 2;
    in.depth = 2;
    in.k_bound = 1.0;
    in.delta = 0.1;
    require_close(bounds::boundary_bound(in), 270.8462816372515, 1e-9, "boundary bound");
    require_close(bounds::residual_bound(in), 2183.4546986007254, 1e-9, "residual bound");
    require_close(bounds::delta_split(in.delta, in.caps), 0.00625, 1e-12, "confidence split");

    // all-ones caps split exactly as delta / 4^depth
    for (std::size_t depth = 1; depth <= 6; ++depth) {
        bounds::LayerCaps ones;
        ones.m.assign(depth, 1);
        ones.n.assign(depth, 1);
        double denom = 1.0;
        for (std::size_t l = 0; l < depth; ++l) denom *= 4.0;
        require(bounds::delta_split(0.1, ones) == 0.1 / denom,
                "all-ones split is not exactly delta/4^depth");
    }

    const double bnd0 = bounds::boundary_bound(in);
    const double res0 = bounds::residual_bound(in);
    for (int t = 0; t < 100; ++t) {
        auto up = in;
        const std::uint64_t r = mix_seed(41, t);
        const std::size_t layer = r % 2;
        const std::int64_t bump = 1 + static_cast<std::int64_t>((r >> 8) % 4);
        if ((r >> 4) % 2 == 0)
            up.caps.m[layer] += bump;
        else
            up.caps.n[layer] += bump;
        require(bounds::boundary_bound(up) > bnd0, "boundary bound not monotone in the caps");
        require(bounds::residual_bound(up) > res0, "residual bound not monotone in the caps");
    }
    return "pinned instance to 1e-9; 100 cap bumps monotone; split = delta/4^L exact";
}

std::string comparison_semantics() {
    PdeProblem p;
    p.name = "traits";
    p.k_bound = 1.0;
    const Mlp net = make_mlp({2, 8, 8, 1}, ActivationKind::Tanh, 0);
    const auto base = bounds::bound_report(net, p, 200, 1000, 0.1, 1.0, true, "PINN");

    // identical nets, data split in two, half the confidence budget each
    const auto half = bounds::bound_report(net, p, 100, 500, 0.05, 1.0, true, "sub");
    const auto split = bounds::compare_posterior(base, {half, half});
    require(split.xpinn.bound_pct > 100.0,
            fmt("split of identical nets should exceed 100%%, got %.4f",
                split.xpinn.bound_pct));

    // degenerate single-subdomain case collapses to the baseline
    const auto same = bounds::compare_posterior(base, {base});
    require(fmt("%.2f", same.xpinn.bound_pct) == std::string("100.00"),
            fmt("degenerate comparison should print 100.00, got %.6f", same.xpinn.bound_pct));
    return fmt("identical-net split: %.2f%% > 100%%; degenerate: 100.00%%",
               split.xpinn.bound_pct);
}

std::string training_smoke() {
    // advection, single net 4x16
    const PdeProblem adv = make_advection();
    train::TrainConfig cfg;
    cfg.optimizer = train::Optimizer::Adam;
    cfg.lr = 1e-3;
    cfg.epochs = 2000;
    cfg.record_every = 500;
    cfg.counts.n_boundary = 200;
    cfg.counts.n_residual = 1000;
    cfg.seed = 0;
    std::vector<Mlp> nets{make_mlp({2, 16, 16, 16, 16, 1}, ActivationKind::Tanh,
                                   mix_seed(0, 500))};
    const auto id = domain::identity_decomposition();
    const auto res = train::train(adv, id, nets, cfg);
    require(!res.diverged, "advection run diverged");
    const double adv_rel = evalrep::relative_l2(adv, id, res.nets, {0, 0});
    require(res.final_loss.global.total <= 1e-2,
            fmt("advection train total %.3e > 1e-2", res.final_loss.global.total));
    require(adv_rel <= 0.5, fmt("advection rel L2 %.3e > 0.5", adv_rel));

    // poisson against the finite-difference reference, 6x20 quasi-newton
    const PdeProblem poi = run::make_problem("poisson", "");
    train::TrainConfig pcfg;
    pcfg.optimizer = train::Optimizer::Lbfgs;
    pcfg.lr = 1.0;
    pcfg.epochs = 3000;
    pcfg.record_every = 500;
    pcfg.counts.n_boundary = 80;
    pcfg.counts.n_residual = 400;
    pcfg.weights.boundary = 20.0;
    pcfg.seed = 0;
    std::vector<Mlp> pnets{make_mlp({2, 20, 20, 20, 20, 20, 20, 1}, ActivationKind::Tanh,
                                    mix_seed(0, 500))};
    const auto pres = train::train(poi, id, pnets, pcfg);
    require(!pres.diverged, "poisson run diverged");
    const double poi_rel = evalrep::relative_l2(poi, id, pres.nets, {0, 0});
    require(poi_rel <= 0.2, fmt("poisson rel L2 %.3e > 0.2", poi_rel));
    return fmt("advection: total %.3e, rel %.3e; poisson: rel %.3e",
               res.final_loss.global.total, adv_rel, poi_rel);
}

std::string directional_medians() {
    // Informative, not blocking: medians over seeds 0-4 at desk scale.
    const PdeProblem heat = make_heat();
    train::TrainConfig hc;
    hc.optimizer = train::Optimizer::Lbfgs;
    hc.lr = 1.0;
    hc.epochs = 400;
    hc.record_every = 100;
    hc.counts.n_boundary = 64;
    hc.counts.n_residual = 256;
    hc.weights.boundary = 20.0;
    hc.weights.interface_u = 20.0;
    hc.weights.interface_res = 1.0;
    std::vector<double> hp, hx;
    for (std::uint64_t s = 0; s < 5; ++s) {
        hp.push_back(trained_rel_l2(heat, domain::identity_decomposition(), hc, {2, 12, 12, 1}, s));
        hx.push_back(
            trained_rel_l2(heat, domain::builtin_decomposition("heat"), hc, {2, 12, 12, 1}, s));
    }

    const PdeProblem adv = make_advection();
    train::TrainConfig ac;
    ac.optimizer = train::Optimizer::Adam;
    ac.lr = 2e-3;
    ac.epochs = 1500;
    ac.record_every = 300;
    ac.counts.n_boundary = 128;
    ac.counts.n_residual = 512;
    std::vector<double> ap, ax;
    for (std::uint64_t s = 0; s < 5; ++s) {
        ap.push_back(trained_rel_l2(adv, domain::identity_decomposition(), ac, {2, 12, 12, 1}, s));
        ax.push_back(trained_rel_l2(adv, domain::builtin_decomposition("advection"), ac,
                                    {2, 12, 12, 1}, s));
    }
    const double hpm = median(hp), hxm = median(hx), apm = median(ap), axm = median(ax);
    const bool heat_dir = hpm < hxm; // smooth problem: single net expected ahead
    const bool adv_dir = axm < apm;  // transported front: decomposition expected ahead
    return fmt("informative — heat medians: single %.3e vs split %.3e (%s); "
               "advection: split %.3e vs single %.3e (%s)",
               hpm, hxm, heat_dir ? "expected direction" : "direction differs at this scale",
               axm, apm, adv_dir ? "expected direction" : "direction differs at this scale");
}

std::string determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "xpinnlab_acceptance_det";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfgp = dir / "run.toml";
    {
        std::ofstream out(cfgp);
        out << "schema = 1\nbenchmark = \"heat\"\nmodel = \"xpinn\"\nseeds = [0, 1]\n\n"
            << "[net]\nhidden = [8, 8]\nactivation = \"tanh\"\n\n"
            << "[train]\noptimizer = \"adam\"\nlr = 0.005\nepochs = 60\nrecord_every = 20\n\n"
            << "[points]\nboundary = 24\nresidual = 64\ninterface = 16\n\n"
            << "[weights]\nboundary = 20.0\ninterface_u = 20.0\n\n"
            << "[eval]\ngrid = [41, 41]\n";
    }
    auto hash_of = [&](const std::string& sub) {
        run::CliOverrides ov;
        ov.out = (dir / sub).string();
        require(run::cmd_train(cfgp.string(), ov) == 0, "training run failed");
        std::ifstream in(dir / sub / "summary.json");
        const auto j = nlohmann::json::parse(in);
        return j.at("artifact_hash").get<std::string>();
    };
    const std::string h1 = hash_of("a");
    const std::string h2 = hash_of("b");
    require(!h1.empty() && h1.rfind("fnv1a:", 0) == 0, "malformed artifact hash");
    require(h1 == h2, "repeated run hashed differently: " + h1 + " vs " + h2);
    // the checkpoints themselves are byte-identical too
    for (const char* name : {"net_seed0_part0.json", "net_seed1_part1.json"}) {
        std::ifstream a(dir / "a" / name), b(dir / "b" / name);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        require(!sa.str().empty() && sa.str() == sb.str(),
                std::string("checkpoint differs between runs: ") + name);
    }
    fs::remove_all(dir);
    return "artifact hash and checkpoints identical across repeated runs (" + h1 + ")";
}

std::string fd_reference_convergence() {
    const auto g1 = fd_poisson_reference(129);
    const auto g2 = fd_poisson_reference(257);
    const auto g3 = fd_poisson_reference(513);
    // common nodes: index i on the coarse grid is 2i / 4i on the finer ones
    double d12 = 0.0, d23 = 0.0;
    for (std::size_t i = 0; i < 129; ++i)
        for (std::size_t j = 0; j < 129; ++j) {
            const double a = g1.at(i, j), b = g2.at(2 * i, 2 * j), c = g3.at(4 * i, 4 * j);
            d12 += (a - b) * (a - b);
            d23 += (b - c) * (b - c);
        }
    const double ratio = std::sqrt(d12) / std::sqrt(d23);
    require(ratio >= 3.5 && ratio <= 4.5,
            fmt("level-difference ratio %.3f outside [3.5, 4.5]", ratio));

    // sign-definite interior: the solution of the positive-source problem
    // never crosses zero upward and dips strictly below it
    double mn = 0.0, mx = 0.0;
    for (double v : g3.values) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    require(mx <= 1e-12, fmt("interior sign violation: max %.3e > 0", mx));
    require(mn < -1e-3, fmt("interior plateau: min %.3e not clearly negative", mn));
    return fmt("ratio %.3f in [3.5, 4.5]; range [%.3e, %.3e]", ratio, mn, mx);
}

} // namespace

int main() {
    const std::vector<Check> checks = {
        {"analytic comparison quantities reproduce exactly", analytic_examples},
        {"input derivatives agree with finite differences and jets", derivative_oracles},
        {"parameter gradients agree with finite differences", parameter_gradients},
        {"spectral norms agree with an independent eigensolver", norm_oracles},
        {"bound calculator matches its pinned instance", bound_regression},
        {"posterior comparison semantics", comparison_semantics},
        {"trained accuracy on advection and poisson", training_smoke},
        {"directional medians across seeds 0-4", directional_medians},
        {"repeated runs hash identically", determinism},
        {"finite-difference reference converges at second order", fd_reference_convergence},
    };
    int failures = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = true;
        try {
            detail = checks[i].body();
        } catch (const Failure& f) {
            pass = false;
            detail = f.what;
        } catch (const std::exception& e) {
            pass = false;
            detail = std::string("unexpected error: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%2zu/10] %s  %s (%.1fs)\n        %s\n", i + 1, pass ? "PASS" : "FAIL",
                    checks[i].label.c_str(), secs, detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    if (failures == 0)
        std::printf("acceptance: all 10 criteria passed\n");
    else
        std::printf("acceptance: %d criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
