#include "xpinnlab/trainer.hpp"

#include "xpinnlab/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace xpinnlab::train {

Optimizer optimizer_from_name(const std::string& name) {
    if (name == "adam") return Optimizer::Adam;
    if (name == "lbfgs") return Optimizer::Lbfgs;
    throw ConfigError("unknown optimizer '" + name + "' (expected adam or lbfgs)");
}

std::string optimizer_name(Optimizer opt) {
    return opt == Optimizer::Adam ? "adam" : "lbfgs";
}

void adam_step(AdamState& st, linalg::Vector& x, const linalg::Vector& g, double lr) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    if (x.size() != g.size()) throw ShapeError("adam: parameter/gradient size mismatch");
    if (st.m.empty()) {
        st.m.assign(x.size(), 0.0);
        st.v.assign(x.size(), 0.0);
    }
    if (st.m.size() != x.size()) throw ShapeError("adam: state does not match the parameters");
    for (double gi : g)
        if (!std::isfinite(gi)) throw NumericError("adam: non-finite gradient entry");
    st.t += 1;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(st.t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(st.t));
    for (std::size_t i = 0; i < x.size(); ++i) {
        st.m[i] = beta1 * st.m[i] + (1.0 - beta1) * g[i];
        st.v[i] = beta2 * st.v[i] + (1.0 - beta2) * g[i] * g[i];
        const double mhat = st.m[i] / c1;
        const double vhat = st.v[i] / c2;
        x[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

namespace {

double dot(const linalg::Vector& a, const linalg::Vector& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(const linalg::Vector& a) { return std::sqrt(dot(a, a)); }

/// Two-loop recursion: d = −H·g with H built from the stored pairs.
linalg::Vector lbfgs_direction(const LbfgsState& st, const linalg::Vector& g) {
    linalg::Vector q = g;
    std::vector<double> alpha(st.pairs.size(), 0.0);
    for (std::size_t idx = st.pairs.size(); idx-- > 0;) {
        const auto& p = st.pairs[idx];
        alpha[idx] = p.rho * dot(p.s, q);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[idx] * p.y[i];
    }
    double gamma = 1.0;
    if (!st.pairs.empty()) {
        const auto& last = st.pairs.back();
        gamma = dot(last.s, last.y) / dot(last.y, last.y);
    }
    for (auto& qi : q) qi *= gamma;
    for (std::size_t idx = 0; idx < st.pairs.size(); ++idx) {
        const auto& p = st.pairs[idx];
        const double beta = p.rho * dot(p.y, q);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[idx] - beta) * p.s[i];
    }
    for (auto& qi : q) qi = -qi;
    return q;
}

} // namespace

LbfgsOutcome lbfgs_step(LbfgsState& st, linalg::Vector& x, const LbfgsObjective& obj, double lr) {
    if (lr <= 0.0) throw ConfigError("lbfgs: learning rate must be positive");
    constexpr double armijo_c = 1e-4;
    constexpr std::size_t max_trials = 30;
    constexpr double curvature_floor = 1e-10;

    auto [f0, g0] = obj.value_grad(x);
    if (!std::isfinite(f0)) throw NumericError("lbfgs: non-finite objective value");
    for (double gi : g0)
        if (!std::isfinite(gi)) throw NumericError("lbfgs: non-finite gradient entry");

    // Complete the pair deferred from the previous step.
    if (st.prev_x && st.prev_g) {
        linalg::Vector s(x.size()), y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            s[i] = x[i] - (*st.prev_x)[i];
            y[i] = g0[i] - (*st.prev_g)[i];
        }
        const double sy = dot(s, y);
        if (sy > curvature_floor) {
            st.pairs.push_back({std::move(s), std::move(y), 1.0 / sy});
            while (st.pairs.size() > st.memory) st.pairs.pop_front();
        }
    }

    LbfgsOutcome out;
    out.f0 = f0;
    const linalg::Vector d = lbfgs_direction(st, g0);
    const double dg = dot(g0, d);
    bool accepted = false;
    double t = lr;
    if (dg < 0.0) {
        for (std::size_t trial = 0; trial < max_trials; ++trial) {
            ++out.trials;
            linalg::Vector xt = x;
            for (std::size_t i = 0; i < x.size(); ++i) xt[i] += t * d[i];
            const double ft = obj.value(xt);
            if (std::isfinite(ft) && ft <= f0 + armijo_c * t * dg) {
                st.prev_x = x;
                st.prev_g = g0;
                x = std::move(xt);
                out.step = t;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
    }
    if (!accepted) {
        const double scale = lr / (1.0 + norm2(g0));
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= scale * g0[i];
        st.pairs.clear();
        st.prev_x.reset();
        st.prev_g.reset();
        out.fallback = true;
    }
    return out;
}

namespace {

void add_warning(std::vector<std::string>& warnings, std::size_t& suppressed,
                 const std::string& msg) {
    if (warnings.size() < 5)
        warnings.push_back(msg);
    else
        ++suppressed;
}

} // namespace

TrainResult train(const PdeProblem& p, const domain::Decomposition& dec, std::vector<Mlp> nets,
                  const TrainConfig& cfg) {
    if (cfg.epochs < 1) throw ConfigError("train: epochs must be at least 1");
    if (cfg.lr <= 0.0) throw ConfigError("train: learning rate must be positive");
    if (cfg.record_every < 1) throw ConfigError("train: record_every must be at least 1");
    if (nets.size() != dec.size()) throw ShapeError("train: one network per subdomain required");
    for (const auto& net : nets)
        if (net.input_dim() != p.box.dim())
            throw ShapeError("train: network input dimension does not match the problem");

    const auto t_start = std::chrono::steady_clock::now();
    TrainResult res;
    res.set = domain::sample(p, dec, cfg.counts, cfg.seed);
    const std::size_t nblocks = dec.size();

    std::vector<ad::LossFn> block_loss;
    block_loss.reserve(nblocks);
    for (std::size_t i = 0; i < nblocks; ++i)
        block_loss.push_back(losses::make_block_loss(p, res.set, dec, cfg.weights, i));

    if (cfg.optimizer == Optimizer::Adam)
        res.adam_states.resize(nblocks);
    else {
        res.lbfgs_states.resize(nblocks);
        for (auto& st : res.lbfgs_states) st.memory = std::max<std::size_t>(1, cfg.lbfgs_memory);
    }

    std::size_t suppressed = 0;
    std::size_t fallback_count = 0;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        double epoch_total = 0.0;
        try {
            if (cfg.optimizer == Optimizer::Adam) {
                // All block gradients are taken at the epoch-start parameters,
                // then every net steps at once.
                std::vector<linalg::Vector> flat_g(nblocks);
                for (std::size_t i = 0; i < nblocks; ++i) {
                    auto [value, grads] = ad::grad(block_loss[i], nets);
                    epoch_total += value;
                    flat_g[i] = ad::flatten_gradient(grads[i]);
                }
                if (!std::isfinite(epoch_total) || epoch_total > cfg.divergence_limit) {
                    res.diverged = true;
                    add_warning(res.warnings, suppressed,
                                "training diverged at epoch " + std::to_string(epoch));
                    break;
                }
                for (std::size_t i = 0; i < nblocks; ++i) {
                    linalg::Vector x = flatten_params(nets[i]);
                    adam_step(res.adam_states[i], x, flat_g[i], cfg.lr);
                    unflatten_params(nets[i], x);
                }
            } else {
                const std::vector<Mlp> snapshot = nets; // other nets stay frozen
                std::vector<LbfgsOutcome> outcomes(nblocks);
                for (std::size_t i = 0; i < nblocks; ++i) {
                    LbfgsObjective obj;
                    obj.value = [&, i](const linalg::Vector& xv) {
                        std::vector<Mlp> probe = snapshot;
                        unflatten_params(probe[i], xv);
                        return ad::eval_loss(block_loss[i], probe);
                    };
                    obj.value_grad = [&, i](const linalg::Vector& xv) {
                        std::vector<Mlp> probe = snapshot;
                        unflatten_params(probe[i], xv);
                        auto [value, grads] = ad::grad(block_loss[i], probe);
                        return std::make_pair(value, ad::flatten_gradient(grads[i]));
                    };
                    linalg::Vector x = flatten_params(snapshot[i]);
                    outcomes[i] = lbfgs_step(res.lbfgs_states[i], x, obj, cfg.lr);
                    epoch_total += outcomes[i].f0;
                    unflatten_params(nets[i], x);
                    if (outcomes[i].fallback) {
                        ++fallback_count;
                        add_warning(res.warnings, suppressed,
                                    "lbfgs line search failed at epoch " + std::to_string(epoch) +
                                        " (net " + std::to_string(i) +
                                        "); took a safeguarded gradient step");
                    }
                }
                if (!std::isfinite(epoch_total) || epoch_total > cfg.divergence_limit) {
                    res.diverged = true;
                    add_warning(res.warnings, suppressed,
                                "training diverged at epoch " + std::to_string(epoch));
                    break;
                }
            }
        } catch (const NumericError& e) {
            res.diverged = true;
            add_warning(res.warnings, suppressed,
                        "training aborted at epoch " + std::to_string(epoch) + ": " + e.what());
            break;
        }
        res.epochs_run = epoch;
        if (epoch % cfg.record_every == 0 || epoch == cfg.epochs) {
            auto snapshot_loss = losses::xpinn_total(p, nets, res.set, dec, cfg.weights);
            res.history.push_back({epoch, snapshot_loss.global});
        }
    }

    try {
        res.final_loss = losses::xpinn_total(p, nets, res.set, dec, cfg.weights);
    } catch (const NumericError& e) {
        res.diverged = true;
        add_warning(res.warnings, suppressed, std::string("final loss not finite: ") + e.what());
    }
    if (suppressed > 0)
        res.warnings.push_back(std::to_string(suppressed) + " further warnings suppressed");
    if (fallback_count > 0)
        res.warnings.push_back("lbfgs fallback steps taken: " + std::to_string(fallback_count));
    res.nets = std::move(nets);
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
}

} // namespace xpinnlab::train
