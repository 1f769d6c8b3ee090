#include "xpinnlab/runner.hpp"

#include "xpinnlab/bounds.hpp"
#include "xpinnlab/errors.hpp"
#include "xpinnlab/evalrep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <thread>

#include <json.hpp>

namespace xpinnlab::run {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json breakdown_json(const losses::LossBreakdown& b) {
    return json{{"total", b.total},           {"boundary", b.boundary},
                {"residual", b.residual},     {"interface_u", b.iface_u},
                {"interface_res", b.iface_res}, {"interface_grad", b.iface_grad}};
}

json caps_json(const bounds::LayerCaps& caps) {
    return json{{"m", caps.m},
                {"n", caps.n},
                {"spectral", caps.spectral},
                {"norm21", caps.norm21},
                {"include_bias", caps.include_bias}};
}

json report_json(const bounds::BoundReport& r) {
    json out{{"model", r.model},
             {"n_b", r.n_b},
             {"n_r", r.n_r},
             {"delta", r.delta},
             {"delta_mn", r.delta_mn},
             {"residual", r.residual},
             {"l2", r.l2},
             {"c1", r.c1},
             {"complexity_spectral", r.complexity.spectral_product},
             {"complexity_full", r.complexity.full_product},
             {"caps", caps_json(r.caps)},
             {"out_of_assumption", r.out_of_assumption}};
    if (r.boundary)
        out["boundary"] = *r.boundary;
    else
        out["boundary"] = nullptr;
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path);
    out << text;
    if (!out) throw InvalidInput("write failed: " + path);
}

std::string basename_of(const std::string& path) {
    return fs::path(path).filename().string();
}

std::size_t even_split(std::size_t total, std::size_t parts, std::size_t idx) {
    return total / parts + (idx < total % parts ? 1 : 0);
}

} // namespace

std::size_t thread_cap() {
    const char* raw = std::getenv("XPINN_LAB_THREADS");
    if (!raw || !*raw) return 1;
    char* end = nullptr;
    const long v = std::strtol(raw, &end, 10);
    if (*end != '\0' || v < 1)
        throw ConfigError("XPINN_LAB_THREADS must be a positive integer");
    return static_cast<std::size_t>(v);
}

PdeProblem make_problem(const std::string& benchmark, const std::string& reference_path,
                        std::size_t fd_n) {
    auto attach = [&](PdeProblem p) {
        if (!reference_path.empty())
            p.reference = std::make_shared<ReferenceGrid>(load_reference_grid(reference_path));
        return p;
    };
    if (benchmark == "heat") return attach(make_heat());
    if (benchmark == "advection") return attach(make_advection());
    if (benchmark == "poisson") {
        PdeProblem p = make_poisson();
        p.reference = reference_path.empty()
                          ? std::make_shared<ReferenceGrid>(fd_poisson_reference(fd_n))
                          : std::make_shared<ReferenceGrid>(load_reference_grid(reference_path));
        return p;
    }
    if (benchmark == "kdv") {
        if (reference_path.empty())
            throw ConfigError("the kdv benchmark needs a reference solution grid");
        return make_kdv(std::make_shared<ReferenceGrid>(load_reference_grid(reference_path)));
    }
    throw ConfigError("unknown benchmark '" + benchmark + "'");
}

namespace {

struct SeedOutcome {
    train::TrainResult result;
    std::optional<evalrep::Evaluation> eval;
    json bounds_report; // null when unavailable
    std::string bound_warning;
};

json bounds_for_seed(const config::RunConfig& cfg, const PdeProblem& problem,
                     const domain::Decomposition& dec, const train::TrainResult& res) {
    const auto& set = res.set;
    if (cfg.model == "pinn") {
        auto rep = bounds::bound_report(res.nets[0], problem, set.n_boundary(), set.n_residual(),
                                        cfg.bounds.delta, cfg.bounds.c1, cfg.bounds.include_bias,
                                        "PINN");
        return report_json(rep);
    }
    const double delta_sub = cfg.bounds.delta / static_cast<double>(dec.size());
    json out;
    out["model"] = "XPINN";
    out["delta_per_subnet"] = delta_sub;
    std::vector<double> res_b, bnd_b;
    std::vector<std::size_t> res_w, bnd_w;
    out["sub"] = json::array();
    for (std::size_t i = 0; i < dec.size(); ++i) {
        auto rep = bounds::bound_report(res.nets[i], problem, set.n_boundary_of(i),
                                        set.n_residual_of(i), delta_sub, cfg.bounds.c1,
                                        cfg.bounds.include_bias, dec.parts[i].name);
        out["sub"].push_back(report_json(rep));
        res_b.push_back(rep.residual);
        res_w.push_back(rep.n_r);
        if (rep.n_b > 0 && rep.boundary) {
            bnd_b.push_back(*rep.boundary);
            bnd_w.push_back(rep.n_b);
        }
    }
    if (bnd_b.empty()) throw InvalidInput("no sub-net carries boundary points");
    const double agg_b = bounds::xpinn_aggregate(bnd_b, bnd_w);
    const double agg_r = bounds::xpinn_aggregate(res_b, res_w);
    out["aggregate"] = json{{"boundary", agg_b},
                            {"residual", agg_r},
                            {"l2", bounds::l2_bound(agg_b, agg_r, cfg.bounds.c1)}};
    return out;
}

std::string history_csv(const train::TrainResult& res) {
    std::string text = "epoch,total,boundary,residual,interface_u,interface_res,interface_grad\n";
    for (const auto& rec : res.history) {
        text += std::to_string(rec.epoch);
        for (double v : {rec.loss.total, rec.loss.boundary, rec.loss.residual, rec.loss.iface_u,
                         rec.loss.iface_res, rec.loss.iface_grad})
            text += "," + g17(v);
        text += "\n";
    }
    return text;
}

json optimizer_sidecar(const config::RunConfig& cfg, const train::TrainResult& res) {
    json opt;
    opt["schema"] = 1;
    opt["kind"] = "optimizer_state";
    opt["optimizer"] = train::optimizer_name(cfg.train.optimizer);
    opt["lr"] = cfg.train.lr;
    opt["nets"] = json::array();
    if (cfg.train.optimizer == train::Optimizer::Adam) {
        for (const auto& st : res.adam_states)
            opt["nets"].push_back(json{{"t", st.t}, {"m", st.m}, {"v", st.v}});
    } else {
        for (const auto& st : res.lbfgs_states) {
            json pairs = json::array();
            for (const auto& p : st.pairs) pairs.push_back(json{{"s", p.s}, {"y", p.y}});
            json entry{{"memory", st.memory}, {"pairs", pairs}};
            if (st.prev_x && st.prev_g) {
                entry["pending_x"] = *st.prev_x;
                entry["pending_g"] = *st.prev_g;
            }
            opt["nets"].push_back(entry);
        }
    }
    return opt;
}

} // namespace

int cmd_train(const std::string& config_path, const CliOverrides& ov) {
    config::RunConfig cfg = config::load_run_config(config_path);
    if (ov.seed) cfg.seeds = {*ov.seed};
    if (ov.delta) {
        if (!(*ov.delta > 0.0 && *ov.delta < 1.0))
            throw ConfigError("--delta must lie strictly between 0 and 1");
        cfg.bounds.delta = *ov.delta;
    }
    if (ov.c1) {
        if (!(*ov.c1 > 0.0)) throw ConfigError("--c1 must be positive");
        cfg.bounds.c1 = *ov.c1;
    }
    if (ov.include_bias) cfg.bounds.include_bias = *ov.include_bias;
    if (ov.out) cfg.out = *ov.out;

    const std::size_t threads = thread_cap();
    const PdeProblem problem = make_problem(cfg.benchmark, cfg.reference_path);
    const domain::Decomposition dec = cfg.model == "pinn"
                                          ? domain::identity_decomposition()
                                          : domain::builtin_decomposition(cfg.decomposition);

    std::vector<std::size_t> dims{problem.box.dim()};
    dims.insert(dims.end(), cfg.net.hidden.begin(), cfg.net.hidden.end());
    dims.push_back(1);

    std::vector<SeedOutcome> outs(cfg.seeds.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(cfg.seeds.size());
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= cfg.seeds.size()) return;
            try {
                train::TrainConfig tc = cfg.train;
                tc.seed = cfg.seeds[k];
                std::vector<Mlp> nets;
                for (std::size_t i = 0; i < dec.size(); ++i)
                    nets.push_back(make_mlp(dims, cfg.net.activation, mix_seed(tc.seed, 500 + i)));
                outs[k].result = train::train(problem, dec, std::move(nets), tc);
                if (!outs[k].result.diverged) {
                    outs[k].eval = evalrep::evaluate(problem, dec, outs[k].result.nets,
                                                     {cfg.eval_n0, cfg.eval_n1});
                    try {
                        outs[k].bounds_report = bounds_for_seed(cfg, problem, dec, outs[k].result);
                    } catch (const InvalidInput& e) {
                        outs[k].bound_warning = e.what();
                    }
                }
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::thread> pool;
        const std::size_t n = std::min(threads, cfg.seeds.size());
        for (std::size_t t = 0; t + 1 < n; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    fs::create_directories(cfg.out);
    const evalrep::GridSpec grid_used{cfg.eval_n0 ? cfg.eval_n0 : evalrep::default_grid(problem).n0,
                                      cfg.eval_n1 ? cfg.eval_n1 : evalrep::default_grid(problem).n1};

    json summary;
    summary["schema"] = 1;
    summary["kind"] = "train_summary";
    summary["benchmark"] = cfg.benchmark;
    summary["model"] = cfg.model;
    summary["decomposition"] = cfg.model == "pinn" ? "identity" : cfg.decomposition;
    {
        json parts = json::array();
        for (const auto& part : dec.parts) parts.push_back(part.name);
        summary["parts"] = parts;
    }
    summary["activation"] = activation_name(cfg.net.activation);
    summary["hidden"] = cfg.net.hidden;
    summary["optimizer"] = train::optimizer_name(cfg.train.optimizer);
    summary["lr"] = cfg.train.lr;
    summary["epochs"] = cfg.train.epochs;
    summary["record_every"] = cfg.train.record_every;
    summary["points"] = json{{"boundary", cfg.train.counts.n_boundary},
                             {"residual", cfg.train.counts.n_residual},
                             {"interface", cfg.train.counts.n_interface}};
    summary["weights"] = json{{"residual", cfg.train.weights.residual},
                              {"boundary", cfg.train.weights.boundary},
                              {"interface_u", cfg.train.weights.interface_u},
                              {"interface_res", cfg.train.weights.interface_res},
                              {"interface_grad", cfg.train.weights.interface_grad}};
    summary["bounds_settings"] = json{{"delta", cfg.bounds.delta},
                                      {"c1", cfg.bounds.c1},
                                      {"include_bias", cfg.bounds.include_bias}};
    summary["eval_grid"] = json::array({grid_used.n0, grid_used.n1});

    bool any_diverged = false;
    std::vector<double> totals, rels, bound_l2s;
    json seeds = json::array();
    json wall = json::array();
    for (std::size_t k = 0; k < cfg.seeds.size(); ++k) {
        const auto& o = outs[k];
        const std::string tag = "seed" + std::to_string(cfg.seeds[k]);
        json s;
        s["seed"] = cfg.seeds[k];
        s["epochs_run"] = o.result.epochs_run;
        s["diverged"] = o.result.diverged;
        s["warnings"] = o.result.warnings;
        if (!o.bound_warning.empty()) s["warnings"].push_back("bounds: " + o.bound_warning);
        s["loss"] = breakdown_json(o.result.final_loss.global);
        json parts_loss = json::array();
        for (const auto& p : o.result.final_loss.parts) parts_loss.push_back(breakdown_json(p));
        s["parts_loss"] = parts_loss;
        {
            const auto& set = o.result.set;
            json iface = json::array();
            for (const auto& m : set.interface_x) iface.push_back(m.cols());
            json pb = json::array(), pr = json::array();
            for (std::size_t i = 0; i < dec.size(); ++i) {
                pb.push_back(set.n_boundary_of(i));
                pr.push_back(set.n_residual_of(i));
            }
            s["counts"] = json{{"boundary", set.n_boundary()},
                               {"residual", set.n_residual()},
                               {"interface", iface},
                               {"per_part_boundary", pb},
                               {"per_part_residual", pr}};
        }
        if (o.eval) {
            s["rel_l2"] = o.eval->rel_l2;
            s["max_abs_err"] = o.eval->max_abs_err;
            rels.push_back(o.eval->rel_l2);
        } else {
            s["rel_l2"] = nullptr;
            s["max_abs_err"] = nullptr;
        }
        s["bounds"] = o.bounds_report;
        if (!o.bounds_report.is_null()) {
            const double l2 = cfg.model == "pinn"
                                  ? o.bounds_report.at("l2").get<double>()
                                  : o.bounds_report.at("aggregate").at("l2").get<double>();
            bound_l2s.push_back(l2);
        }
        if (!o.result.diverged) totals.push_back(o.result.final_loss.global.total);
        any_diverged = any_diverged || o.result.diverged;

        // per-seed files
        json ck = json::array();
        if (cfg.model == "pinn") {
            const std::string path = cfg.out + "/net_" + tag + ".json";
            save_mlp(o.result.nets[0], path);
            ck.push_back(basename_of(path));
        } else {
            for (std::size_t i = 0; i < o.result.nets.size(); ++i) {
                const std::string path =
                    cfg.out + "/net_" + tag + "_part" + std::to_string(i) + ".json";
                save_mlp(o.result.nets[i], path);
                ck.push_back(basename_of(path));
            }
        }
        s["checkpoints"] = ck;
        const std::string hist = "history_" + tag + ".csv";
        write_text(cfg.out + "/" + hist, history_csv(o.result));
        s["history_csv"] = hist;
        const std::string opt = "opt_" + tag + ".json";
        write_text(cfg.out + "/" + opt, optimizer_sidecar(cfg, o.result).dump(2) + "\n");
        s["optimizer_state"] = opt;

        seeds.push_back(s);
        wall.push_back(o.result.wall_seconds);
    }
    summary["seeds"] = seeds;

    json agg = json::object();
    auto put_agg = [&](const char* key, const std::vector<double>& values) {
        if (values.empty()) return;
        const auto st = evalrep::seed_stats(values);
        agg[key] = json{{"mean", st.mean},
                        {"std", st.stddev},
                        {"formatted", evalrep::format_mean_std(st.mean, st.stddev)}};
    };
    put_agg("train_total", totals);
    put_agg("rel_l2", rels);
    put_agg("bound_l2", bound_l2s);
    summary["aggregate"] = agg;

    const std::string canonical = summary.dump();
    summary["artifact_hash"] = "fnv1a:" + hex64(fnv1a(canonical));
    summary["meta"] = json{{"created_utc", utc_now()},
                           {"wall_seconds", wall},
                           {"threads", threads},
                           {"config_path", config_path}};
    write_text(cfg.out + "/summary.json", summary.dump(2) + "\n");

    std::cout << cfg.benchmark << " " << cfg.model << " -> " << cfg.out << "\n";
    for (std::size_t k = 0; k < cfg.seeds.size(); ++k) {
        const auto& o = outs[k];
        std::cout << "  seed " << cfg.seeds[k] << ": ";
        if (o.result.diverged) {
            std::cout << "DIVERGED after " << o.result.epochs_run << " epochs\n";
            continue;
        }
        std::cout << "train " << evalrep::format_sci(o.result.final_loss.global.total);
        if (o.eval) std::cout << ", rel_l2 " << evalrep::format_sci(o.eval->rel_l2);
        std::cout << " (" << o.result.epochs_run << " epochs)\n";
        for (const auto& w : o.result.warnings) std::cout << "    warning: " << w << "\n";
    }
    if (agg.contains("train_total"))
        std::cout << "  train_total " << agg["train_total"]["formatted"].get<std::string>()
                  << "\n";
    if (agg.contains("rel_l2"))
        std::cout << "  rel_l2      " << agg["rel_l2"]["formatted"].get<std::string>() << "\n";
    std::cout << "  artifact_hash " << summary["artifact_hash"].get<std::string>() << "\n";
    return any_diverged ? 3 : 0;
}

namespace {

void print_report_lines(const bounds::BoundReport& r) {
    std::printf("%-10s n_b=%zu n_r=%zu delta=%g delta_mn=%.6g\n", r.model.c_str(), r.n_b, r.n_r,
                r.delta, r.delta_mn);
    if (r.boundary)
        std::printf("  boundary bound   %.10e\n", *r.boundary);
    else
        std::printf("  boundary bound   (no boundary points)\n");
    std::printf("  residual bound   %.10e\n", r.residual);
    std::printf("  l2 bound (/C1)   %.10e\n", r.l2);
    std::printf("  complexity       spectral %.6e  full %.6e\n", r.complexity.spectral_product,
                r.complexity.full_product);
    std::printf("  caps M=[");
    for (std::size_t i = 0; i < r.caps.m.size(); ++i)
        std::printf("%s%lld", i ? "," : "", static_cast<long long>(r.caps.m[i]));
    std::printf("] N=[");
    for (std::size_t i = 0; i < r.caps.n.size(); ++i)
        std::printf("%s%lld", i ? "," : "", static_cast<long long>(r.caps.n[i]));
    std::printf("]\n");
    if (r.out_of_assumption)
        std::printf("  note: operator outside the linear second-order class; bound is formal\n");
}

} // namespace

int cmd_bounds(const BoundsArgs& a) {
    if (a.checkpoints.empty()) throw ConfigError("bounds: at least one checkpoint required");
    if (!(a.delta > 0.0 && a.delta < 1.0))
        throw ConfigError("--delta must lie strictly between 0 and 1");
    if (!(a.c1 > 0.0)) throw ConfigError("--c1 must be positive");
    static const std::set<std::string> benchmarks{"kdv", "heat", "advection", "poisson"};
    if (!benchmarks.count(a.benchmark))
        throw ConfigError("unknown benchmark '" + a.benchmark + "'");
    PdeProblem traits; // bounds only need the coefficient cap and the flag
    traits.name = a.benchmark;
    traits.k_bound = 1.0;
    traits.out_of_assumption = a.benchmark == "kdv";

    std::vector<Mlp> nets;
    for (const auto& path : a.checkpoints) nets.push_back(load_mlp(path));

    json out;
    out["schema"] = 1;
    out["kind"] = "bounds_report";
    out["benchmark"] = a.benchmark;
    out["include_bias"] = a.include_bias;

    std::string csv = "model,train_loss,rel_l2,complexity_spectral_pct,bound_pct,bound_raw\n";
    if (nets.size() == 1) {
        auto rep = bounds::bound_report(nets[0], traits, a.n_b, a.n_r, a.delta, a.c1,
                                        a.include_bias, basename_of(a.checkpoints[0]));
        print_report_lines(rep);
        out["report"] = report_json(rep);
        csv += rep.model + ",,,,," + g17(rep.l2) + "\n";
    } else {
        const std::size_t nsubs = nets.size() - 1;
        if (!a.sub_nb.empty() && a.sub_nb.size() != nsubs)
            throw ConfigError("--sub-nb needs one count per sub-net checkpoint");
        if (!a.sub_nr.empty() && a.sub_nr.size() != nsubs)
            throw ConfigError("--sub-nr needs one count per sub-net checkpoint");
        const double delta_sub =
            a.delta / static_cast<double>(a.subnets ? a.subnets : nsubs);
        auto base = bounds::bound_report(nets[0], traits, a.n_b, a.n_r, a.delta, a.c1,
                                         a.include_bias, basename_of(a.checkpoints[0]));
        std::vector<bounds::BoundReport> subs;
        for (std::size_t i = 0; i < nsubs; ++i) {
            const std::size_t nb_i =
                a.sub_nb.empty() ? even_split(a.n_b, nsubs, i) : a.sub_nb[i];
            const std::size_t nr_i =
                a.sub_nr.empty() ? even_split(a.n_r, nsubs, i) : a.sub_nr[i];
            subs.push_back(bounds::bound_report(nets[i + 1], traits, nb_i, nr_i, delta_sub, a.c1,
                                                a.include_bias,
                                                basename_of(a.checkpoints[i + 1])));
        }
        auto cmp = bounds::compare_posterior(base, subs);
        print_report_lines(base);
        for (const auto& s : subs) print_report_lines(s);
        std::printf("%-28s %12s %12s %10s\n", "model", "bound_raw", "bound_pct", "compl_pct");
        std::printf("%-28s %12.4e %11.2f%% %9.2f%%\n", cmp.pinn.model.c_str(), cmp.pinn.l2,
                    cmp.pinn.bound_pct, cmp.pinn.complexity_pct);
        std::printf("%-28s %12.4e %11.2f%% %9.2f%%\n", "XPINN(aggregate)", cmp.xpinn.l2,
                    cmp.xpinn.bound_pct, cmp.xpinn.complexity_pct);
        for (std::size_t i = 0; i < subs.size(); ++i)
            std::printf("  %-26s %12s %11s %9.2f%%\n", subs[i].model.c_str(), "", "",
                        cmp.sub_complexity_pct[i]);
        std::printf("verdict: smaller bound for %s\n", cmp.verdict.c_str());

        out["baseline"] = report_json(base);
        json subj = json::array();
        for (const auto& s : subs) subj.push_back(report_json(s));
        out["sub"] = subj;
        out["aggregate"] = json{{"boundary", cmp.xpinn.boundary},
                                {"residual", cmp.xpinn.residual},
                                {"l2", cmp.xpinn.l2},
                                {"bound_pct", cmp.xpinn.bound_pct},
                                {"complexity_pct", cmp.xpinn.complexity_pct}};
        out["sub_complexity_pct"] = cmp.sub_complexity_pct;
        out["verdict"] = cmp.verdict;
        out["delta_per_subnet"] = delta_sub;

        csv += cmp.pinn.model + ",,,100.00,100.00," + g17(cmp.pinn.l2) + "\n";
        {
            char row[160];
            std::snprintf(row, sizeof(row), "XPINN,,,%.2f,%.2f,%s\n", cmp.xpinn.complexity_pct,
                          cmp.xpinn.bound_pct, g17(cmp.xpinn.l2).c_str());
            csv += row;
        }
        for (std::size_t i = 0; i < subs.size(); ++i) {
            char row[160];
            std::snprintf(row, sizeof(row), "XPINN/%s,,,%.2f,,\n", subs[i].model.c_str(),
                          cmp.sub_complexity_pct[i]);
            csv += row;
        }
    }
    if (!a.out.empty()) {
        fs::create_directories(a.out);
        write_text(a.out + "/bounds.json", out.dump(2) + "\n");
        write_text(a.out + "/bounds.csv", csv);
        std::cout << "wrote " << a.out << "/bounds.json and bounds.csv\n";
    }
    return 0;
}

namespace {

struct RunRow {
    std::string dir, label, model;
    double train_mean = 0, train_std = 0;
    double rel_mean = 0, rel_std = 0;
    bool has_rel = false;
    double bound = 0; // mean l2-level bound
    bool has_bound = false;
    double complexity = 0; // headline spectral product
    std::vector<std::pair<std::string, double>> part_complexity;
};

RunRow load_run_row(const std::string& dir) {
    const std::string path = dir + "/summary.json";
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    json s;
    try {
        in >> s;
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    try {
        if (s.at("schema").get<int>() != 1 || s.at("kind").get<std::string>() != "train_summary")
            throw ConfigError(path + ": not a schema-1 train summary");
        RunRow row;
        row.dir = dir;
        row.model = s.at("model").get<std::string>();
        row.label = row.model == "pinn"
                        ? "PINN"
                        : "XPINN-" + s.at("decomposition").get<std::string>();
        std::vector<double> totals, rels, bound_vals;
        std::map<std::string, std::vector<double>> parts_cx;
        std::vector<double> head_cx;
        for (const auto& seed : s.at("seeds")) {
            if (seed.at("diverged").get<bool>()) continue;
            totals.push_back(seed.at("loss").at("total").get<double>());
            if (!seed.at("rel_l2").is_null()) rels.push_back(seed.at("rel_l2").get<double>());
            const auto& b = seed.at("bounds");
            if (b.is_null()) continue;
            if (row.model == "pinn") {
                bound_vals.push_back(b.at("l2").get<double>());
                head_cx.push_back(b.at("complexity_spectral").get<double>());
            } else {
                bound_vals.push_back(b.at("aggregate").at("l2").get<double>());
                double cmax = 0.0;
                for (const auto& sub : b.at("sub")) {
                    const double c = sub.at("complexity_spectral").get<double>();
                    cmax = std::max(cmax, c);
                    parts_cx[sub.at("model").get<std::string>()].push_back(c);
                }
                head_cx.push_back(cmax);
            }
        }
        if (totals.empty()) throw ConfigError(dir + ": every seed diverged; nothing to compare");
        const auto t = evalrep::seed_stats(totals);
        row.train_mean = t.mean;
        row.train_std = t.stddev;
        if (!rels.empty()) {
            const auto r = evalrep::seed_stats(rels);
            row.rel_mean = r.mean;
            row.rel_std = r.stddev;
            row.has_rel = true;
        }
        if (!bound_vals.empty()) {
            row.bound = evalrep::seed_stats(bound_vals).mean;
            row.has_bound = true;
            row.complexity = evalrep::seed_stats(head_cx).mean;
        }
        for (const auto& [name, values] : parts_cx)
            row.part_complexity.emplace_back(name, evalrep::seed_stats(values).mean);
        return row;
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

} // namespace

int cmd_compare(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
    if (run_dirs.size() < 2) throw ConfigError("compare needs at least two run directories");
    std::vector<RunRow> rows;
    std::string benchmark;
    for (const auto& dir : run_dirs) {
        const std::string path = dir + "/summary.json";
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open " + path);
        json s;
        try {
            in >> s;
            const std::string b = s.at("benchmark").get<std::string>();
            if (benchmark.empty())
                benchmark = b;
            else if (b != benchmark)
                throw ConfigError(path + ": benchmark '" + b + "' does not match '" + benchmark +
                                  "'");
        } catch (const json::exception& e) {
            throw ConfigError(path + ": " + e.what());
        }
        rows.push_back(load_run_row(dir));
    }
    std::size_t base = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].model == "pinn") {
            base = i;
            break;
        }
    if (!rows[base].has_bound)
        throw ConfigError(rows[base].dir + ": baseline run carries no bound reports");

    const double base_bound = rows[base].bound;
    const double base_cx = rows[base].complexity;

    json out;
    out["schema"] = 1;
    out["kind"] = "compare_report";
    out["benchmark"] = benchmark;
    out["baseline"] = rows[base].label;
    json jrows = json::array();
    std::string csv = "model,train_loss,rel_l2,complexity_spectral_pct,bound_pct,bound_raw\n";

    std::printf("%-20s %-22s %-22s %12s %10s %12s\n", "model", "train_loss", "rel_l2",
                "complexity%", "bound%", "bound_raw");
    double best = rows[base].bound;
    std::string best_label = rows[base].label;
    for (const auto& row : rows) {
        const std::string train_s = evalrep::format_mean_std(row.train_mean, row.train_std);
        const std::string rel_s =
            row.has_rel ? evalrep::format_mean_std(row.rel_mean, row.rel_std) : "-";
        const double cx_pct = row.has_bound ? 100.0 * row.complexity / base_cx : 0.0;
        const double b_pct = row.has_bound ? 100.0 * row.bound / base_bound : 0.0;
        std::printf("%-20s %-22s %-22s %11.2f%% %9.2f%% %12.4e\n", row.label.c_str(),
                    train_s.c_str(), rel_s.c_str(), cx_pct, b_pct, row.bound);
        for (const auto& [pname, pcx] : row.part_complexity)
            std::printf("  part %-14s %-22s %-22s %11.2f%%\n", pname.c_str(), "", "",
                        100.0 * pcx / base_cx);
        json jr{{"dir", row.dir},
                {"model", row.label},
                {"train_loss", {{"mean", row.train_mean}, {"std", row.train_std}}},
                {"complexity_spectral_pct", cx_pct},
                {"bound_pct", b_pct},
                {"bound_raw", row.bound}};
        if (row.has_rel) jr["rel_l2"] = {{"mean", row.rel_mean}, {"std", row.rel_std}};
        json jparts = json::array();
        for (const auto& [pname, pcx] : row.part_complexity)
            jparts.push_back(json{{"part", pname}, {"complexity_spectral_pct", 100.0 * pcx / base_cx}});
        jr["parts"] = jparts;
        jrows.push_back(jr);
        {
            char buf[256];
            std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.2f,%.2f,%s\n", row.label.c_str(),
                          train_s.c_str(), rel_s.c_str(), cx_pct, b_pct, g17(row.bound).c_str());
            csv += buf;
        }
        for (const auto& [pname, pcx] : row.part_complexity) {
            char buf[256];
            std::snprintf(buf, sizeof(buf), "%s/%s,,,%.2f,,\n", row.label.c_str(), pname.c_str(),
                          100.0 * pcx / base_cx);
            csv += buf;
        }
        if (row.has_bound && row.bound < best) {
            best = row.bound;
            best_label = row.label;
        }
    }
    out["rows"] = jrows;
    out["smallest_bound"] = best_label;
    std::printf("smallest bound (after the square-root map, up to C1): %s\n", best_label.c_str());

    const std::string dir = out_dir.empty() ? "." : out_dir;
    fs::create_directories(dir);
    write_text(dir + "/compare.json", out.dump(2) + "\n");
    write_text(dir + "/compare.csv", csv);
    std::cout << "wrote " << dir << "/compare.json and compare.csv\n";
    return 0;
}

int cmd_example(const std::string& name, std::optional<double> q) {
    const std::size_t n = 1000; // counts cancel in the asymptotic weights
    const std::vector<std::size_t> halves{n / 2, n / 2};
    auto print_cmp = [](const bounds::PriorComparison& c) {
        std::printf("  single net : %.12g\n", c.pinn_q);
        std::printf("  decomposed : %.12g\n", c.xpinn_q);
        std::printf("  verdict    : %s\n",
                    c.verdict == "xpinn"  ? "decomposition wins"
                    : c.verdict == "pinn" ? "single net wins"
                                          : "tie");
    };
    if (q) {
        if (*q < 0.0) throw ConfigError("q must be nonnegative");
        std::printf("target 2 sin x + %.6g sin y, segment + diagonal split\n", *q);
        print_cmp(bounds::prior_compare(bounds::diagonal_target(2.0, *q), n, halves, true));
        return 0;
    }
    if (name == "4.1") {
        std::printf("target 2 sin x + sin y on two perpendicular segments\n");
        print_cmp(bounds::prior_compare(bounds::broken_line_target(2.0, 1.0), n, halves, true));
        return 0;
    }
    if (name == "4.2") {
        std::printf("target 2 sin x + 0.5 sin y, segment + diagonal split\n");
        print_cmp(bounds::prior_compare(bounds::diagonal_target(2.0, 0.5), n, halves, true));
        return 0;
    }
    if (name == "4.3") {
        const double qs = bounds::prior_crossover_q(0.0, 2.0, 1e-6);
        std::printf("target 2 sin x + q sin y, segment + diagonal split\n");
        std::printf("  crossover q* = %.6f (single net wins below, decomposition above)\n", qs);
        return 0;
    }
    throw ConfigError("unknown example '" + name + "' (expected 4.1, 4.2, or 4.3)");
}

} // namespace xpinnlab::run
