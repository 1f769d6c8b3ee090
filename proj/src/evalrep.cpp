#include "xpinnlab/evalrep.hpp"

#include "xpinnlab/autodiff.hpp"
#include "xpinnlab/errors.hpp"

#include <cmath>
#include <cstdio>

namespace xpinnlab::evalrep {

GridSpec default_grid(const PdeProblem& p) {
    if (p.name == "kdv") return {320, 320};
    return {401, 401};
}

namespace {

std::vector<double> axis_nodes(double lo, double hi, std::size_t n) {
    std::vector<double> nodes(n);
    for (std::size_t i = 0; i < n; ++i)
        nodes[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return nodes;
}

} // namespace

Evaluation evaluate(const PdeProblem& p, const domain::Decomposition& dec,
                    const std::vector<Mlp>& nets, GridSpec spec) {
    if (p.box.dim() != 2) throw UnsupportedError("grid evaluation expects a 2-D problem");
    if (nets.size() != dec.size()) throw ShapeError("one network per subdomain required");
    if (!p.exact && !p.reference)
        throw InvalidInput("no exact solution or reference grid available for '" + p.name + "'");
    const GridSpec def = default_grid(p);
    const std::size_t n0 = spec.n0 ? spec.n0 : def.n0;
    const std::size_t n1 = spec.n1 ? spec.n1 : def.n1;
    if (n0 < 2 || n1 < 2) throw ConfigError("test grid needs at least 2 nodes per axis");

    Evaluation out;
    out.n0 = n0;
    out.n1 = n1;
    out.error.axis0_name = p.axis_names.size() == 2 ? p.axis_names[0] : "x0";
    out.error.axis1_name = p.axis_names.size() == 2 ? p.axis_names[1] : "x1";
    out.error.axis0 = axis_nodes(p.box.lo[0], p.box.hi[0], n0);
    out.error.axis1 = axis_nodes(p.box.lo[1], p.box.hi[1], n1);
    out.error.values.assign(n0 * n1, 0.0);

    // Group nodes by owning subdomain so each sub-net runs one batched pass.
    const std::size_t total = n0 * n1;
    std::vector<std::size_t> owner(total);
    std::vector<std::size_t> count(dec.size(), 0);
    linalg::Vector x(2);
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j) {
            x[0] = out.error.axis0[i];
            x[1] = out.error.axis1[j];
            const std::size_t part = domain::assign(dec, x);
            owner[i * n1 + j] = part;
            ++count[part];
        }

    std::vector<double> pred(total, 0.0);
    for (std::size_t part = 0; part < dec.size(); ++part) {
        if (count[part] == 0) continue;
        linalg::Matrix xs(2, count[part]);
        std::vector<std::size_t> back(count[part]);
        std::size_t q = 0;
        for (std::size_t node = 0; node < total; ++node) {
            if (owner[node] != part) continue;
            xs(0, q) = out.error.axis0[node / n1];
            xs(1, q) = out.error.axis1[node % n1];
            back[q] = node;
            ++q;
        }
        ad::EvalBackend bk;
        auto net = ad::lift(bk, nets[part]);
        auto o = ad::batch_eval(bk, net, xs, ad::DerivPlan{0, {}});
        for (std::size_t c = 0; c < count[part]; ++c) pred[back[c]] = o.u(0, c);
    }

    double err_sq = 0.0, ref_sq = 0.0;
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j) {
            x[0] = out.error.axis0[i];
            x[1] = out.error.axis1[j];
            const double ref = p.exact ? p.exact(x) : p.reference->interpolate(x[0], x[1]);
            const double e = pred[i * n1 + j] - ref;
            err_sq += e * e;
            ref_sq += ref * ref;
            const double ae = std::abs(e);
            out.error.values[i * n1 + j] = ae;
            out.max_abs_err = std::max(out.max_abs_err, ae);
        }
    if (ref_sq == 0.0)
        throw InvalidInput("reference is identically zero on the grid; relative error undefined");
    out.rel_l2 = std::sqrt(err_sq) / std::sqrt(ref_sq);
    return out;
}

double relative_l2(const PdeProblem& p, const domain::Decomposition& dec,
                   const std::vector<Mlp>& nets, GridSpec spec) {
    return evaluate(p, dec, nets, spec).rel_l2;
}

Evaluation error_field(const PdeProblem& p, const domain::Decomposition& dec,
                       const std::vector<Mlp>& nets, const std::string& path, GridSpec spec) {
    Evaluation out = evaluate(p, dec, nets, spec);
    save_reference_grid(out.error, path);
    return out;
}

SeedStats seed_stats(const std::vector<double>& values) {
    if (values.empty()) throw InvalidInput("seed statistics need at least one value");
    SeedStats st;
    for (double v : values) st.mean += v;
    st.mean /= static_cast<double>(values.size());
    double acc = 0.0;
    for (double v : values) acc += (v - st.mean) * (v - st.mean);
    st.stddev = std::sqrt(acc / static_cast<double>(values.size()));
    return st;
}

std::string format_sci(double v) {
    if (v == 0.0) return "0";
    if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
    const bool neg = v < 0.0;
    double a = std::abs(v);
    int e = static_cast<int>(std::floor(std::log10(a)));
    const double mant = a / std::pow(10.0, e);
    char mbuf[48];
    std::snprintf(mbuf, sizeof(mbuf), "%.3f", mant);
    if (std::string(mbuf) == "10.000") { // rounding pushed the mantissa over
        ++e;
        std::snprintf(mbuf, sizeof(mbuf), "%.3f", 1.0);
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%se%d", neg ? "-" : "", mbuf, e);
    return buf;
}

std::string format_mean_std(double mean, double stddev) {
    return format_sci(mean) + "±" + format_sci(stddev);
}

std::vector<SeedTableRow> seed_table(
    const std::vector<std::pair<std::string, std::vector<double>>>& fields) {
    std::vector<SeedTableRow> rows;
    rows.reserve(fields.size());
    for (const auto& [name, values] : fields) {
        SeedTableRow row;
        row.field = name;
        row.stats = seed_stats(values);
        row.formatted = format_mean_std(row.stats.mean, row.stats.stddev);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace xpinnlab::evalrep
