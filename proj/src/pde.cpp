#include "xpinnlab/pde.hpp"

#include "xpinnlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace xpinnlab {

using linalg::Matrix;
using linalg::Vector;

namespace {
constexpr double kPi = std::numbers::pi;
}

// ---------------------------------------------------------------- ReferenceGrid

double ReferenceGrid::interpolate(double u, double v) const {
    auto locate = [](const std::vector<double>& ax, double q, const char* name) {
        const double slack = 1e-9 * std::max(1.0, std::abs(ax.back() - ax.front()));
        if (q < ax.front() - slack || q > ax.back() + slack)
            throw DomainError(std::string("reference grid query outside hull on axis ") + name);
        q = std::clamp(q, ax.front(), ax.back());
        std::size_t j = std::upper_bound(ax.begin(), ax.end(), q) - ax.begin();
        j = std::clamp<std::size_t>(j, 1, ax.size() - 1);
        const double w = (q - ax[j - 1]) / (ax[j] - ax[j - 1]);
        return std::pair<std::size_t, double>(j - 1, w);
    };
    const auto [i, wu] = locate(axis0, u, axis0_name.c_str());
    const auto [j, wv] = locate(axis1, v, axis1_name.c_str());
    const double v00 = at(i, j), v01 = at(i, j + 1), v10 = at(i + 1, j), v11 = at(i + 1, j + 1);
    return (1.0 - wu) * ((1.0 - wv) * v00 + wv * v01) + wu * ((1.0 - wv) * v10 + wv * v11);
}

bool ReferenceGrid::covers(const domain::Box& box) const {
    if (box.dim() != 2 || axis0.size() < 2 || axis1.size() < 2) return false;
    const double s = 1e-9;
    return axis0.front() <= box.lo[0] + s && axis0.back() >= box.hi[0] - s &&
           axis1.front() <= box.lo[1] + s && axis1.back() >= box.hi[1] - s;
}

ReferenceGrid load_reference_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open reference grid: " + path);
    ReferenceGrid g;
    std::string line;
    std::size_t lineno = 0;

    auto fail = [&](const std::string& why) {
        throw ParseError(path + ":" + std::to_string(lineno) + ": " + why);
    };

    if (!std::getline(in, line)) { lineno = 1; fail("empty file"); }
    ++lineno;
    {
        std::istringstream ss(line);
        std::string word, ver;
        ss >> word >> ver;
        if (word != "refgrid" || ver != "v1") fail("expected header 'refgrid v1'");
    }
    auto read_axis = [&](std::vector<double>& ax, std::string& name) {
        if (!std::getline(in, line)) fail("missing axis line");
        ++lineno;
        std::istringstream ss(line);
        std::string word;
        std::size_t n = 0;
        ss >> word >> name >> n;
        if (word != "axis" || n < 2) fail("expected 'axis <name> <count> <values...>'");
        ax.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            if (!(ss >> ax[i])) fail("axis has fewer values than declared");
        for (std::size_t i = 1; i < n; ++i)
            if (!(ax[i] > ax[i - 1])) fail("axis values must be strictly ascending");
    };
    read_axis(g.axis0, g.axis0_name);
    read_axis(g.axis1, g.axis1_name);

    const std::size_t want = g.axis0.size() * g.axis1.size();
    g.values.reserve(want);
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) {
            try {
                std::size_t used = 0;
                const double v = std::stod(tok, &used);
                if (used != tok.size()) fail("bad value token '" + tok + "'");
                g.values.push_back(v);
            } catch (const std::logic_error&) {
                fail("bad value token '" + tok + "'");
            }
            if (g.values.size() > want) fail("more values than axis sizes imply");
        }
    }
    ++lineno;
    if (g.values.size() != want)
        fail("expected " + std::to_string(want) + " values, got " + std::to_string(g.values.size()));
    return g;
}

void save_reference_grid(const ReferenceGrid& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open for write: " + path);
    char buf[64];
    out << "refgrid v1\n";
    auto put_axis = [&](const std::string& name, const std::vector<double>& ax) {
        out << "axis " << name << ' ' << ax.size();
        for (double v : ax) {
            std::snprintf(buf, sizeof buf, " %.17g", v);
            out << buf;
        }
        out << '\n';
    };
    put_axis(g.axis0_name, g.axis0);
    put_axis(g.axis1_name, g.axis1);
    for (std::size_t i = 0; i < g.axis0.size(); ++i) {
        for (std::size_t j = 0; j < g.axis1.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", g.at(i, j));
            out << buf << (j + 1 < g.axis1.size() ? " " : "");
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------- PdeProblem

ad::DerivPlan PdeProblem::deriv_plan() const {
    ad::DerivPlan plan;
    plan.order = std::min(operator_order, 2);
    plan.third_axes = third_axes;
    return plan;
}

double PdeProblem::source_at(const Vector& x, std::size_t branch) const {
    if (source_branch) return source_branch(x, branch);
    return source ? source(x) : 0.0;
}

double apply_operator(const SecondOrderOperator& op, const Mlp& net, const Vector& x) {
    double acc = 0.0;
    if (op.order >= 2 && op.a) {
        const Matrix h = input_hessian(net, x);
        for (const auto& [i, j] : op.active_pairs) {
            double coeff = op.a(x, i, j);
            if (i != j) coeff += op.a(x, j, i);
            acc += coeff * h(i, j);
        }
    }
    if (op.b) {
        const Vector g = input_gradient(net, x);
        for (int i : op.active_b) acc += op.b(x, i) * g[i];
    }
    if (op.c) acc += op.c(x) * forward(net, x);
    return acc;
}

namespace {

Vector column(const Matrix& X, std::size_t p) {
    Vector x(X.rows());
    for (std::size_t k = 0; k < X.rows(); ++k) x[k] = X(k, p);
    return x;
}

// Residual functional straight from the linear operator's coefficients.
void install_operator_residual(PdeProblem& p) {
    const SecondOrderOperator op = *p.op;
    set_residual(p, [op](auto& bk, const Matrix& X, const auto& o) {
        using Val = std::decay_t<decltype(o.u)>;
        const std::size_t n = X.cols();
        std::optional<Val> acc;
        auto accumulate = [&](Val v) { acc = acc ? bk.add(*acc, v) : v; };
        auto coeff_row = [&](auto&& f) {
            Matrix row(1, n);
            for (std::size_t q = 0; q < n; ++q) row(0, q) = f(column(X, q));
            return row;
        };
        if (op.order >= 2 && op.a)
            for (const auto& [i, j] : op.active_pairs) {
                const Matrix row = coeff_row([&](const Vector& x) {
                    double c = op.a(x, i, j);
                    if (i != j) c += op.a(x, j, i);
                    return c;
                });
                accumulate(bk.hadamard(bk.constant(row), o.d2u.at({i, j})));
            }
        if (op.b)
            for (int i : op.active_b) {
                const Matrix row = coeff_row([&](const Vector& x) { return op.b(x, i); });
                accumulate(bk.hadamard(bk.constant(row), o.du[i]));
            }
        if (op.c)
            accumulate(bk.hadamard(bk.constant(coeff_row([&](const Vector& x) { return op.c(x); })),
                                   o.u));
        if (!acc) throw ConfigError("operator has no nonzero coefficients");
        return *acc;
    });
}

double heat_exact(double x, double t) {
    return std::exp(-kPi * kPi * t) * std::cos(kPi * x) +
           0.6 * std::exp(-4.0 * kPi * kPi * t) * std::cos(2.0 * kPi * x) +
           0.3 * std::exp(4.0 * t - 4.0) * std::cosh(2.0 * x) +
           0.1 * std::exp(t - 1.0) * std::sinh(x);
}

} // namespace

PdeProblem make_heat() {
    PdeProblem p;
    p.name = "heat";
    p.axis_names = {"x", "t"};
    p.box.lo = {-1.0, 0.0};
    p.box.hi = {1.0, 1.0};
    p.box.labeled_faces = {{0, false}, {0, true}, {1, false}};
    p.operator_order = 2;
    p.k_bound = 1.0;

    SecondOrderOperator op;
    op.dim = 2;
    op.order = 2;
    // residual u_t − u_xx written as Lu with a₀₀ = −1, b_t = 1
    op.a = [](const Vector&, std::size_t i, std::size_t j) {
        return (i == 0 && j == 0) ? -1.0 : 0.0;
    };
    op.b = [](const Vector&, std::size_t i) { return i == 1 ? 1.0 : 0.0; };
    op.active_pairs = {{0, 0}};
    op.active_b = {1};
    p.op = op;

    p.exact = [](const Vector& x) { return heat_exact(x[0], x[1]); };
    p.boundary_data = p.exact;
    p.source = nullptr; // f ≡ 0
    install_operator_residual(p);
    return p;
}

PdeProblem make_advection() {
    PdeProblem p;
    p.name = "advection";
    p.axis_names = {"x", "t"};
    p.box.lo = {-1.0, 0.0};
    p.box.hi = {1.0, 1.0};
    p.box.labeled_faces = {{0, false}, {0, true}, {1, false}};
    p.operator_order = 1;
    p.k_bound = 1.0;

    SecondOrderOperator op;
    op.dim = 2;
    op.order = 1;
    op.b = [](const Vector&, std::size_t i) { return i == 0 ? 0.5 : 1.0; };
    op.active_b = {0, 1};
    p.op = op;

    p.exact = [](const Vector& x) {
        const double s = x[0] - 0.5 * x[1];
        return (s >= -0.2 && s <= 0.2) ? 1.0 : 0.0;
    };
    p.boundary_data = p.exact;
    install_operator_residual(p);
    return p;
}

PdeProblem make_poisson() {
    PdeProblem p;
    p.name = "poisson";
    p.axis_names = {"x", "y"};
    p.box.lo = {0.0, 0.0};
    p.box.hi = {1.0, 1.0};
    p.box.labeled_faces = {{0, false}, {0, true}, {1, false}, {1, true}};
    p.operator_order = 2;
    p.k_bound = 1.0;

    SecondOrderOperator op;
    op.dim = 2;
    op.order = 2;
    op.a = [](const Vector&, std::size_t i, std::size_t j) { return i == j ? 1.0 : 0.0; };
    op.active_pairs = {{0, 0}, {1, 1}};
    p.op = op;

    auto closed = [](const Vector& x) {
        return x[0] >= 0.25 && x[0] <= 0.75 && x[1] >= 0.25 && x[1] <= 0.75;
    };
    auto open = [](const Vector& x) {
        return x[0] > 0.25 && x[0] < 0.75 && x[1] > 0.25 && x[1] < 0.75;
    };
    p.source = [closed](const Vector& x) { return closed(x) ? 1.0 : 0.0; };
    // interface points sit on the box edge, where the two subdomains of the
    // builtin split disagree about f: the middle part (branch 0) sees 1,
    // the outer part (branch 1) sees 0.
    p.source_branch = [closed, open](const Vector& x, std::size_t branch) {
        return branch == 0 ? (closed(x) ? 1.0 : 0.0) : (open(x) ? 1.0 : 0.0);
    };
    p.boundary_data = [](const Vector&) { return 0.0; };
    install_operator_residual(p);
    return p;
}

PdeProblem make_kdv(std::shared_ptr<ReferenceGrid> reference) {
    if (!reference) throw InvalidInput("make_kdv: reference grid required");
    PdeProblem p;
    p.name = "kdv";
    p.axis_names = {"x", "t"};
    p.box.lo = {-1.0, 0.0};
    p.box.hi = {1.0, 1.0};
    p.box.labeled_faces = {{0, false}, {0, true}, {1, false}};
    if (!reference->covers(p.box))
        throw DomainError("make_kdv: reference grid does not cover the domain");
    p.operator_order = 3;
    p.third_axes = {0};
    p.out_of_assumption = true; // nonlinear, third order
    p.k_bound = 1.0;
    p.reference = reference;

    p.exact = [reference](const Vector& x) { return reference->interpolate(x[0], x[1]); };
    p.boundary_data = [reference](const Vector& x) {
        if (x[1] <= 1e-12) return std::cos(kPi * x[0]); // initial slice
        return reference->interpolate(x[0], x[1]);      // periodic edges, from data
    };
    // u_t + u·u_x − 0.0025·u_xxx
    set_residual(p, [](auto& bk, const Matrix&, const auto& o) {
        auto advect = bk.hadamard(o.u, o.du[0]);
        return bk.add(o.du[1], bk.sub(advect, bk.scale(o.d3u.at(0), 0.0025)));
    });
    return p;
}

ReferenceGrid fd_poisson_reference(std::size_t n) {
    if (n < 33) throw ConfigError("fd_poisson_reference: n must be at least 33");
    const std::size_t m = n - 2;
    const double h = 1.0 / static_cast<double>(n - 1);

    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = static_cast<double>(i) * h;

    // trapezoid weight of the indicator's closed interval [0.25, 0.75]
    auto wt = [](double s) {
        const double tol = 1e-12;
        if (std::abs(s - 0.25) <= tol || std::abs(s - 0.75) <= tol) return 0.5;
        return (s > 0.25 && s < 0.75) ? 1.0 : 0.0;
    };

    // CG on (−Δ_h)u = −f (SPD): matrix-free 5-point stencil
    std::vector<double> b(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            b[i * m + j] = -wt(xs[i + 1]) * wt(xs[j + 1]) * h * h;

    auto amul = [m](const std::vector<double>& v, std::vector<double>& out) {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                double acc = 4.0 * v[i * m + j];
                if (i > 0) acc -= v[(i - 1) * m + j];
                if (i + 1 < m) acc -= v[(i + 1) * m + j];
                if (j > 0) acc -= v[i * m + j - 1];
                if (j + 1 < m) acc -= v[i * m + j + 1];
                out[i * m + j] = acc;
            }
    };
    auto dot = [](const std::vector<double>& a, const std::vector<double>& c) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * c[k];
        return s;
    };

    std::vector<double> u(m * m, 0.0), r = b, p = b, ap(m * m);
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) throw NumericError("fd_poisson_reference: zero source");
    double rs = dot(r, r);
    bool converged = false;
    for (std::size_t it = 0; it < 40 * m; ++it) {
        amul(p, ap);
        const double alpha = rs / dot(p, ap);
        for (std::size_t k = 0; k < u.size(); ++k) {
            u[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        const double rs2 = dot(r, r);
        if (std::sqrt(rs2) < 1e-12 * bnorm) {
            converged = true;
            break;
        }
        const double beta = rs2 / rs;
        for (std::size_t k = 0; k < p.size(); ++k) p[k] = r[k] + beta * p[k];
        rs = rs2;
    }
    if (!converged) throw NumericError("fd_poisson_reference: conjugate gradient did not converge");

    ReferenceGrid g;
    g.axis0_name = "x";
    g.axis1_name = "y";
    g.axis0 = xs;
    g.axis1 = xs;
    g.values.assign(n * n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) g.values[(i + 1) * n + (j + 1)] = u[i * m + j];
    return g;
}

} // namespace xpinnlab
