#include "xpinnlab/bounds.hpp"
#include "xpinnlab/errors.hpp"
#include "xpinnlab/evalrep.hpp"
#include "xpinnlab/network.hpp"
#include "xpinnlab/pde.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace xpinnlab;

namespace {

linalg::Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw ShapeError("matrix needs at least one row");
    linalg::Matrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols()) throw ShapeError("ragged matrix rows");
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

std::vector<std::vector<double>> rows_of(const linalg::Matrix& m) {
    std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

PdeProblem bench_traits(const std::string& benchmark) {
    PdeProblem traits;
    traits.name = benchmark;
    traits.k_bound = 1.0;
    traits.out_of_assumption = benchmark == "kdv";
    return traits;
}

py::dict report_dict(const bounds::BoundReport& r) {
    py::dict d;
    d["model"] = r.model;
    d["n_b"] = r.n_b;
    d["n_r"] = r.n_r;
    d["delta"] = r.delta;
    d["delta_mn"] = r.delta_mn;
    d["boundary"] = r.boundary ? py::object(py::float_(*r.boundary)) : py::object(py::none());
    d["residual"] = r.residual;
    d["l2"] = r.l2;
    d["caps_m"] = r.caps.m;
    d["caps_n"] = r.caps.n;
    d["complexity_spectral"] = r.complexity.spectral_product;
    d["complexity_full"] = r.complexity.full_product;
    d["out_of_assumption"] = r.out_of_assumption;
    return d;
}

py::dict prior_dict(const bounds::PriorComparison& c) {
    py::dict d;
    d["single"] = c.pinn_q;
    d["decomposed"] = c.xpinn_q;
    d["verdict"] = c.verdict;
    return d;
}

} // namespace

PYBIND11_MODULE(xpinnlab, m) {
    m.doc() = "physics-informed network lab: networks, derivatives and generalization bounds";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<Mlp>(m, "Mlp")
        .def_property_readonly("dims", [](const Mlp& net) { return net.dims; })
        .def_property_readonly("depth", &Mlp::depth)
        .def_property_readonly("activation",
                               [](const Mlp& net) { return activation_name(net.activation); })
        .def("param_count", &Mlp::param_count);

    m.def(
        "make_mlp",
        [](const std::vector<std::size_t>& dims, const std::string& activation,
           std::uint64_t seed) { return make_mlp(dims, activation_from_name(activation), seed); },
        py::arg("dims"), py::arg("activation") = "tanh", py::arg("seed") = 0);
    m.def("save_mlp", &save_mlp, py::arg("net"), py::arg("path"));
    m.def("load_mlp", &load_mlp, py::arg("path"));

    m.def(
        "forward", [](const Mlp& net, const linalg::Vector& x) { return forward(net, x); },
        py::arg("net"), py::arg("x"));
    m.def(
        "input_gradient",
        [](const Mlp& net, const linalg::Vector& x) { return input_gradient(net, x); },
        py::arg("net"), py::arg("x"));
    m.def(
        "input_hessian",
        [](const Mlp& net, const linalg::Vector& x) { return rows_of(input_hessian(net, x)); },
        py::arg("net"), py::arg("x"));
    m.def(
        "directional_jet",
        [](const Mlp& net, const linalg::Vector& x, std::size_t axis, int order) {
            const Jet3 j = directional_jet(net, x, axis, order);
            return py::make_tuple(j.v, j.d1, j.d2, j.d3);
        },
        py::arg("net"), py::arg("x"), py::arg("axis"), py::arg("order") = 3);
    m.def("path_norm", &path_norm, py::arg("net"));

    m.def(
        "spectral_norm",
        [](const std::vector<std::vector<double>>& rows) {
            return linalg::spectral_norm(matrix_from_rows(rows));
        },
        py::arg("rows"));
    m.def(
        "norm_2_1",
        [](const std::vector<std::vector<double>>& rows) {
            return linalg::norm_2_1(matrix_from_rows(rows));
        },
        py::arg("rows"));

    m.def(
        "bound_report",
        [](const Mlp& net, const std::string& benchmark, std::size_t n_b, std::size_t n_r,
           double delta, double c1, bool include_bias) {
            return report_dict(bounds::bound_report(net, bench_traits(benchmark), n_b, n_r, delta,
                                                    c1, include_bias, "net"));
        },
        py::arg("net"), py::arg("benchmark") = "poisson", py::arg("n_b") = 100,
        py::arg("n_r") = 1000, py::arg("delta") = 0.1, py::arg("c1") = 1.0,
        py::arg("include_bias") = true);

    m.def(
        "prior_compare_broken_line",
        [](double a, double b) {
            return prior_dict(
                bounds::prior_compare(bounds::broken_line_target(a, b), 1000, {500, 500}, true));
        },
        py::arg("a") = 2.0, py::arg("b") = 1.0,
        "Closed-form prior comparison: a·sin x + b·sin y on two perpendicular segments.");
    m.def(
        "prior_compare_diagonal",
        [](double a, double b) {
            return prior_dict(
                bounds::prior_compare(bounds::diagonal_target(a, b), 1000, {500, 500}, true));
        },
        py::arg("a") = 2.0, py::arg("b") = 0.5,
        "Closed-form prior comparison: segment plus diagonal-segment split.");
    m.def("prior_crossover_q", &bounds::prior_crossover_q, py::arg("lo") = 0.0,
          py::arg("hi") = 2.0, py::arg("tol") = 1e-8,
          "Amplitude where the decomposed prior norm overtakes the single-net one.");

    m.def("format_sci", &evalrep::format_sci, py::arg("value"));
    m.def("mix_seed", &mix_seed, py::arg("base"), py::arg("stream"));
}
