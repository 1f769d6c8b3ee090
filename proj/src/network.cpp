#include "xpinnlab/network.hpp"

#include "xpinnlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace xpinnlab {

using linalg::Matrix;
using linalg::Vector;

std::size_t Mlp::max_width() const {
    return *std::max_element(dims.begin(), dims.end());
}

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    // splitmix64 finalizer over (base, stream)
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double u64_to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

Mlp make_mlp(const std::vector<std::size_t>& dims, ActivationKind activation, std::uint64_t seed) {
    if (dims.size() < 2) throw ShapeError("make_mlp: need at least input and output dims");
    for (std::size_t m : dims)
        if (m == 0) throw ShapeError("make_mlp: zero-width layer");
    if (dims.back() != 1) throw ShapeError("make_mlp: scalar output required (last dim must be 1)");

    Mlp net;
    net.activation = activation;
    net.dims = dims;
    std::mt19937_64 rng(mix_seed(seed, 0x1e17));
    for (std::size_t l = 1; l < dims.size(); ++l) {
        const std::size_t fan_out = dims[l], fan_in = dims[l - 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Matrix w(fan_out, fan_in);
        for (std::size_t i = 0; i < w.size(); ++i)
            w.data()[i] = (2.0 * u64_to_unit(rng()) - 1.0) * limit;
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(fan_out, 0.0);
    }
    return net;
}

namespace {

void check_point(const Mlp& net, const Vector& x) {
    if (x.size() != net.input_dim()) throw ShapeError("point dimension does not match network input");
}

// Pre-activations a^l (l = 1..L−1) and hidden outputs z^l; z^0 = x.
struct ForwardTrace {
    std::vector<Vector> a; // a[l] = pre-activation of hidden layer l+1 (0-based)
    std::vector<Vector> z; // z[0] = x, z[l] = σ(a[l-1])
    double u = 0.0;
};

ForwardTrace run_forward(const Mlp& net, const Vector& x) {
    ForwardTrace tr;
    tr.z.push_back(x);
    const std::size_t L = net.depth();
    Vector cur = x;
    for (std::size_t l = 0; l + 1 < L; ++l) {
        const Matrix& w = net.weights[l];
        Vector a(w.rows());
        for (std::size_t i = 0; i < w.rows(); ++i) {
            double acc = net.biases[l][i];
            for (std::size_t j = 0; j < w.cols(); ++j) acc += w(i, j) * cur[j];
            a[i] = acc;
        }
        Vector z(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            z[i] = activation_eval(net.activation, 0, a[i]);
        tr.a.push_back(std::move(a));
        tr.z.push_back(z);
        cur = std::move(z);
    }
    const Matrix& wl = net.weights[L - 1];
    double u = net.biases[L - 1][0];
    for (std::size_t j = 0; j < wl.cols(); ++j) u += wl(0, j) * cur[j];
    tr.u = u;
    return tr;
}

} // namespace

double forward(const Mlp& net, const Vector& x) {
    check_point(net, x);
    return run_forward(net, x).u;
}

Vector input_gradient(const Mlp& net, const Vector& x) {
    check_point(net, x);
    const ForwardTrace tr = run_forward(net, x);
    const std::size_t L = net.depth();
    // v starts as W^L and absorbs Φ^l W^l from the top down.
    Vector v(net.weights[L - 1].cols());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = net.weights[L - 1](0, j);
    for (std::size_t l = L - 1; l-- > 0;) {
        const Matrix& w = net.weights[l];
        Vector nv(w.cols(), 0.0);
        for (std::size_t i = 0; i < w.rows(); ++i) {
            const double vi = v[i] * activation_eval(net.activation, 1, tr.a[l][i]);
            for (std::size_t j = 0; j < w.cols(); ++j) nv[j] += vi * w(i, j);
        }
        v = std::move(nv);
    }
    return v;
}

Matrix input_hessian(const Mlp& net, const Vector& x) {
    check_point(net, x);
    const ForwardTrace tr = run_forward(net, x);
    const std::size_t L = net.depth(), d = net.input_dim();
    Matrix h(d, d);
    if (L == 1) return h; // affine map

    // J[l] = ∂a^l/∂x, built bottom-up.
    std::vector<Matrix> jac(L - 1);
    jac[0] = net.weights[0];
    for (std::size_t l = 1; l + 1 <= L - 1; ++l) {
        const Matrix& w = net.weights[l];
        const Matrix& prev = jac[l - 1];
        Matrix cur(w.rows(), d);
        for (std::size_t i = 0; i < w.rows(); ++i)
            for (std::size_t j = 0; j < w.cols(); ++j) {
                const double wij = w(i, j) * activation_eval(net.activation, 1, tr.a[l - 1][j]);
                if (wij == 0.0) continue;
                for (std::size_t k = 0; k < d; ++k) cur(i, k) += wij * prev(j, k);
            }
        jac[l] = std::move(cur);
    }

    // p^l = ∂u/∂z^l, built top-down; accumulate Jᵀ diag(p ⊙ σ″(a)) J.
    Vector p(net.weights[L - 1].cols());
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = net.weights[L - 1](0, j);
    for (std::size_t l = L - 1; l-- > 0;) {
        const Matrix& jl = jac[l];
        for (std::size_t i = 0; i < jl.rows(); ++i) {
            const double di = p[i] * activation_eval(net.activation, 2, tr.a[l][i]);
            if (di == 0.0) continue;
            for (std::size_t r = 0; r < d; ++r) {
                const double jir = jl(i, r);
                if (jir == 0.0) continue;
                for (std::size_t c = r; c < d; ++c) h(r, c) += di * jir * jl(i, c);
            }
        }
        if (l > 0) {
            const Matrix& w = net.weights[l];
            Vector np(w.cols(), 0.0);
            for (std::size_t i = 0; i < w.rows(); ++i) {
                const double pi = p[i] * activation_eval(net.activation, 1, tr.a[l][i]);
                for (std::size_t j = 0; j < w.cols(); ++j) np[j] += pi * w(i, j);
            }
            p = std::move(np);
        }
    }
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < r; ++c) h(r, c) = h(c, r); // exact symmetry
    return h;
}

namespace {

struct JetV {
    double v, d1, d2, d3;
};

// σ composed with an inner jet (Faà di Bruno truncated at order 3).
JetV jet_activate(ActivationKind k, const JetV& f) {
    const double s0 = activation_eval(k, 0, f.v);
    const double s1 = activation_eval(k, 1, f.v);
    const double s2 = activation_eval(k, 2, f.v);
    const double s3 = activation_eval(k, 3, f.v);
    JetV g;
    g.v = s0;
    g.d1 = s1 * f.d1;
    g.d2 = s2 * f.d1 * f.d1 + s1 * f.d2;
    g.d3 = s3 * f.d1 * f.d1 * f.d1 + 3.0 * s2 * f.d1 * f.d2 + s1 * f.d3;
    return g;
}

} // namespace

Jet3 directional_jet(const Mlp& net, const Vector& x, std::size_t axis, int order) {
    check_point(net, x);
    if (axis >= net.input_dim()) throw ShapeError("directional_jet: axis out of range");
    if (order < 1 || order > 3)
        throw UnsupportedError("directional_jet: derivative order must be 1, 2 or 3");

    std::vector<JetV> cur(net.input_dim());
    for (std::size_t j = 0; j < x.size(); ++j)
        cur[j] = {x[j], j == axis ? 1.0 : 0.0, 0.0, 0.0};

    const std::size_t L = net.depth();
    for (std::size_t l = 0; l < L; ++l) {
        const Matrix& w = net.weights[l];
        std::vector<JetV> nxt(w.rows());
        for (std::size_t i = 0; i < w.rows(); ++i) {
            JetV acc{net.biases[l][i], 0.0, 0.0, 0.0};
            for (std::size_t j = 0; j < w.cols(); ++j) {
                const double wij = w(i, j);
                acc.v += wij * cur[j].v;
                acc.d1 += wij * cur[j].d1;
                acc.d2 += wij * cur[j].d2;
                acc.d3 += wij * cur[j].d3;
            }
            nxt[i] = (l + 1 < L) ? jet_activate(net.activation, acc) : acc;
        }
        cur = std::move(nxt);
    }
    return {cur[0].v, cur[0].d1, cur[0].d2, cur[0].d3};
}

double path_norm(const Mlp& net) {
    Matrix acc(net.weights[0].rows(), net.weights[0].cols());
    for (std::size_t i = 0; i < acc.size(); ++i) acc.data()[i] = std::abs(net.weights[0].data()[i]);
    for (std::size_t l = 1; l < net.depth(); ++l) {
        Matrix wa(net.weights[l].rows(), net.weights[l].cols());
        for (std::size_t i = 0; i < wa.size(); ++i) wa.data()[i] = std::abs(net.weights[l].data()[i]);
        acc = linalg::matmul(wa, acc);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < acc.size(); ++i) s += acc.data()[i];
    return s;
}

Matrix augmented_layer(const Mlp& net, std::size_t layer) {
    if (layer >= net.depth()) throw ShapeError("augmented_layer: layer index out of range");
    const Matrix& w = net.weights[layer];
    Matrix out(w.rows(), w.cols() + 1);
    for (std::size_t r = 0; r < w.rows(); ++r) {
        for (std::size_t c = 0; c < w.cols(); ++c) out(r, c) = w(r, c);
        out(r, w.cols()) = net.biases[layer][r];
    }
    return out;
}

Vector flatten_params(const Mlp& net) {
    Vector flat;
    flat.reserve(net.param_count());
    for (std::size_t l = 0; l < net.depth(); ++l) {
        const Matrix& w = net.weights[l];
        flat.insert(flat.end(), w.data(), w.data() + w.size());
        flat.insert(flat.end(), net.biases[l].begin(), net.biases[l].end());
    }
    return flat;
}

void unflatten_params(Mlp& net, const Vector& flat) {
    if (flat.size() != net.param_count()) throw ShapeError("unflatten_params: length mismatch");
    std::size_t pos = 0;
    for (std::size_t l = 0; l < net.depth(); ++l) {
        Matrix& w = net.weights[l];
        std::copy(flat.begin() + pos, flat.begin() + pos + w.size(), w.data());
        pos += w.size();
        std::copy(flat.begin() + pos, flat.begin() + pos + net.biases[l].size(), net.biases[l].begin());
        pos += net.biases[l].size();
    }
}

std::string to_json(const Mlp& net) {
    nlohmann::json j;
    j["activation"] = activation_name(net.activation);
    j["dims"] = net.dims;
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < net.depth(); ++l) {
        nlohmann::json layer;
        layer["w"] = std::vector<double>(net.weights[l].data(),
                                         net.weights[l].data() + net.weights[l].size());
        layer["b"] = net.biases[l];
        layers.push_back(std::move(layer));
    }
    j["layers"] = std::move(layers);
    return j.dump(2);
}

Mlp mlp_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("network json: ") + e.what());
    }
    try {
        Mlp net;
        net.activation = activation_from_name(j.at("activation").get<std::string>());
        net.dims = j.at("dims").get<std::vector<std::size_t>>();
        if (net.dims.size() < 2 || net.dims.back() != 1)
            throw ParseError("network json: bad dims");
        const auto& layers = j.at("layers");
        if (layers.size() + 1 != net.dims.size())
            throw ParseError("network json: layer count does not match dims");
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const std::size_t rows = net.dims[l + 1], cols = net.dims[l];
            auto wv = layers[l].at("w").get<std::vector<double>>();
            auto bv = layers[l].at("b").get<std::vector<double>>();
            if (wv.size() != rows * cols || bv.size() != rows)
                throw ParseError("network json: layer size mismatch");
            Matrix w(rows, cols);
            std::copy(wv.begin(), wv.end(), w.data());
            net.weights.push_back(std::move(w));
            net.biases.push_back(std::move(bv));
        }
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("network json: ") + e.what());
    }
}

void save_mlp(const Mlp& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open for write: " + path);
    out << to_json(net) << '\n';
}

Mlp load_mlp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return mlp_from_json(ss.str());
}

} // namespace xpinnlab
