#include "xpinnlab/tape.hpp"

#include "xpinnlab/errors.hpp"

#include <cmath>
#include <string>

namespace xpinnlab::ad {

using linalg::Matrix;

namespace {

void check_finite(const Matrix& m, const char* what, std::size_t node) {
    for (std::size_t i = 0; i < m.size(); ++i)
        if (!std::isfinite(m.data()[i]))
            throw NumericError(std::string("numeric overflow: primitive '") + what +
                               "' produced a non-finite value (tape node " +
                               std::to_string(node) + ")");
}

} // namespace

Tape::Id Tape::push(Node n, const char* what) {
    check_finite(n.value, what, nodes_.size());
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size() - 1);
}

bool Tape::grad_of(Id a, Id b) const {
    return nodes_[a].needs_grad || (b >= 0 && nodes_[b].needs_grad);
}

Tape::Id Tape::constant(Matrix value) {
    Node n;
    n.op = Op::Const;
    n.value = std::move(value);
    return push(std::move(n), "constant");
}

Tape::Id Tape::param(Matrix value) {
    Node n;
    n.op = Op::Param;
    n.needs_grad = true;
    n.value = std::move(value);
    return push(std::move(n), "param");
}

Tape::Id Tape::matmul(Id a, Id b) {
    Node n;
    n.op = Op::MatMul;
    n.a = a;
    n.b = b;
    n.needs_grad = grad_of(a, b);
    n.value = linalg::matmul(nodes_[a].value, nodes_[b].value);
    return push(std::move(n), "matmul");
}

Tape::Id Tape::add(Id a, Id b) {
    Node n;
    n.op = Op::Add;
    n.a = a;
    n.b = b;
    n.needs_grad = grad_of(a, b);
    n.value = linalg::add(nodes_[a].value, nodes_[b].value);
    return push(std::move(n), "add");
}

Tape::Id Tape::sub(Id a, Id b) {
    Node n;
    n.op = Op::Sub;
    n.a = a;
    n.b = b;
    n.needs_grad = grad_of(a, b);
    n.value = linalg::sub(nodes_[a].value, nodes_[b].value);
    return push(std::move(n), "sub");
}

Tape::Id Tape::hadamard(Id a, Id b) {
    Node n;
    n.op = Op::Hadamard;
    n.a = a;
    n.b = b;
    n.needs_grad = grad_of(a, b);
    n.value = linalg::hadamard(nodes_[a].value, nodes_[b].value);
    return push(std::move(n), "hadamard");
}

Tape::Id Tape::scale(Id a, double c) {
    Node n;
    n.op = Op::Scale;
    n.a = a;
    n.c = c;
    n.needs_grad = grad_of(a);
    n.value = linalg::scale(nodes_[a].value, c);
    return push(std::move(n), "scale");
}

Tape::Id Tape::add_col(Id a, Id col) {
    const Matrix& av = nodes_[a].value;
    const Matrix& cv = nodes_[col].value;
    if (cv.cols() != 1 || cv.rows() != av.rows()) throw ShapeError("add_col: bias shape mismatch");
    Node n;
    n.op = Op::AddCol;
    n.a = a;
    n.b = col;
    n.needs_grad = grad_of(a, col);
    Matrix out = av;
    for (std::size_t r = 0; r < out.rows(); ++r) {
        const double c = cv(r, 0);
        for (std::size_t j = 0; j < out.cols(); ++j) out(r, j) += c;
    }
    n.value = std::move(out);
    return push(std::move(n), "add_col");
}

Tape::Id Tape::act(Id a, ActivationKind kind, int order) {
    if (order < 0 || order > 3)
        throw UnsupportedError("tape activation order must be in [0,3]");
    const Matrix& av = nodes_[a].value;
    Node n;
    n.op = Op::Act;
    n.a = a;
    n.act = kind;
    n.act_order = order;
    n.needs_grad = grad_of(a);
    Matrix out(av.rows(), av.cols());
    for (std::size_t i = 0; i < av.size(); ++i)
        out.data()[i] = activation_eval(kind, order, av.data()[i]);
    n.value = std::move(out);
    return push(std::move(n), "act");
}

Tape::Id Tape::sum(Id a) {
    const Matrix& av = nodes_[a].value;
    Node n;
    n.op = Op::Sum;
    n.a = a;
    n.needs_grad = grad_of(a);
    Matrix out(1, 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) acc += av.data()[i];
    out(0, 0) = acc;
    n.value = std::move(out);
    return push(std::move(n), "sum");
}

Tape::Id Tape::col(Id a, std::size_t k) {
    const Matrix& av = nodes_[a].value;
    if (k >= av.cols()) throw ShapeError("col: index out of range");
    Node n;
    n.op = Op::Col;
    n.a = a;
    n.k = k;
    n.needs_grad = grad_of(a);
    Matrix out(av.rows(), 1);
    for (std::size_t r = 0; r < av.rows(); ++r) out(r, 0) = av(r, k);
    n.value = std::move(out);
    return push(std::move(n), "col");
}

double Tape::scalar_value(Id id) const {
    const Matrix& v = nodes_[id].value;
    if (v.rows() != 1 || v.cols() != 1) throw ShapeError("scalar_value: node is not 1×1");
    return v(0, 0);
}

std::vector<Matrix> Tape::gradients(Id root, const std::vector<Id>& params) const {
    const Matrix& rv = nodes_[root].value;
    if (rv.rows() != 1 || rv.cols() != 1) throw ShapeError("gradients: root must be scalar");

    std::vector<Matrix> adj(nodes_.size());
    auto touch = [&](Id id) -> Matrix& {
        if (adj[id].size() == 0)
            adj[id] = Matrix(nodes_[id].value.rows(), nodes_[id].value.cols());
        return adj[id];
    };
    auto live = [&](Id id) { return id >= 0 && nodes_[id].needs_grad; };

    touch(root)(0, 0) = 1.0;
    for (Id i = root; i >= 0; --i) {
        const Node& n = nodes_[i];
        if (!n.needs_grad || adj[i].size() == 0) continue;
        const Matrix& g = adj[i];
        switch (n.op) {
            case Op::Const:
            case Op::Param:
                break;
            case Op::MatMul: {
                if (live(n.a)) {
                    // dA += G·Bᵀ
                    Matrix& da = touch(n.a);
                    const Matrix& bv = nodes_[n.b].value;
                    for (std::size_t r = 0; r < da.rows(); ++r)
                        for (std::size_t c = 0; c < da.cols(); ++c) {
                            double acc = 0.0;
                            for (std::size_t j = 0; j < g.cols(); ++j) acc += g(r, j) * bv(c, j);
                            da(r, c) += acc;
                        }
                }
                if (live(n.b)) {
                    // dB += Aᵀ·G
                    Matrix& db = touch(n.b);
                    const Matrix& av = nodes_[n.a].value;
                    for (std::size_t p = 0; p < av.rows(); ++p)
                        for (std::size_t r = 0; r < db.rows(); ++r) {
                            const double apr = av(p, r);
                            if (apr == 0.0) continue;
                            for (std::size_t c = 0; c < db.cols(); ++c)
                                db(r, c) += apr * g(p, c);
                        }
                }
                break;
            }
            case Op::Add:
                if (live(n.a)) {
                    Matrix& da = touch(n.a);
                    for (std::size_t k = 0; k < g.size(); ++k) da.data()[k] += g.data()[k];
                }
                if (live(n.b)) {
                    Matrix& db = touch(n.b);
                    for (std::size_t k = 0; k < g.size(); ++k) db.data()[k] += g.data()[k];
                }
                break;
            case Op::Sub:
                if (live(n.a)) {
                    Matrix& da = touch(n.a);
                    for (std::size_t k = 0; k < g.size(); ++k) da.data()[k] += g.data()[k];
                }
                if (live(n.b)) {
                    Matrix& db = touch(n.b);
                    for (std::size_t k = 0; k < g.size(); ++k) db.data()[k] -= g.data()[k];
                }
                break;
            case Op::Hadamard:
                if (live(n.a)) {
                    Matrix& da = touch(n.a);
                    const Matrix& bv = nodes_[n.b].value;
                    for (std::size_t k = 0; k < g.size(); ++k) da.data()[k] += g.data()[k] * bv.data()[k];
                }
                if (live(n.b)) {
                    Matrix& db = touch(n.b);
                    const Matrix& av = nodes_[n.a].value;
                    for (std::size_t k = 0; k < g.size(); ++k) db.data()[k] += g.data()[k] * av.data()[k];
                }
                break;
            case Op::Scale:
                if (live(n.a)) {
                    Matrix& da = touch(n.a);
                    for (std::size_t k = 0; k < g.size(); ++k) da.data()[k] += n.c * g.data()[k];
                }
                break;
            case Op::AddCol:
                if (live(n.a)) {
                    Matrix& da = touch(n.a);
                    for (std::size_t k = 0; k < g.size(); ++k) da.data()[k] += g.data()[k];
                }
                if (live(n.b)) {
                    Matrix& db = touch(n.b);
                    for (std::size_t r = 0; r < g.rows(); ++r) {
                        double acc = 0.0;
                        for (std::size_t j = 0; j < g.cols(); ++j) acc += g(r, j);
                        db(r, 0) += acc;
                    }
                }
                break;
            case Op::Act:
                if (live(n.a)) {
                    Matrix& da = touch(n.a);
                    const Matrix& av = nodes_[n.a].value;
                    for (std::size_t k = 0; k < g.size(); ++k)
                        da.data()[k] += g.data()[k] *
                                        activation_eval(n.act, n.act_order + 1, av.data()[k]);
                }
                break;
            case Op::Sum:
                if (live(n.a)) {
                    Matrix& da = touch(n.a);
                    const double gs = g(0, 0);
                    for (std::size_t k = 0; k < da.size(); ++k) da.data()[k] += gs;
                }
                break;
            case Op::Col:
                if (live(n.a)) {
                    Matrix& da = touch(n.a);
                    for (std::size_t r = 0; r < g.rows(); ++r) da(r, n.k) += g(r, 0);
                }
                break;
        }
    }

    std::vector<Matrix> out;
    out.reserve(params.size());
    for (Id p : params) {
        if (adj[p].size() == 0)
            out.emplace_back(nodes_[p].value.rows(), nodes_[p].value.cols());
        else
            out.push_back(std::move(adj[p]));
    }
    return out;
}

} // namespace xpinnlab::ad
