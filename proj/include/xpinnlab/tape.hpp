#pragma once

#include "xpinnlab/activation.hpp"
#include "xpinnlab/linalg.hpp"

#include <cstdint>
#include <vector>

namespace xpinnlab::ad {

/// Reverse-mode tape over matrix-valued primitives (matrix multiply,
/// elementwise combine, activation maps, reductions). Forward values are
/// computed eagerly when a node is recorded; `backward` replays adjoints in
/// reverse topological order. One tape serves one training step; several
/// roots may be differentiated on the same tape independently.
class Tape {
  public:
    using Id = std::int32_t;

    Id constant(linalg::Matrix value);
    Id param(linalg::Matrix value);

    Id matmul(Id a, Id b);
    Id add(Id a, Id b);
    Id sub(Id a, Id b);
    Id hadamard(Id a, Id b);
    Id scale(Id a, double c);
    /// a (m×n) + col (m×1) broadcast across columns.
    Id add_col(Id a, Id col);
    /// Elementwise σ^(order); order ≤ 3 so the backward pass (which needs
    /// order+1) stays within the analytic activation derivatives.
    Id act(Id a, ActivationKind kind, int order);
    /// Sum of all entries → 1×1.
    Id sum(Id a);
    /// Column k of a as an m×1 value.
    Id col(Id a, std::size_t k);

    const linalg::Matrix& value(Id id) const { return nodes_[id].value; }
    double scalar_value(Id id) const;
    std::size_t size() const { return nodes_.size(); }

    /// Adjoints of `params` w.r.t. the scalar root. Repeated calls with
    /// different roots are independent.
    std::vector<linalg::Matrix> gradients(Id root, const std::vector<Id>& params) const;

  private:
    enum class Op : std::uint8_t {
        Const, Param, MatMul, Add, Sub, Hadamard, Scale, AddCol, Act, Sum, Col
    };
    struct Node {
        Op op;
        Id a = -1, b = -1;
        double c = 0.0;
        std::size_t k = 0;
        ActivationKind act = ActivationKind::Tanh;
        int act_order = 0;
        bool needs_grad = false;
        linalg::Matrix value;
    };

    Id push(Node n, const char* what);
    bool grad_of(Id a, Id b = -1) const;

    std::vector<Node> nodes_;
};

} // namespace xpinnlab::ad
