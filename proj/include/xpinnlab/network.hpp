#pragma once

#include "xpinnlab/activation.hpp"
#include "xpinnlab/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace xpinnlab {

/// Fully connected scalar-output network
///   u(x) = Wᴸ σ(Wᴸ⁻¹ σ(… σ(W¹x + b¹) …) + bᴸ⁻¹) + bᴸ
/// dims = (m₀, …, m_L) with m₀ the input dimension and m_L = 1.
struct Mlp {
    ActivationKind activation = ActivationKind::Tanh;
    std::vector<std::size_t> dims;
    std::vector<linalg::Matrix> weights; // W^l is m_l × m_{l−1}
    std::vector<linalg::Vector> biases;  // b^l has m_l entries

    std::size_t depth() const { return weights.size(); }          // L
    std::size_t input_dim() const { return dims.front(); }        // d
    std::size_t max_width() const;                                // h
    std::size_t param_count() const;
};

/// Glorot-uniform weights (limit √(6/(fan_in+fan_out))), zero biases,
/// deterministic for a given seed.
Mlp make_mlp(const std::vector<std::size_t>& dims, ActivationKind activation, std::uint64_t seed);

double forward(const Mlp& net, const linalg::Vector& x);

/// ∇u(x) via the layer-product form Wᴸ Φᴸ⁻¹ Wᴸ⁻¹ … Φ¹ W¹,
/// Φˡ = diag σ′(pre-activations).
linalg::Vector input_gradient(const Mlp& net, const linalg::Vector& x);

/// ∇²u(x) via the layer sum Σₗ Jˡᵀ diag(pˡ ⊙ σ″(aˡ)) Jˡ with Jˡ the
/// pre-activation Jacobians and pˡ the downstream gradient. Exact and
/// symmetric by construction.
linalg::Matrix input_hessian(const Mlp& net, const linalg::Vector& x);

/// Value and the first three derivatives of t ↦ u(x + t·e_axis) at t = 0.
struct Jet3 {
    double v = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
};

/// Forward-mode truncated Taylor propagation along one coordinate axis.
/// order selects how many derivatives the caller needs (1..3); anything
/// higher is rejected. The returned jet always carries all three.
Jet3 directional_jet(const Mlp& net, const linalg::Vector& x, std::size_t axis, int order);

/// ‖ |Wᴸ|·…·|W¹| ‖₁ — entrywise-absolute chain product, then the sum of the
/// resulting entries. Biases do not enter.
double path_norm(const Mlp& net);

/// Layer matrix with the bias folded in as an extra column [W | b];
/// used by the capacity computations when biases are included.
linalg::Matrix augmented_layer(const Mlp& net, std::size_t layer);

// Flat parameter vector order: per layer, W row-major then b.
linalg::Vector flatten_params(const Mlp& net);
void unflatten_params(Mlp& net, const linalg::Vector& flat);

std::string to_json(const Mlp& net);
Mlp mlp_from_json(const std::string& text);
void save_mlp(const Mlp& net, const std::string& path);
Mlp load_mlp(const std::string& path);

/// Deterministic stream-splitting helper: one base seed, many independent
/// substreams (network init, samplers, …).
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

/// u64 → [0,1) with the top 53 bits; identical on every platform.
double u64_to_unit(std::uint64_t bits);

} // namespace xpinnlab
