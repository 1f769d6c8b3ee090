#pragma once

#include "xpinnlab/linalg.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace xpinnlab {
struct PdeProblem;
}

namespace xpinnlab::domain {

/// One axis-aligned boundary face (x_axis pinned at lo or hi).
struct Face {
    std::size_t axis;
    bool high;
};

/// Axis-aligned box with the boundary faces that carry data labeled.
struct Box {
    linalg::Vector lo, hi;
    std::vector<Face> labeled_faces;

    std::size_t dim() const { return lo.size(); }
    double face_measure(const Face& f) const; // product of the other extents
    bool contains(const linalg::Vector& x, double tol = 0.0) const;
};

struct Subdomain {
    std::string name;
    /// Exact membership; the subdomains of a decomposition partition the box.
    std::function<bool(const linalg::Vector&)> member;
    /// Closure membership with tolerance (interface points satisfy this for
    /// both adjacent subdomains).
    std::function<bool(const linalg::Vector&, double)> closure;
};

/// Shared boundary between two subdomains, as a parametrized curve.
struct Interface {
    std::size_t i, j;
    std::function<linalg::Vector(double)> curve; // t ∈ [0,1] → point
};

struct Decomposition {
    std::string name;
    std::vector<Subdomain> parts;
    std::vector<Interface> interfaces;
    std::size_t size() const { return parts.size(); }
};

/// Index of the subdomain owning x: the first accepting membership
/// predicate, so genuine ties resolve to the lowest index.
std::size_t assign(const Decomposition& dec, const linalg::Vector& x);

/// Single subdomain covering everything, no interfaces (the PINN case).
Decomposition identity_decomposition();

/// Named splits used by the benchmarks:
///  - "kdv":       x ≷ −0.74 on [−1,1]×[0,1]        (parts R, L)
///  - "heat":      t ≶ 0.5 on [−1,1]×[0,1]          (parts B, T)
///  - "advection": x−0.5t bands at ∓0.2              (parts L, M, R)
///  - "poisson":   [0.25,0.75]² and its complement    (parts M, A)
Decomposition builtin_decomposition(const std::string& name);

struct SampleCounts {
    std::size_t n_boundary = 0;
    std::size_t n_residual = 0;
    /// Points per interface; 0 picks the default rule (10000 for the KdV
    /// problem, max(64, n_residual/10) otherwise).
    std::size_t n_interface = 0;
};

/// Training data: full point sets plus their partition across subdomains.
struct TrainingSet {
    std::uint64_t seed = 0;
    linalg::Matrix boundary_x; // d×n_b
    linalg::Vector boundary_g;
    linalg::Matrix residual_x; // d×n_r
    std::vector<linalg::Matrix> interface_x; // one d×n_I block per interface

    std::vector<linalg::Matrix> boundary_part_x; // per subdomain
    std::vector<linalg::Vector> boundary_part_g;
    std::vector<linalg::Matrix> residual_part_x;

    std::size_t n_boundary() const { return boundary_x.cols(); }
    std::size_t n_residual() const { return residual_x.cols(); }
    std::size_t n_boundary_of(std::size_t part) const { return boundary_part_x[part].cols(); }
    std::size_t n_residual_of(std::size_t part) const { return residual_part_x[part].cols(); }
};

/// Draw boundary points on labeled faces (face chosen with probability
/// proportional to its measure), residual points uniformly in the interior,
/// and interface points uniformly along each interface curve. Deterministic
/// per seed; partitions the boundary/residual sets by `assign`.
TrainingSet sample(const PdeProblem& problem, const Decomposition& dec, SampleCounts counts,
                   std::uint64_t seed);

} // namespace xpinnlab::domain
