#include "xpinnlab/domain.hpp"

#include "xpinnlab/errors.hpp"
#include "xpinnlab/network.hpp"
#include "xpinnlab/pde.hpp"

#include <cmath>
#include <random>

namespace xpinnlab::domain {

using linalg::Matrix;
using linalg::Vector;

double Box::face_measure(const Face& f) const {
    double m = 1.0;
    for (std::size_t k = 0; k < dim(); ++k)
        if (k != f.axis) m *= hi[k] - lo[k];
    return m;
}

bool Box::contains(const Vector& x, double tol) const {
    if (x.size() != dim()) return false;
    for (std::size_t k = 0; k < dim(); ++k)
        if (x[k] < lo[k] - tol || x[k] > hi[k] + tol) return false;
    return true;
}

std::size_t assign(const Decomposition& dec, const Vector& x) {
    for (std::size_t i = 0; i < dec.parts.size(); ++i)
        if (dec.parts[i].member(x)) return i;
    throw DomainError("assign: point belongs to no subdomain of '" + dec.name + "'");
}

Decomposition identity_decomposition() {
    Decomposition d;
    d.name = "identity";
    d.parts.push_back({"PINN", [](const Vector&) { return true; },
                       [](const Vector&, double) { return true; }});
    return d;
}

namespace {

// Half-plane split along one coordinate: low side owns the cut (ties to it).
Subdomain coord_low(std::string name, std::size_t axis, double cut) {
    return {std::move(name),
            [axis, cut](const Vector& x) { return x[axis] <= cut; },
            [axis, cut](const Vector& x, double tol) { return x[axis] <= cut + tol; }};
}

Subdomain coord_high(std::string name, std::size_t axis, double cut) {
    return {std::move(name),
            [axis, cut](const Vector& x) { return x[axis] > cut; },
            [axis, cut](const Vector& x, double tol) { return x[axis] >= cut - tol; }};
}

} // namespace

Decomposition builtin_decomposition(const std::string& name) {
    Decomposition d;
    d.name = name;
    if (name == "kdv") {
        // right subdomain first (x > −0.74), then left; the cut line itself
        // belongs to the left part.
        d.parts.push_back(coord_high("XPINN-R", 0, -0.74));
        d.parts.push_back(coord_low("XPINN-L", 0, -0.74));
        d.interfaces.push_back({0, 1, [](double t) { return Vector{-0.74, t}; }});
        return d;
    }
    if (name == "heat") {
        d.parts.push_back(coord_low("XPINN-B", 1, 0.5));
        d.parts.push_back(coord_high("XPINN-T", 1, 0.5));
        d.interfaces.push_back({0, 1, [](double t) { return Vector{-1.0 + 2.0 * t, 0.5}; }});
        return d;
    }
    if (name == "advection") {
        // bands of s = x − 0.5t; the middle band carries the transported pulse
        auto s = [](const Vector& x) { return x[0] - 0.5 * x[1]; };
        d.parts.push_back({"XPINN-L", [s](const Vector& x) { return s(x) <= -0.2; },
                           [s](const Vector& x, double tol) { return s(x) <= -0.2 + tol; }});
        d.parts.push_back({"XPINN-M",
                           [s](const Vector& x) { return s(x) > -0.2 && s(x) < 0.2; },
                           [s](const Vector& x, double tol) {
                               return s(x) >= -0.2 - tol && s(x) <= 0.2 + tol;
                           }});
        d.parts.push_back({"XPINN-R", [s](const Vector& x) { return s(x) >= 0.2; },
                           [s](const Vector& x, double tol) { return s(x) >= 0.2 - tol; }});
        d.interfaces.push_back({0, 1, [](double t) { return Vector{-0.2 + 0.5 * t, t}; }});
        d.interfaces.push_back({1, 2, [](double t) { return Vector{0.2 + 0.5 * t, t}; }});
        return d;
    }
    if (name == "poisson") {
        // the middle box owns its edge (lowest index wins ties)
        auto inbox = [](const Vector& x, double tol) {
            return x[0] >= 0.25 - tol && x[0] <= 0.75 + tol && x[1] >= 0.25 - tol &&
                   x[1] <= 0.75 + tol;
        };
        d.parts.push_back({"XPINN-M", [inbox](const Vector& x) { return inbox(x, 0.0); }, inbox});
        d.parts.push_back({"XPINN-A", [inbox](const Vector& x) { return !inbox(x, 0.0); },
                           [inbox](const Vector& x, double tol) {
                               return !inbox(x, -tol); // closure of the complement
                           }});
        d.interfaces.push_back({0, 1, [](double t) {
                                    const double s = t * 4.0;
                                    if (s < 1.0) return Vector{0.25 + 0.5 * s, 0.25};
                                    if (s < 2.0) return Vector{0.75, 0.25 + 0.5 * (s - 1.0)};
                                    if (s < 3.0) return Vector{0.75 - 0.5 * (s - 2.0), 0.75};
                                    return Vector{0.25, 0.75 - 0.5 * (s - 3.0)};
                                }});
        return d;
    }
    throw ConfigError("unknown decomposition: " + name);
}

TrainingSet sample(const PdeProblem& problem, const Decomposition& dec, SampleCounts counts,
                   std::uint64_t seed) {
    const Box& box = problem.box;
    const std::size_t d = box.dim();
    if (counts.n_boundary == 0 || counts.n_residual == 0)
        throw ConfigError("sample: boundary and residual counts must be positive");
    if (box.labeled_faces.empty()) throw ConfigError("sample: no labeled boundary faces");

    TrainingSet set;
    set.seed = seed;

    // in-(0,1) mapping keeps residual points strictly interior
    auto unit_open = [](std::uint64_t bits) {
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    };

    { // boundary: face by measure, then uniform on the face
        std::mt19937_64 rng(mix_seed(seed, 2));
        std::vector<double> cum;
        double total = 0.0;
        for (const Face& f : box.labeled_faces) {
            total += box.face_measure(f);
            cum.push_back(total);
        }
        set.boundary_x = Matrix(d, counts.n_boundary);
        set.boundary_g = Vector(counts.n_boundary);
        for (std::size_t p = 0; p < counts.n_boundary; ++p) {
            const double pick = u64_to_unit(rng()) * total;
            std::size_t fi = 0;
            while (fi + 1 < cum.size() && pick >= cum[fi]) ++fi;
            const Face& f = box.labeled_faces[fi];
            Vector x(d);
            for (std::size_t k = 0; k < d; ++k) {
                if (k == f.axis)
                    x[k] = f.high ? box.hi[k] : box.lo[k];
                else
                    x[k] = box.lo[k] + u64_to_unit(rng()) * (box.hi[k] - box.lo[k]);
            }
            for (std::size_t k = 0; k < d; ++k) set.boundary_x(k, p) = x[k];
            set.boundary_g[p] = problem.boundary_data ? problem.boundary_data(x) : 0.0;
        }
    }

    { // residual: uniform, strictly interior
        std::mt19937_64 rng(mix_seed(seed, 1));
        set.residual_x = Matrix(d, counts.n_residual);
        for (std::size_t p = 0; p < counts.n_residual; ++p)
            for (std::size_t k = 0; k < d; ++k)
                set.residual_x(k, p) = box.lo[k] + unit_open(rng()) * (box.hi[k] - box.lo[k]);
    }

    { // interfaces: uniform curve parameters
        std::size_t n_i = counts.n_interface;
        if (n_i == 0)
            n_i = problem.name == "kdv" ? 10000
                                        : std::max<std::size_t>(64, counts.n_residual / 10);
        for (std::size_t k = 0; k < dec.interfaces.size(); ++k) {
            std::mt19937_64 rng(mix_seed(seed, 100 + k));
            Matrix pts(d, n_i);
            for (std::size_t p = 0; p < n_i; ++p) {
                const Vector x = dec.interfaces[k].curve(u64_to_unit(rng()));
                if (x.size() != d) throw ShapeError("interface curve dimension mismatch");
                for (std::size_t a = 0; a < d; ++a) pts(a, p) = x[a];
            }
            set.interface_x.push_back(std::move(pts));
        }
    }

    { // partition by subdomain
        const std::size_t parts = dec.size();
        std::vector<std::vector<std::size_t>> bidx(parts), ridx(parts);
        for (std::size_t p = 0; p < set.n_boundary(); ++p) {
            Vector x(d);
            for (std::size_t k = 0; k < d; ++k) x[k] = set.boundary_x(k, p);
            bidx[assign(dec, x)].push_back(p);
        }
        for (std::size_t p = 0; p < set.n_residual(); ++p) {
            Vector x(d);
            for (std::size_t k = 0; k < d; ++k) x[k] = set.residual_x(k, p);
            ridx[assign(dec, x)].push_back(p);
        }
        for (std::size_t i = 0; i < parts; ++i) {
            Matrix bx(d, bidx[i].size());
            Vector bg(bidx[i].size());
            for (std::size_t q = 0; q < bidx[i].size(); ++q) {
                for (std::size_t k = 0; k < d; ++k) bx(k, q) = set.boundary_x(k, bidx[i][q]);
                bg[q] = set.boundary_g[bidx[i][q]];
            }
            set.boundary_part_x.push_back(std::move(bx));
            set.boundary_part_g.push_back(std::move(bg));
            Matrix rx(d, ridx[i].size());
            for (std::size_t q = 0; q < ridx[i].size(); ++q)
                for (std::size_t k = 0; k < d; ++k) rx(k, q) = set.residual_x(k, ridx[i][q]);
            set.residual_part_x.push_back(std::move(rx));
        }
    }
    return set;
}

} // namespace xpinnlab::domain
