#include "xpinnlab/linalg.hpp"

#include "xpinnlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace xpinnlab::linalg {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw ShapeError("from_rows: empty row list");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols()) throw ShapeError("from_rows: ragged rows");
        for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
    }
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("matmul: inner dimensions differ");
    Matrix out(a.rows(), b.cols());
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    // i-k-j order keeps the inner loop contiguous in both b and out.
    for (std::size_t i = 0; i < n; ++i) {
        double* orow = out.data() + i * m;
        const double* arow = a.data() + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            if (av == 0.0) continue;
            const double* brow = b.data() + p * m;
            for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
        }
    }
    return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw ShapeError("add: shape mismatch");
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
    return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw ShapeError("sub: shape mismatch");
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= b.data()[i];
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw ShapeError("hadamard: shape mismatch");
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= b.data()[i];
    return out;
}

Matrix scale(const Matrix& a, double c) {
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= c;
    return out;
}

double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * a.data()[i];
    return std::sqrt(s);
}

double max_abs(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a.data()[i]));
    return s;
}

namespace {

// GᵀG, symmetric positive semidefinite, n = cols(g).
Matrix gram(const Matrix& g) {
    const std::size_t n = g.cols(), m = g.rows();
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < m; ++r) acc += g(r, i) * g(r, j);
            s(i, j) = acc;
            s(j, i) = acc;
        }
    return s;
}

void jacobi_rotate(Matrix& s, std::size_t p, std::size_t q) {
    const double apq = s(p, q);
    if (apq == 0.0) return;
    const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                     (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double sn = t * c;
    const std::size_t n = s.rows();
    for (std::size_t k = 0; k < n; ++k) {
        const double skp = s(k, p), skq = s(k, q);
        s(k, p) = c * skp - sn * skq;
        s(k, q) = sn * skp + c * skq;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double spk = s(p, k), sqk = s(q, k);
        s(p, k) = c * spk - sn * sqk;
        s(q, k) = sn * spk + c * sqk;
    }
}

double off_diag_sq(const Matrix& s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = 0; j < s.cols(); ++j)
            if (i != j) acc += s(i, j) * s(i, j);
    return acc;
}

} // namespace

std::vector<double> symmetric_eigenvalues(const Matrix& sym) {
    if (sym.rows() != sym.cols()) throw ShapeError("symmetric_eigenvalues: matrix not square");
    Matrix s = sym;
    const std::size_t n = s.rows();
    const double frob = frobenius_norm(s);
    const double tol = (frob > 0.0 ? frob : 1.0) * 1e-15;
    for (int sweep = 0; sweep < 64 && off_diag_sq(s) > tol * tol; ++sweep)
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) jacobi_rotate(s, p, q);
    std::vector<double> evs(n);
    for (std::size_t i = 0; i < n; ++i) evs[i] = s(i, i);
    std::sort(evs.begin(), evs.end());
    return evs;
}

double spectral_norm(const Matrix& g) {
    if (g.rows() == 0 || g.cols() == 0) throw ShapeError("spectral_norm: empty matrix");
    if (max_abs(g) == 0.0) return 0.0;

    const Matrix s = gram(g);
    const std::size_t n = s.rows();

    // Seeded start; the constant seed keeps results reproducible everywhere.
    std::mt19937_64 rng(0x5eed5eedULL);
    std::vector<double> v(n);
    double vnorm = 0.0;
    for (auto& x : v) {
        x = static_cast<double>(rng() >> 11) * 0x1.0p-53 + 1e-3; // (0,1] biased off zero
        vnorm += x * x;
    }
    vnorm = std::sqrt(vnorm);
    for (auto& x : v) x /= vnorm;

    double rho_prev = -1.0;
    std::vector<double> w(n);
    for (int it = 0; it < 10000; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += s(i, j) * v[j];
            w[i] = acc;
        }
        double rho = 0.0, wn = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rho += v[i] * w[i]; // Rayleigh quotient, ‖v‖=1
            wn += w[i] * w[i];
        }
        wn = std::sqrt(wn);
        if (wn == 0.0) return 0.0; // v in the kernel: σ=0 component only
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
        if (rho_prev >= 0.0 && std::abs(rho - rho_prev) <= 1e-12 * std::max(rho, 1e-300))
            return std::sqrt(std::max(rho, 0.0));
        rho_prev = rho;
    }
    // Stalled (tight eigenvalue gap): exact fallback.
    const std::vector<double> evs = symmetric_eigenvalues(s);
    return std::sqrt(std::max(evs.back(), 0.0));
}

double norm_2_1(const Matrix& g) {
    if (g.rows() == 0 || g.cols() == 0) throw ShapeError("norm_2_1: empty matrix");
    double total = 0.0;
    for (std::size_t c = 0; c < g.cols(); ++c) {
        double col = 0.0;
        for (std::size_t r = 0; r < g.rows(); ++r) col += g(r, c) * g(r, c);
        total += std::sqrt(col);
    }
    return total;
}

double norm_1_inf(const Matrix& g) {
    if (g.rows() == 0 || g.cols() == 0) throw ShapeError("norm_1_inf: empty matrix");
    double best = 0.0;
    for (std::size_t r = 0; r < g.rows(); ++r) {
        double row = 0.0;
        for (std::size_t c = 0; c < g.cols(); ++c) row += std::abs(g(r, c));
        best = std::max(best, row);
    }
    return best;
}

} // namespace xpinnlab::linalg
