#pragma once

// Test-only reference implementations. Nothing here calls into the library's
// simulation or differentiation code paths.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "qpinn/quantum.hpp"

namespace qpinn::test {

using cplx = std::complex<double>;

struct Dense {
    std::size_t n{0};
    std::vector<cplx> a;  // row-major n x n
    explicit Dense(std::size_t size = 0) : n(size), a(size * size) {}
    cplx& operator()(std::size_t r, std::size_t c) { return a[r * n + c]; }
    cplx operator()(std::size_t r, std::size_t c) const { return a[r * n + c]; }
};

inline Dense identity(std::size_t n) {
    Dense d(n);
    for (std::size_t i = 0; i < n; ++i) d(i, i) = 1.0;
    return d;
}

inline Dense kron(const Dense& a, const Dense& b) {
    Dense out(a.n * b.n);
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = 0; j < a.n; ++j)
            for (std::size_t k = 0; k < b.n; ++k)
                for (std::size_t l = 0; l < b.n; ++l) out(i * b.n + k, j * b.n + l) = a(i, j) * b(k, l);
    return out;
}

inline Dense add(const Dense& a, const Dense& b) {
    Dense out(a.n);
    for (std::size_t i = 0; i < a.a.size(); ++i) out.a[i] = a.a[i] + b.a[i];
    return out;
}

inline std::vector<cplx> matvec(const Dense& m, const std::vector<cplx>& v) {
    std::vector<cplx> out(m.n);
    for (std::size_t r = 0; r < m.n; ++r) {
        cplx acc = 0.0;
        for (std::size_t c = 0; c < m.n; ++c) acc += m(r, c) * v[c];
        out[r] = acc;
    }
    return out;
}

inline Dense single(GateKind kind, double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    Dense g(2);
    switch (kind) {
        case GateKind::RY: g(0, 0) = c; g(0, 1) = -s; g(1, 0) = s; g(1, 1) = c; break;
        case GateKind::RZ: g(0, 0) = cplx(c, -s); g(1, 1) = cplx(c, s); break;
        case GateKind::RX: g(0, 0) = c; g(0, 1) = cplx(0, -s); g(1, 0) = cplx(0, -s); g(1, 1) = c; break;
        case GateKind::CNOT: break;
    }
    return g;
}

// Full operator on n qubits: factors[q] acts on qubit q (bit q), so the
// Kronecker product runs from qubit n-1 (leftmost) down to qubit 0.
inline Dense embed(const std::vector<Dense>& factors) {
    Dense out = factors.back();
    for (std::size_t q = factors.size() - 1; q-- > 0;) out = kron(out, factors[q]);
    return out;
}

inline Dense gate_matrix(const GateOp& g, unsigned n) {
    std::vector<Dense> f(n, identity(2));
    if (g.kind != GateKind::CNOT) {
        f[g.target] = single(g.kind, g.angle);
        return embed(f);
    }
    Dense p0(2), p1(2), x(2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    x(0, 1) = 1.0;
    x(1, 0) = 1.0;
    std::vector<Dense> a(n, identity(2)), b(n, identity(2));
    a[*g.control] = p0;
    b[*g.control] = p1;
    b[g.target] = x;
    return add(embed(a), embed(b));
}

inline std::vector<cplx> dense_run(const std::vector<GateOp>& gates, unsigned n) {
    std::vector<cplx> v(std::size_t{1} << n);
    v[0] = 1.0;
    for (const auto& g : gates) v = matvec(gate_matrix(g, n), v);
    return v;
}

inline double dense_expect_z(const std::vector<cplx>& v, unsigned q) {
    double acc = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) acc += ((k >> q) & 1 ? -1.0 : 1.0) * std::norm(v[k]);
    return acc;
}

inline double central_fd(const std::function<double(double)>& f, double x, double h = 1e-6) {
    return (f(x + h) - f(x - h)) / (2 * h);
}

inline double rel_err(double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic));
}

// |a - b| <= rel * max(|a|, |b|) + abs
inline bool close(double a, double b, double rel, double abs_tol) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_tol;
}

inline std::vector<GateOp> random_circuit(std::mt19937_64& rng, unsigned n, std::size_t length) {
    std::uniform_int_distribution<int> kind(0, n >= 2 ? 3 : 2);
    std::uniform_int_distribution<unsigned> qubit(0, n - 1);
    std::uniform_real_distribution<double> angle(-2 * M_PI, 2 * M_PI);
    std::vector<GateOp> out;
    for (std::size_t i = 0; i < length; ++i) {
        switch (kind(rng)) {
            case 0: out.push_back(GateOp::ry(qubit(rng), angle(rng))); break;
            case 1: out.push_back(GateOp::rz(qubit(rng), angle(rng))); break;
            case 2: out.push_back(GateOp::rx(qubit(rng), angle(rng))); break;
            default: {
                const unsigned c = qubit(rng);
                unsigned t = qubit(rng);
                while (t == c) t = qubit(rng);
                out.push_back(GateOp::cnot(c, t));
            }
        }
    }
    return out;
}

}  // namespace qpinn::test
