#include "qpinn/compiled_model.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qpinn/simd/kernels.hpp"

namespace qpinn {

void encoding_state(std::span<const double> angles, std::span<double> out) {
    const std::size_t dim = std::size_t{1} << angles.size();
    if (out.size() != dim) throw std::invalid_argument("encoding_state: output size mismatch");
    out[0] = 1.0;
    std::size_t len = 1;
    for (std::size_t q = 0; q < angles.size(); ++q) {
        const double c = std::cos(0.5 * angles[q]);
        const double s = std::sin(0.5 * angles[q]);
        for (std::size_t k = 0; k < len; ++k) {
            out[k + len] = out[k] * s;
            out[k] *= c;
        }
        len *= 2;
    }
}

void encoding_state_derivatives(std::span<const double> angles, std::span<double> out) {
    const std::size_t n = angles.size();
    const std::size_t dim = std::size_t{1} << n;
    if (out.size() != n * dim) throw std::invalid_argument("encoding derivatives: output size mismatch");
    std::vector<double> c(n), s(n);
    for (std::size_t q = 0; q < n; ++q) {
        c[q] = std::cos(0.5 * angles[q]);
        s[q] = std::sin(0.5 * angles[q]);
    }
    for (std::size_t d = 0; d < n; ++d) {
        double* block = out.data() + d * dim;
        block[0] = 1.0;
        std::size_t len = 1;
        for (std::size_t q = 0; q < n; ++q) {
            // d/dphi cos(phi/2) = -sin(phi/2)/2, d/dphi sin(phi/2) = cos(phi/2)/2
            const double f0 = q == d ? -0.5 * s[q] : c[q];
            const double f1 = q == d ? 0.5 * c[q] : s[q];
            for (std::size_t k = 0; k < len; ++k) {
                block[k + len] = block[k] * f1;
                block[k] *= f0;
            }
            len *= 2;
        }
    }
}

void encoding_backward(std::span<const double> angles, std::span<const double> v, std::span<double> grad,
                       std::span<double> scratch) {
    const std::size_t n = angles.size();
    const std::size_t dim = std::size_t{1} << n;
    if (v.size() != dim || grad.size() != n || scratch.size() < 2 * dim) {
        throw std::invalid_argument("encoding_backward: size mismatch");
    }
    // prefix[2^q - 1 ...] holds the partial product over qubits < q
    double* prefix = scratch.data();
    double* g = scratch.data() + dim;
    prefix[0] = 1.0;
    for (std::size_t q = 0, len = 1; q + 1 < n; ++q, len *= 2) {
        const double c = std::cos(0.5 * angles[q]), s = std::sin(0.5 * angles[q]);
        const double* a = prefix + len - 1;
        double* b = prefix + 2 * len - 1;
        for (std::size_t k = 0; k < len; ++k) {
            b[k] = a[k] * c;
            b[k + len] = a[k] * s;
        }
    }
    std::copy(v.begin(), v.end(), g);
    for (std::size_t q = n; q-- > 0;) {
        const std::size_t len = std::size_t{1} << q;
        const double c = std::cos(0.5 * angles[q]), s = std::sin(0.5 * angles[q]);
        const double* a = prefix + len - 1;
        double dc = 0.0, ds = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
            dc += g[k] * a[k];
            ds += g[k + len] * a[k];
            g[k] = g[k] * c + g[k + len] * s;
        }
        grad[q] = 0.5 * (c * ds - s * dc);
    }
}

namespace {

std::vector<double> observable_diagonal(unsigned n, Aggregation aggregation) {
    const std::size_t dim = std::size_t{1} << n;
    std::vector<double> diag(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        const int ones = std::popcount(k);
        switch (aggregation) {
            case Aggregation::sum_z: diag[k] = static_cast<double>(static_cast<int>(n) - 2 * ones); break;
            case Aggregation::mean_z:
                diag[k] = static_cast<double>(static_cast<int>(n) - 2 * ones) / n;
                break;
            case Aggregation::product_z: diag[k] = (ones & 1) ? -1.0 : 1.0; break;
        }
    }
    return diag;
}

}  // namespace

std::vector<double> observable_matrix(const ModelConfig& config, std::span<const double> theta) {
    const unsigned n = config.ansatz.n_qubits;
    const std::size_t dim = std::size_t{1} << n;
    const std::vector<GateOp> gates = build_ansatz(config.ansatz, theta);
    const std::vector<double> diag = observable_diagonal(n, config.aggregation);

    // Columns of U, split into real/imag parts and pre-weighted by the diagonal:
    // re[b][k] = Re U_kb, wre[b][k] = o_k Re U_kb.
    std::vector<double> re(dim * dim), im(dim * dim), wre(dim * dim), wim(dim * dim);
    for (std::size_t b = 0; b < dim; ++b) {
        StateVector col(n);
        col[0] = 0.0;
        col[b] = 1.0;
        col.apply(gates);
        for (std::size_t k = 0; k < dim; ++k) {
            re[b * dim + k] = col[k].real();
            im[b * dim + k] = col[k].imag();
            wre[b * dim + k] = diag[k] * col[k].real();
            wim[b * dim + k] = diag[k] * col[k].imag();
        }
    }
    const auto& kern = simd::kernels();
    std::vector<double> m(dim * dim);
    for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = a; b < dim; ++b) {
            const double v = kern.dot(&re[a * dim], &wre[b * dim], dim) +
                             kern.dot(&im[a * dim], &wim[b * dim], dim);
            m[a * dim + b] = v;
            m[b * dim + a] = v;
        }
    }
    return m;
}

CompiledObservable::CompiledObservable(const ModelConfig& config, std::span<const double> theta)
    : config_(config),
      theta_(theta.begin(), theta.end()),
      n_qubits_(config.ansatz.n_qubits),
      dim_(std::size_t{1} << config.ansatz.n_qubits),
      m_(observable_matrix(config, theta)) {}

double CompiledObservable::value(std::span<const double> psi, std::span<double> m_psi) const {
    return simd::kernels().quad_form(m_.data(), psi.data(), m_psi.data(), dim_);
}

void CompiledObservable::angle_gradient(std::span<const double> m_psi, std::span<const double> dpsi,
                                        std::span<double> out) const {
    const auto& kern = simd::kernels();
    for (unsigned q = 0; q < n_qubits_; ++q) {
        out[q] = 2.0 * kern.dot(m_psi.data(), dpsi.data() + q * dim_, dim_);
    }
}

std::vector<double> CompiledObservable::theta_gradient(std::span<const double> r) const {
    constexpr double shift = std::numbers::pi / 2.0;
    const auto& kern = simd::kernels();
    std::vector<double> g(theta_.size());
    std::vector<double> theta = theta_;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        const double t0 = theta[k];
        theta[k] = t0 + shift;
        const std::vector<double> plus = observable_matrix(config_, theta);
        theta[k] = t0 - shift;
        const std::vector<double> minus = observable_matrix(config_, theta);
        theta[k] = t0;
        g[k] = 0.5 * (kern.dot(plus.data(), r.data(), r.size()) -
                      kern.dot(minus.data(), r.data(), r.size()));
    }
    return g;
}

double compiled_raw_output(const CompiledObservable& obs, const EmbeddingParams& xi,
                           std::span<const double> point) {
    const EmbedOutput emb = embed_forward(xi, point);
    std::vector<double> psi(obs.dim()), m_psi(obs.dim());
    encoding_state(emb.angles, psi);
    return obs.value(psi, m_psi);
}

}  // namespace qpinn
