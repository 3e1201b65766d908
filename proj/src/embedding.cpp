#include "qpinn/embedding.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace qpinn {

EmbeddingParams EmbeddingParams::zeros(std::vector<std::size_t> dims) {
    if (dims.size() < 2) throw std::invalid_argument("embedding needs at least input and output dims");
    for (auto d : dims) {
        if (d == 0) throw std::invalid_argument("embedding layer of width 0");
    }
    EmbeddingParams p;
    p.layer_dims = std::move(dims);
    for (std::size_t l = 0; l + 1 < p.layer_dims.size(); ++l) {
        p.weights.emplace_back(p.layer_dims[l + 1], p.layer_dims[l]);
        p.biases.emplace_back(p.layer_dims[l + 1], 0.0);
    }
    return p;
}

EmbeddingParams EmbeddingParams::glorot(std::vector<std::size_t> dims, std::uint64_t seed) {
    EmbeddingParams p = zeros(std::move(dims));
    std::mt19937_64 rng(seed);
    for (auto& w : p.weights) {
        const double limit = std::sqrt(6.0 / static_cast<double>(w.rows + w.cols));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (auto& v : w.data) v = dist(rng);
    }
    return p;
}

std::size_t EmbeddingParams::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].data.size() + biases[l].size();
    return n;
}

void EmbeddingParams::flatten_into(std::vector<double>& out) const {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        out.insert(out.end(), weights[l].data.begin(), weights[l].data.end());
        out.insert(out.end(), biases[l].begin(), biases[l].end());
    }
}

std::size_t EmbeddingParams::assign_from(std::span<const double> flat) {
    std::size_t k = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (auto& v : weights[l].data) v = flat[k++];
        for (auto& v : biases[l]) v = flat[k++];
    }
    return k;
}

void EmbeddingParams::validate() const {
    if (layer_dims.size() < 2 || weights.size() != layer_dims.size() - 1 ||
        biases.size() != weights.size()) {
        throw std::invalid_argument("embedding layer count mismatch");
    }
    for (std::size_t l = 0; l < weights.size(); ++l) {
        const Matrix& w = weights[l];
        if (w.rows != layer_dims[l + 1] || w.cols != layer_dims[l] ||
            w.data.size() != w.rows * w.cols || biases[l].size() != w.rows) {
            throw std::invalid_argument("embedding layer " + std::to_string(l) + " has wrong shape");
        }
    }
}

EmbedOutput embed_forward(const EmbeddingParams& params, std::span<const double> input) {
    EmbedOutput out;
    embed_forward_into(params, input, out);
    return out;
}

void embed_forward_into(const EmbeddingParams& params, std::span<const double> input, EmbedOutput& out) {
    if (input.size() != params.input_dim()) {
        throw std::invalid_argument("embedding input has " + std::to_string(input.size()) +
                                    " entries, expected " + std::to_string(params.input_dim()));
    }
    const std::size_t n_layers = params.layer_count();
    out.activations.resize(n_layers);
    out.activations[0].assign(input.begin(), input.end());
    for (std::size_t l = 0; l < n_layers; ++l) {
        const Matrix& w = params.weights[l];
        const std::vector<double>& a = out.activations[l];
        std::vector<double>& z = l + 1 == n_layers ? out.angles : out.activations[l + 1];
        z.assign(params.biases[l].begin(), params.biases[l].end());
        for (std::size_t r = 0; r < w.rows; ++r) {
            const double* row = &w.data[r * w.cols];
            double acc = 0.0;
            for (std::size_t c = 0; c < w.cols; ++c) acc += row[c] * a[c];
            z[r] += acc;
        }
        if (l + 1 < n_layers) {
            for (auto& v : z) v = std::tanh(v);
        }
    }
}

void embed_backward_accumulate(const EmbeddingParams& params, const EmbedOutput& cache,
                               std::span<const double> upstream, EmbeddingParams& grad) {
    const std::size_t n_layers = params.layer_count();
    if (upstream.size() != params.output_dim() || cache.activations.size() != n_layers ||
        grad.layer_count() != n_layers) {
        throw std::invalid_argument("embedding backward: cache or gradient does not match params");
    }
    thread_local std::vector<double> delta, next;
    delta.assign(upstream.begin(), upstream.end());
    for (std::size_t l = n_layers; l-- > 0;) {
        const Matrix& w = params.weights[l];
        const std::vector<double>& a = cache.activations[l];
        if (a.size() != w.cols) throw std::invalid_argument("embedding backward: stale cache");
        Matrix& gw = grad.weights[l];
        std::vector<double>& gb = grad.biases[l];
        for (std::size_t r = 0; r < w.rows; ++r) {
            const double d = delta[r];
            gb[r] += d;
            double* grow = &gw.data[r * w.cols];
            for (std::size_t c = 0; c < w.cols; ++c) grow[c] += d * a[c];
        }
        if (l == 0) break;
        next.assign(w.cols, 0.0);
        for (std::size_t r = 0; r < w.rows; ++r) {
            const double d = delta[r];
            const double* row = &w.data[r * w.cols];
            for (std::size_t c = 0; c < w.cols; ++c) next[c] += row[c] * d;
        }
        // a = tanh(z) so da/dz = 1 - a^2
        for (std::size_t c = 0; c < w.cols; ++c) next[c] *= 1.0 - a[c] * a[c];
        delta.swap(next);
    }
}

EmbeddingParams embed_backward_params(const EmbeddingParams& params, const EmbedOutput& cache,
                                      std::span<const double> upstream) {
    EmbeddingParams grad = EmbeddingParams::zeros(params.layer_dims);
    embed_backward_accumulate(params, cache, upstream, grad);
    return grad;
}

Matrix embed_jacobian_input(const EmbeddingParams& params, std::span<const double> input) {
    const EmbedOutput fwd = embed_forward(params, input);
    const std::size_t n_in = params.input_dim();
    // Forward-mode: jac holds d(activation_l) / d(input).
    Matrix jac(n_in, n_in);
    for (std::size_t i = 0; i < n_in; ++i) jac(i, i) = 1.0;
    for (std::size_t l = 0; l < params.layer_count(); ++l) {
        const Matrix& w = params.weights[l];
        Matrix next(w.rows, n_in);
        for (std::size_t r = 0; r < w.rows; ++r) {
            for (std::size_t k = 0; k < w.cols; ++k) {
                const double wk = w(r, k);
                for (std::size_t c = 0; c < n_in; ++c) next(r, c) += wk * jac(k, c);
            }
        }
        if (l + 1 < params.layer_count()) {
            const std::vector<double>& a = fwd.activations[l + 1];
            for (std::size_t r = 0; r < w.rows; ++r) {
                const double d = 1.0 - a[r] * a[r];
                for (std::size_t c = 0; c < n_in; ++c) next(r, c) *= d;
            }
        }
        jac = std::move(next);
    }
    return jac;
}

}  // namespace qpinn
