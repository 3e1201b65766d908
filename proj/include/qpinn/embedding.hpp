#pragma once

// Feedforward network producing encoding angles from (x[, y], t).
// Hidden layers use tanh; the output layer is affine.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qpinn {

struct Matrix {
    std::size_t rows{0};
    std::size_t cols{0};
    std::vector<double> data;  // row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    friend bool operator==(const Matrix&, const Matrix&) = default;
};

// Also used as the gradient container for itself.
struct EmbeddingParams {
    std::vector<std::size_t> layer_dims;     // input, hidden..., output
    std::vector<Matrix> weights;             // weights[l] is dims[l+1] x dims[l]
    std::vector<std::vector<double>> biases; // biases[l] has dims[l+1]

    static EmbeddingParams zeros(std::vector<std::size_t> dims);
    // Glorot-uniform weights, zero biases.
    static EmbeddingParams glorot(std::vector<std::size_t> dims, std::uint64_t seed);

    std::size_t input_dim() const { return layer_dims.front(); }
    std::size_t output_dim() const { return layer_dims.back(); }
    std::size_t layer_count() const { return weights.size(); }
    std::size_t parameter_count() const;

    // Flat order: per layer, weights row-major then biases.
    void flatten_into(std::vector<double>& out) const;
    std::size_t assign_from(std::span<const double> flat);

    void validate() const;
    friend bool operator==(const EmbeddingParams&, const EmbeddingParams&) = default;
};

struct EmbedOutput {
    std::vector<double> angles;
    // activations[l] is the input to layer l (activations[0] is the network input).
    std::vector<std::vector<double>> activations;
};

EmbedOutput embed_forward(const EmbeddingParams& params, std::span<const double> input);
// Same, reusing the buffers already held by `out`.
void embed_forward_into(const EmbeddingParams& params, std::span<const double> input, EmbedOutput& out);

// Gradient of angles . upstream w.r.t. every weight and bias.
EmbeddingParams embed_backward_params(const EmbeddingParams& params, const EmbedOutput& cache,
                                      std::span<const double> upstream);

// Accumulating variant of embed_backward_params; `grad` must be congruent with params.
void embed_backward_accumulate(const EmbeddingParams& params, const EmbedOutput& cache,
                               std::span<const double> upstream, EmbeddingParams& grad);

// d angles / d input, output_dim x input_dim.
Matrix embed_jacobian_input(const EmbeddingParams& params, std::span<const double> input);

}  // namespace qpinn
