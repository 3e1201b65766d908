#pragma once

// Hybrid surrogate u(p) = scale * aggregate(<Z_q>) + bias, where the circuit is
// RY(embedding(p)) encoding followed by the variational ansatz.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "qpinn/circuit.hpp"
#include "qpinn/embedding.hpp"

namespace qpinn {

enum class Aggregation { sum_z, mean_z, product_z };

std::string_view aggregation_name(Aggregation a);
Aggregation parse_aggregation(std::string_view name);

struct ModelConfig {
    AnsatzSpec ansatz{};
    // Full layer list: input dim, hidden widths, n_qubits.
    std::vector<std::size_t> embedding_dims{};
    Aggregation aggregation{Aggregation::sum_z};
    double output_scale{1.0};
    double output_bias{0.0};
    bool train_output_map{true};
    double fd_step{1e-3};

    unsigned n_qubits() const { return ansatz.n_qubits; }
    std::size_t input_dim() const { return embedding_dims.front(); }
    void validate() const;
};

struct ModelParams {
    std::vector<double> theta;
    EmbeddingParams xi;
    double scale{1.0};
    double bias{0.0};

    // theta, then xi (see EmbeddingParams::flatten_into), then scale, bias.
    std::vector<double> flatten() const;
    void assign_from(std::span<const double> flat);
    std::size_t parameter_count() const { return theta.size() + xi.parameter_count() + 2; }
    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// theta uniform in [-theta_range, theta_range], Glorot embedding, output map from config.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed, double theta_range);

struct ModelGrad {
    std::vector<double> d_theta;
    EmbeddingParams d_xi;
    std::array<double, 2> d_outmap{0.0, 0.0};  // scale, bias

    static ModelGrad zeros(const ModelConfig& config);
    std::vector<double> flatten() const;  // same layout as ModelParams::flatten
    void axpy(double a, const ModelGrad& other);
};

double aggregate(const StateVector& state, Aggregation aggregation);

double forward(const ModelConfig& config, const ModelParams& params, std::span<const double> point);

// Parameter-shift on every variational and encoding angle (2 executions each),
// chained through the embedding backprop. One extra execution supplies the
// output-map gradient when the map is trainable.
ModelGrad grad_params(const ModelConfig& config, const ModelParams& params,
                      std::span<const double> point);

// --- input derivatives by central stencils ---

struct Interval {
    double lo{0.0};
    double hi{1.0};
    friend bool operator==(const Interval&, const Interval&) = default;
};

// Axis-aligned box over the model input (spatial axes, then time).
using Box = std::vector<Interval>;

struct DerivSpec {
    std::size_t axis{0};
    int order{1};  // 1 or 2
};

class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

using Evaluator = std::function<double(std::span<const double>)>;

// First: (f(p+h) - f(p-h)) / 2h. Second: (f(p+h) - 2 f(p) + f(p-h)) / h^2.
// Throws DomainError if a stencil point leaves `domain` (when given).
double input_derivative(const Evaluator& f, std::span<const double> point, DerivSpec which,
                        double h, const Box* domain = nullptr);

double input_derivatives(const ModelConfig& config, const ModelParams& params,
                         std::span<const double> point, DerivSpec which,
                         const Box* domain = nullptr);

}  // namespace qpinn
