#include "qpinn/model.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace qpinn {

std::string_view aggregation_name(Aggregation a) {
    switch (a) {
        case Aggregation::sum_z: return "sum_z";
        case Aggregation::mean_z: return "mean_z";
        case Aggregation::product_z: return "product_z";
    }
    return "?";
}

Aggregation parse_aggregation(std::string_view name) {
    if (name == "sum_z") return Aggregation::sum_z;
    if (name == "mean_z") return Aggregation::mean_z;
    if (name == "product_z") return Aggregation::product_z;
    throw std::invalid_argument("unknown aggregation '" + std::string(name) + "'");
}

void ModelConfig::validate() const {
    ansatz.validate();
    if (embedding_dims.size() < 2) throw std::invalid_argument("embedding needs input and output dims");
    if (embedding_dims.back() != ansatz.n_qubits) {
        throw std::invalid_argument("embedding output dim " + std::to_string(embedding_dims.back()) +
                                    " != qubit count " + std::to_string(ansatz.n_qubits));
    }
    if (!(fd_step >= 1e-5 && fd_step <= 1e-1)) {
        throw std::invalid_argument("fd_step must lie in [1e-5, 1e-1]");
    }
    if (!std::isfinite(output_scale) || !std::isfinite(output_bias)) {
        throw std::invalid_argument("output map must be finite");
    }
}

std::vector<double> ModelParams::flatten() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    out.insert(out.end(), theta.begin(), theta.end());
    xi.flatten_into(out);
    out.push_back(scale);
    out.push_back(bias);
    return out;
}

void ModelParams::assign_from(std::span<const double> flat) {
    if (flat.size() != parameter_count()) throw std::invalid_argument("flat parameter size mismatch");
    std::size_t k = 0;
    for (auto& v : theta) v = flat[k++];
    k += xi.assign_from(flat.subspan(k));
    scale = flat[k++];
    bias = flat[k++];
}

ModelParams init_params(const ModelConfig& config, std::uint64_t seed, double theta_range) {
    config.validate();
    ModelParams p;
    // Separate streams so changing the ansatz size leaves the embedding init intact.
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> dist(-theta_range, theta_range);
    p.theta.resize(config.ansatz.parameter_count());
    for (auto& t : p.theta) t = theta_range > 0.0 ? dist(rng) : 0.0;
    p.xi = EmbeddingParams::glorot(config.embedding_dims, seed);
    p.scale = config.output_scale;
    p.bias = config.output_bias;
    return p;
}

ModelGrad ModelGrad::zeros(const ModelConfig& config) {
    ModelGrad g;
    g.d_theta.assign(config.ansatz.parameter_count(), 0.0);
    g.d_xi = EmbeddingParams::zeros(config.embedding_dims);
    return g;
}

std::vector<double> ModelGrad::flatten() const {
    std::vector<double> out(d_theta);
    d_xi.flatten_into(out);
    out.push_back(d_outmap[0]);
    out.push_back(d_outmap[1]);
    return out;
}

void ModelGrad::axpy(double a, const ModelGrad& other) {
    for (std::size_t k = 0; k < d_theta.size(); ++k) d_theta[k] += a * other.d_theta[k];
    for (std::size_t l = 0; l < d_xi.weights.size(); ++l) {
        auto& w = d_xi.weights[l].data;
        const auto& ow = other.d_xi.weights[l].data;
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += a * ow[i];
        auto& b = d_xi.biases[l];
        const auto& ob = other.d_xi.biases[l];
        for (std::size_t i = 0; i < b.size(); ++i) b[i] += a * ob[i];
    }
    d_outmap[0] += a * other.d_outmap[0];
    d_outmap[1] += a * other.d_outmap[1];
}

double aggregate(const StateVector& state, Aggregation aggregation) {
    switch (aggregation) {
        case Aggregation::sum_z: return expect_z_sum(state);
        case Aggregation::mean_z: return expect_z_sum(state) / state.n_qubits();
        case Aggregation::product_z: return expect_z_product(state);
    }
    return 0.0;
}

namespace {

double raw_output(const ModelConfig& config, std::span<const double> angles,
                  std::span<const double> theta) {
    return aggregate(run_circuit_state(config.ansatz, angles, theta), config.aggregation);
}

}  // namespace

double forward(const ModelConfig& config, const ModelParams& params, std::span<const double> point) {
    const EmbedOutput emb = embed_forward(params.xi, point);
    return params.scale * raw_output(config, emb.angles, params.theta) + params.bias;
}

ModelGrad grad_params(const ModelConfig& config, const ModelParams& params,
                      std::span<const double> point) {
    constexpr double shift = std::numbers::pi / 2.0;
    ModelGrad g;
    const EmbedOutput emb = embed_forward(params.xi, point);

    std::vector<double> theta = params.theta;
    g.d_theta.resize(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) {
        const double t0 = theta[k];
        theta[k] = t0 + shift;
        const double plus = raw_output(config, emb.angles, theta);
        theta[k] = t0 - shift;
        const double minus = raw_output(config, emb.angles, theta);
        theta[k] = t0;
        g.d_theta[k] = params.scale * 0.5 * (plus - minus);
    }

    std::vector<double> angles = emb.angles;
    std::vector<double> upstream(angles.size());
    for (std::size_t q = 0; q < angles.size(); ++q) {
        const double a0 = angles[q];
        angles[q] = a0 + shift;
        const double plus = raw_output(config, angles, params.theta);
        angles[q] = a0 - shift;
        const double minus = raw_output(config, angles, params.theta);
        angles[q] = a0;
        upstream[q] = params.scale * 0.5 * (plus - minus);
    }
    g.d_xi = embed_backward_params(params.xi, emb, upstream);

    if (config.train_output_map) {
        g.d_outmap = {raw_output(config, emb.angles, params.theta), 1.0};
    }
    return g;
}

double input_derivative(const Evaluator& f, std::span<const double> point, DerivSpec which,
                        double h, const Box* domain) {
    if (which.axis >= point.size()) throw std::out_of_range("derivative axis out of range");
    if (which.order != 1 && which.order != 2) throw std::invalid_argument("derivative order must be 1 or 2");
    if (!(h > 0.0)) throw std::invalid_argument("stencil step must be positive");
    if (domain != nullptr) {
        const Interval& iv = (*domain).at(which.axis);
        const double x = point[which.axis];
        const double tol = 1e-12 * std::max(1.0, std::abs(x));
        if (x - h < iv.lo - tol || x + h > iv.hi + tol) {
            throw DomainError("stencil at " + std::to_string(x) + " +/- " + std::to_string(h) +
                              " leaves [" + std::to_string(iv.lo) + ", " + std::to_string(iv.hi) +
                              "] on axis " + std::to_string(which.axis));
        }
    }
    std::vector<double> p(point.begin(), point.end());
    const double x0 = p[which.axis];
    p[which.axis] = x0 + h;
    const double up = f(p);
    p[which.axis] = x0 - h;
    const double down = f(p);
    if (which.order == 1) return (up - down) / (2.0 * h);
    const double mid = f(point);
    return (up - 2.0 * mid + down) / (h * h);
}

double input_derivatives(const ModelConfig& config, const ModelParams& params,
                         std::span<const double> point, DerivSpec which, const Box* domain) {
    const Evaluator f = [&](std::span<const double> p) { return forward(config, params, p); };
    return input_derivative(f, point, which, config.fd_step, domain);
}

}  // namespace qpinn
