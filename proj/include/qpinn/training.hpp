#pragma once

// Full-batch Adam training of the hybrid model on a collocation loss.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpinn/pde.hpp"

namespace qpinn {

struct TrainConfig {
    std::uint64_t epochs{2000};
    double learning_rate{0.01};
    double adam_beta1{0.9};
    double adam_beta2{0.999};
    double adam_eps{1e-8};
    std::uint64_t seed{1234};
    std::uint64_t log_every{10};
    std::string checkpoint_path;
    double lambda_bc{1.0};
    double lambda_ic{1.0};
    double theta_init_range{3.141592653589793};
    bool record_wall_time{false};
    unsigned threads{1};

    void validate() const;
};

struct TrainState {
    ModelParams params;
    std::vector<double> adam_m;
    std::vector<double> adam_v;
    std::uint64_t step{0};   // Adam steps taken (bias-correction exponent)
    std::uint64_t epoch{0};
    std::uint64_t seed{0};
    std::string rng_state;   // std::mt19937_64 stream state

    friend bool operator==(const TrainState&, const TrainState&) = default;
};

TrainState init_train_state(const ModelConfig& model, const TrainConfig& train);

struct MetricsRow {
    std::uint64_t epoch{0};
    LossBreakdown loss;
    double mse{0.0};
    std::int64_t wall_ms{0};
};

// Thrown on non-finite loss or gradient; carries the offending state.
class NumericAbort : public std::runtime_error {
  public:
    NumericAbort(const std::string& what, TrainState state)
        : std::runtime_error(what), state_(std::move(state)) {}
    const TrainState& state() const { return state_; }

  private:
    TrainState state_;
};

// Bias-corrected Adam update over the flattened parameter vector. Leaves
// `epoch` alone; increments `step`.
TrainState adam_step(TrainState state, const ModelGrad& grad, const TrainConfig& config);

struct TrainHooks {
    std::function<void(const MetricsRow&)> on_row;
    // Called whenever a logged MSE improves on the best so far.
    std::function<void(const TrainState&, double mse)> on_best;
};

struct TrainResult {
    TrainState state;
    std::vector<MetricsRow> metrics;
    double best_mse{0.0};
    std::uint64_t best_epoch{0};
};

// Runs epochs until state.epoch == config.epochs, logging epoch 0 (or the
// starting epoch), every log_every-th epoch and the last one. MSE is measured
// against problem.reference on the full training grid.
TrainResult train(const PdeProblem& problem, const ModelConfig& model, const TrainConfig& config,
                  const GridSpec& grid, std::optional<TrainState> resume = std::nullopt,
                  const TrainHooks& hooks = {});

// Mean squared error of the model against problem.reference over `points`.
double mse_vs_reference(const PdeProblem& problem, const ModelConfig& model,
                        const ModelParams& params, const PointSet& points, unsigned threads = 1);

struct FieldSnapshot {
    double t{0.0};
    PointSet points;
    std::vector<double> u_pred;
    std::vector<double> u_ref;
    std::vector<double> abs_err;
    double max_abs_err{0.0};
    double mean_abs_err{0.0};
};

// Dense spatial grid (endpoints included) at each requested time.
std::vector<FieldSnapshot> evaluate_field(const PdeProblem& problem, const ModelConfig& model,
                                          const ModelParams& params,
                                          const std::vector<std::size_t>& spatial_nodes,
                                          const std::vector<double>& times, unsigned threads = 1);

// Same, with an arbitrary predictor in place of the model.
std::vector<FieldSnapshot> evaluate_field(const PdeProblem& problem, const Evaluator& predictor,
                                          const std::vector<std::size_t>& spatial_nodes,
                                          const std::vector<double>& times);

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRow& row);

}  // namespace qpinn
