#include "qpinn/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "qpinn/io.hpp"

namespace qpinn {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
    if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) throw std::invalid_argument("adam_beta1 must lie in (0, 1)");
    if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) throw std::invalid_argument("adam_beta2 must lie in (0, 1)");
    if (!(adam_eps > 0.0)) throw std::invalid_argument("adam_eps must be positive");
    if (log_every == 0) throw std::invalid_argument("log_every must be positive");
    if (!(lambda_bc >= 0.0) || !(lambda_ic >= 0.0)) throw std::invalid_argument("loss weights must be >= 0");
    if (!(theta_init_range >= 0.0)) throw std::invalid_argument("theta_init_range must be >= 0");
}

TrainState init_train_state(const ModelConfig& model, const TrainConfig& train) {
    TrainState s;
    s.params = init_params(model, train.seed, train.theta_init_range);
    s.adam_m.assign(s.params.parameter_count(), 0.0);
    s.adam_v.assign(s.params.parameter_count(), 0.0);
    s.seed = train.seed;
    std::mt19937_64 rng(train.seed);
    std::ostringstream os;
    os << rng;
    s.rng_state = os.str();
    return s;
}

TrainState adam_step(TrainState state, const ModelGrad& grad, const TrainConfig& config) {
    const std::vector<double> g = grad.flatten();
    std::vector<double> x = state.params.flatten();
    if (g.size() != x.size() || state.adam_m.size() != x.size() || state.adam_v.size() != x.size()) {
        throw std::invalid_argument("adam_step: gradient/moment shapes do not match parameters");
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g[i])) {
            throw NumericAbort("non-finite gradient component " + std::to_string(i) + " at epoch " +
                                   std::to_string(state.epoch),
                               state);
        }
    }
    const double b1 = config.adam_beta1;
    const double b2 = config.adam_beta2;
    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(b1, t);
    const double c2 = 1.0 - std::pow(b2, t);
    for (std::size_t i = 0; i < x.size(); ++i) {
        state.adam_m[i] = b1 * state.adam_m[i] + (1.0 - b1) * g[i];
        state.adam_v[i] = b2 * state.adam_v[i] + (1.0 - b2) * g[i] * g[i];
        const double m_hat = state.adam_m[i] / c1;
        const double v_hat = state.adam_v[i] / c2;
        x[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_eps);
    }
    state.params.assign_from(x);
    return state;
}

double mse_vs_reference(const PdeProblem& problem, const ModelConfig& model,
                        const ModelParams& params, const PointSet& points, unsigned threads) {
    if (!problem.reference) return 0.0;
    const std::vector<double> pred = predict(model, params, points, threads);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - problem.reference(points[i]);
        acc += e * e;
    }
    return acc / static_cast<double>(pred.size());
}

TrainResult train(const PdeProblem& problem, const ModelConfig& model, const TrainConfig& config,
                  const GridSpec& grid, std::optional<TrainState> resume, const TrainHooks& hooks) {
    problem.validate();
    model.validate();
    config.validate();
    if (model.input_dim() != problem.input_dim()) {
        throw std::invalid_argument("embedding input dim does not match the problem");
    }
    const CollocationSet colloc = make_collocation(problem, grid, model.fd_step, config.seed);
    const PointSet mse_points = tensor_grid(problem, grid);
    std::vector<double> ref(mse_points.size());
    if (problem.reference) {
        for (std::size_t i = 0; i < ref.size(); ++i) ref[i] = problem.reference(mse_points[i]);
    }
    auto mse_of = [&](const ModelParams& params) {
        if (!problem.reference) return 0.0;
        const std::vector<double> pred = predict(model, params, mse_points, config.threads);
        double acc = 0.0;
        for (std::size_t i = 0; i < pred.size(); ++i) acc += (pred[i] - ref[i]) * (pred[i] - ref[i]);
        return acc / static_cast<double>(pred.size());
    };

    TrainResult result;
    result.state = resume ? std::move(*resume) : init_train_state(model, config);
    if (result.state.params.parameter_count() != init_params(model, 0, 0.0).parameter_count()) {
        throw std::invalid_argument("resumed state does not match the model configuration");
    }
    const LossWeights weights{config.lambda_bc, config.lambda_ic};
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t first_epoch = result.state.epoch;
    bool have_best = false;

    for (;;) {
        TrainState& state = result.state;
        const LossAndGradient eval = loss_and_gradient(problem, model, state.params, colloc, weights,
                                                       config.threads);
        if (!std::isfinite(eval.loss.total)) {
            throw NumericAbort("non-finite loss at epoch " + std::to_string(state.epoch), state);
        }
        const bool last = state.epoch >= config.epochs;
        if (state.epoch == first_epoch || last || state.epoch % config.log_every == 0) {
            MetricsRow row;
            row.epoch = state.epoch;
            row.loss = eval.loss;
            row.mse = mse_of(state.params);
            if (config.record_wall_time) {
                row.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
            }
            result.metrics.push_back(row);
            if (hooks.on_row) hooks.on_row(row);
            if (!have_best || row.mse < result.best_mse) {
                have_best = true;
                result.best_mse = row.mse;
                result.best_epoch = row.epoch;
                if (hooks.on_best) hooks.on_best(state, row.mse);
            }
        }
        if (last) break;
        state = adam_step(std::move(state), eval.grad, config);
        state.epoch += 1;
    }
    return result;
}

namespace {

std::vector<FieldSnapshot> field_layout(const PdeProblem& problem,
                                        const std::vector<std::size_t>& spatial_nodes,
                                        const std::vector<double>& times) {
    const PointSet space = spatial_grid(problem, spatial_nodes);
    std::vector<FieldSnapshot> out;
    std::vector<double> p(problem.input_dim());
    for (double t : times) {
        FieldSnapshot snap;
        snap.t = t;
        snap.points.dim = problem.input_dim();
        for (std::size_t i = 0; i < space.size(); ++i) {
            std::copy(space[i].begin(), space[i].end(), p.begin());
            p.back() = t;
            snap.points.push(p);
        }
        snap.u_ref.resize(space.size());
        for (std::size_t i = 0; i < space.size(); ++i) {
            snap.u_ref[i] = problem.reference ? problem.reference(snap.points[i]) : 0.0;
        }
        out.push_back(std::move(snap));
    }
    return out;
}

void summarize(FieldSnapshot& snap) {
    const std::size_t n = snap.u_pred.size();
    snap.abs_err.resize(n);
    snap.max_abs_err = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        snap.abs_err[i] = std::abs(snap.u_pred[i] - snap.u_ref[i]);
        snap.max_abs_err = std::max(snap.max_abs_err, snap.abs_err[i]);
        sum += snap.abs_err[i];
    }
    snap.mean_abs_err = n ? sum / static_cast<double>(n) : 0.0;
}

}  // namespace

std::vector<FieldSnapshot> evaluate_field(const PdeProblem& problem, const Evaluator& predictor,
                                          const std::vector<std::size_t>& spatial_nodes,
                                          const std::vector<double>& times) {
    std::vector<FieldSnapshot> out = field_layout(problem, spatial_nodes, times);
    for (auto& snap : out) {
        snap.u_pred.resize(snap.points.size());
        for (std::size_t i = 0; i < snap.points.size(); ++i) snap.u_pred[i] = predictor(snap.points[i]);
        summarize(snap);
    }
    return out;
}

std::vector<FieldSnapshot> evaluate_field(const PdeProblem& problem, const ModelConfig& model,
                                          const ModelParams& params,
                                          const std::vector<std::size_t>& spatial_nodes,
                                          const std::vector<double>& times, unsigned threads) {
    std::vector<FieldSnapshot> out = field_layout(problem, spatial_nodes, times);
    for (auto& snap : out) {
        snap.u_pred = predict(model, params, snap.points, threads);
        summarize(snap);
    }
    return out;
}

std::string metrics_csv_header() { return "epoch,loss,pde,bc,ic,mse,wall_ms"; }

std::string metrics_csv_row(const MetricsRow& row) {
    return std::to_string(row.epoch) + ',' + format_double(row.loss.total) + ',' +
           format_double(row.loss.pde_term) + ',' + format_double(row.loss.bc_term) + ',' +
           format_double(row.loss.ic_term) + ',' + format_double(row.mse) + ',' +
           std::to_string(row.wall_ms);
}

}  // namespace qpinn
