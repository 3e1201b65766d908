// qpinn: train, evaluate and inspect hybrid quantum PINN models.
//
//   qpinn train CONFIG [--epochs N] [--seed S] [--out DIR] [--set sec.key=val]... [--resume CKPT]
//   qpinn eval CHECKPOINT [--problem NAME] [--nx N] [--ny N] [--times a,b,c] [--out DIR]
//   qpinn oracle CONFIG [--nodes a,b] [--dt DT] [--times a,b,c] [--zero-boundary] [--out DIR]
//   qpinn describe CONFIG [--set sec.key=val]...
//
// Exit codes: 0 ok, 1 other failure, 2 configuration error, 3 numeric abort.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "qpinn/checkpoint.hpp"
#include "qpinn/config.hpp"
#include "qpinn/io.hpp"
#include "qpinn/oracle.hpp"
#include "qpinn/simd/kernels.hpp"
#include "qpinn/training.hpp"

namespace fs = std::filesystem;
using namespace qpinn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Common {
    std::vector<std::string> overrides;
    unsigned threads{0};
};

unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

RunConfig load_with_overrides(const std::string& path, const std::vector<std::string>& overrides) {
    RunConfig cfg = load_config(path);
    for (const auto& o : overrides) apply_override(cfg, o);
    return cfg;
}

std::string time_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", t);
    return buf;
}

void print_row(const MetricsRow& r) {
    std::printf("epoch %6llu  loss %.6e  pde %.3e  bc %.3e  ic %.3e  mse %.6e\n",
                static_cast<unsigned long long>(r.epoch), r.loss.total, r.loss.pde_term, r.loss.bc_term,
                r.loss.ic_term, r.mse);
    std::fflush(stdout);
}

std::string describe_text(const RunConfig& cfg) {
    const ModelConfig model = make_model_config(cfg);
    model.validate();
    const PdeProblem problem = make_problem(cfg);
    std::ostringstream os;
    const auto& a = model.ansatz;
    os << a.n_qubits << " qubits, " << a.n_layers << " layers, " << a.parameter_count()
       << " variational params, embedding ";
    for (std::size_t i = 0; i < model.embedding_dims.size(); ++i) {
        if (i) os << "→";
        os << model.embedding_dims[i];
    }
    os << "\n";
    os << "problem " << problem.name << " (" << problem.spatial_dim << "D, input dim " << problem.input_dim()
       << ")\n";
    os << "rotations";
    for (GateKind k : a.rotation_pattern) os << ' ' << gate_name(k);
    os << ", entangler " << (a.entangler == Entangler::ring ? "ring" : "chain") << ", "
       << a.cnots_per_layer() << " CNOTs per layer\n";
    const std::size_t emb = EmbeddingParams::zeros(model.embedding_dims).parameter_count();
    os << "parameters: enc " << a.n_qubits << ", var " << a.parameter_count() << ", embedding " << emb
       << ", output map " << (model.train_output_map ? 2 : 0) << "\n";
    os << "aggregation " << aggregation_name(model.aggregation) << "\n";

    // Structure with placeholder angles: encoding angles 0, variational 0.
    std::vector<double> enc(a.n_qubits, 0.0), theta(a.parameter_count(), 0.0);
    const BoundCircuit bound = bind_circuit(a, enc, theta);
    os << "gates (" << bound.gates.size() << "):\n" << format_circuit(bound, true);
    return os.str();
}

int cmd_train(const std::string& config_path, const Common& common, std::optional<std::uint64_t> epochs,
              std::optional<std::uint64_t> seed, const std::string& out_flag, const std::string& resume_path) {
    RunConfig cfg = load_with_overrides(config_path, common.overrides);
    if (epochs) cfg.train.epochs = *epochs;
    if (seed) cfg.train.seed = *seed;
    if (!out_flag.empty()) cfg.output_dir = out_flag;

    const PdeProblem problem = make_problem(cfg);
    const ModelConfig model = make_model_config(cfg);
    const GridSpec grid = make_grid(cfg);
    TrainConfig tc = cfg.train;
    tc.threads = resolve_threads(common.threads);
    model.validate();
    tc.validate();

    const fs::path out = cfg.output_dir;
    const std::string config_text = cfg.to_text();
    atomic_write(out / "resolved.cfg", config_text);

    std::optional<TrainState> resume;
    if (!resume_path.empty()) {
        Checkpoint ck = load_checkpoint(resume_path);
        const RunConfig saved = parse_config(ck.config_text);
        if (saved.problem != cfg.problem) {
            throw ConfigError("checkpoint was trained on '" + saved.problem + "', config asks for '" +
                              cfg.problem + "'");
        }
        resume = std::move(ck.state);
    }

    std::string metrics = metrics_csv_header() + "\n";
    TrainHooks hooks;
    hooks.on_row = [&](const MetricsRow& r) {
        metrics += metrics_csv_row(r) + "\n";
        atomic_write(out / "metrics.csv", metrics);
        print_row(r);
    };
    hooks.on_best = [&](const TrainState& s, double) {
        save_checkpoint(out / "best.qpc", Checkpoint{config_text, s});
    };

    const std::string summary = describe_text(cfg);
    std::printf("training %s: %s", problem.name.c_str(), summary.substr(0, summary.find('\n') + 1).c_str());
    std::printf("kernels %s, threads %u, epochs %llu\n", simd::kernels().name, tc.threads,
                static_cast<unsigned long long>(tc.epochs));
    const auto t0 = std::chrono::steady_clock::now();
    TrainResult result;
    try {
        result = train(problem, model, tc, grid, std::move(resume), hooks);
    } catch (const NumericAbort& e) {
        save_checkpoint(out / "abort.qpc", Checkpoint{config_text, e.state()});
        std::fprintf(stderr, "numeric abort: %s (state dumped to %s)\n", e.what(),
                     (out / "abort.qpc").string().c_str());
        return kExitNumeric;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    save_checkpoint(out / cfg.checkpoint, Checkpoint{config_text, result.state});
    std::printf("done in %.1f s; best mse %.6e at epoch %llu; wrote %s\n", secs, result.best_mse,
                static_cast<unsigned long long>(result.best_epoch), out.string().c_str());
    return kExitOk;
}

int cmd_eval(const std::string& ckpt_path, const Common& common, const std::string& problem_flag,
             std::optional<std::size_t> nx, std::optional<std::size_t> ny, const std::string& times_flag,
             const std::string& out_flag) {
    const Checkpoint ck = load_checkpoint(ckpt_path);
    RunConfig cfg = parse_config(ck.config_text);
    for (const auto& o : common.overrides) apply_override(cfg, o);
    if (!problem_flag.empty() && problem_flag != cfg.problem) {
        throw ConfigError("checkpoint holds a '" + cfg.problem + "' model, not '" + problem_flag + "'");
    }
    if (nx) cfg.eval_nx = *nx;
    if (ny) cfg.eval_ny = *ny;
    if (!times_flag.empty()) cfg.eval_times = parse_double_list(times_flag);

    const PdeProblem problem = make_problem(cfg);
    const ModelConfig model = make_model_config(cfg);
    model.validate();
    if (ck.state.params.parameter_count() != init_params(model, 0, 0.0).parameter_count()) {
        throw ConfigError("checkpoint parameters do not match its model configuration");
    }
    const fs::path out = out_flag.empty() ? fs::path(cfg.output_dir) / "eval" : fs::path(out_flag);
    const auto snaps = evaluate_field(problem, model, ck.state.params, eval_nodes(cfg), eval_times(cfg),
                                      resolve_threads(common.threads));
    double max_err = 0.0, sum_err = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        const auto& s = snaps[i];
        const fs::path file = out / ("field_t" + time_tag(s.t) + ".csv");
        atomic_write(file, field_csv(s));
        std::printf("t=%s  max_abs_err %.6e  mean_abs_err %.6e  -> %s\n", time_tag(s.t).c_str(), s.max_abs_err,
                    s.mean_abs_err, file.string().c_str());
        max_err = std::max(max_err, s.max_abs_err);
        sum_err += s.mean_abs_err * static_cast<double>(s.abs_err.size());
        count += s.abs_err.size();
    }
    std::printf("summary: max_abs_err %.6e mean_abs_err %.6e over %zu points\n", max_err,
                count ? sum_err / static_cast<double>(count) : 0.0, count);
    return kExitOk;
}

int cmd_oracle(const std::string& config_path, const Common& common, const std::string& nodes_flag,
               std::optional<double> dt_flag, const std::string& times_flag, bool zero_boundary,
               const std::string& out_flag) {
    RunConfig cfg = load_with_overrides(config_path, common.overrides);
    if (!times_flag.empty()) cfg.eval_times = parse_double_list(times_flag);
    const PdeProblem problem = make_problem(cfg);
    std::vector<std::size_t> nodes = nodes_flag.empty()
                                         ? (problem.spatial_dim == 1 ? std::vector<std::size_t>{201}
                                                                     : std::vector<std::size_t>{101, 101})
                                         : parse_size_list(nodes_flag);
    const double dt = dt_flag ? *dt_flag : 0.5 * fd_stable_dt(problem, nodes);
    const std::vector<double> times = eval_times(cfg);
    const FdSolution fd = solve_fd(problem, nodes, dt, times, FdOptions{zero_boundary});

    const fs::path out = out_flag.empty() ? fs::path(cfg.output_dir) / "oracle" : fs::path(out_flag);
    double worst = 0.0;
    for (std::size_t s = 0; s < times.size(); ++s) {
        const auto& u = fd.snapshots[s];
        Evaluator pred = [&](std::span<const double> p) {
            // nodes are laid out exactly as the field grid, so look up by position
            std::size_t idx = 0;
            for (std::size_t a = 0; a < nodes.size(); ++a) {
                const auto& iv = problem.domain[a];
                const double f = (p[a] - iv.lo) / (iv.hi - iv.lo) * static_cast<double>(nodes[a] - 1);
                idx = idx * nodes[a] + static_cast<std::size_t>(std::llround(f));
            }
            return u[idx];
        };
        const auto snap = evaluate_field(problem, pred, nodes, {times[s]}).front();
        const fs::path file = out / ("oracle_t" + time_tag(times[s]) + ".csv");
        atomic_write(file, field_csv(snap));
        std::printf("t=%s  fd vs closed form: max %.6e mean %.6e -> %s\n", time_tag(times[s]).c_str(),
                    snap.max_abs_err, snap.mean_abs_err, file.string().c_str());
        worst = std::max(worst, snap.max_abs_err);
    }
    std::printf("scheme %s, dt %.6e, %s boundary; max discrepancy %.6e\n", fd.scheme.c_str(), fd.dt,
                zero_boundary ? "zero" : "problem", worst);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid quantum physics-informed network trainer"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--threads", common.threads, "Worker threads (0 = all cores)");

    auto add_overrides = [&](CLI::App* sub) {
        sub->add_option("--set", common.overrides, "Override a config key, e.g. --set train.learning_rate=0.02");
    };

    std::string config_path, ckpt_path, out_dir, resume_path, problem_flag, times_flag, nodes_flag;
    std::optional<std::uint64_t> epochs, seed;
    std::optional<std::size_t> nx, ny;
    std::optional<double> dt;
    bool zero_boundary = false;

    auto* train_cmd = app.add_subcommand("train", "Train a model from a config file");
    train_cmd->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--epochs", epochs, "Override train.epochs");
    train_cmd->add_option("--seed", seed, "Override train.seed")->envname("QPINN_SEED");
    train_cmd->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    train_cmd->add_option("--resume", resume_path, "Continue from a checkpoint")->check(CLI::ExistingFile);
    add_overrides(train_cmd);

    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a dense grid");
    eval_cmd->add_option("checkpoint", ckpt_path, "Checkpoint file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--problem", problem_flag, "Expected problem name");
    eval_cmd->add_option("--nx", nx, "Nodes along x");
    eval_cmd->add_option("--ny", ny, "Nodes along y");
    eval_cmd->add_option("--times", times_flag, "Comma-separated snapshot times");
    eval_cmd->add_option("--out", out_dir, "Output directory");
    add_overrides(eval_cmd);

    auto* oracle_cmd = app.add_subcommand("oracle", "Finite-difference reference vs closed form");
    oracle_cmd->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    oracle_cmd->add_option("--nodes", nodes_flag, "Nodes per spatial axis, comma-separated");
    oracle_cmd->add_option("--dt", dt, "Time step (default: half the stability limit)");
    oracle_cmd->add_option("--times", times_flag, "Comma-separated snapshot times");
    oracle_cmd->add_flag("--zero-boundary", zero_boundary, "Impose u = 0 on the boundary");
    oracle_cmd->add_option("--out", out_dir, "Output directory");
    add_overrides(oracle_cmd);

    auto* describe_cmd = app.add_subcommand("describe", "Print the model and circuit layout");
    describe_cmd->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    add_overrides(describe_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*train_cmd) return cmd_train(config_path, common, epochs, seed, out_dir, resume_path);
        if (*eval_cmd) return cmd_eval(ckpt_path, common, problem_flag, nx, ny, times_flag, out_dir);
        if (*oracle_cmd) return cmd_oracle(config_path, common, nodes_flag, dt, times_flag, zero_boundary, out_dir);
        if (*describe_cmd) {
            std::cout << describe_text(load_with_overrides(config_path, common.overrides));
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const CheckpointError& e) {
        std::fprintf(stderr, "checkpoint error: %s\n", e.what());
        return kExitConfig;
    } catch (const StabilityError& e) {
        std::fprintf(stderr, "unstable time step: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
    return kExitFailure;
}
