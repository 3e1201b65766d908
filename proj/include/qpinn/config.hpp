#pragma once

// Run configuration: flat `key = value` lines grouped under `[section]`
// headers, `#` comments. Every key has a default; unknown sections or keys are
// errors. to_text() emits every key, and parsing that text reproduces the
// same RunConfig.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qpinn/model.hpp"
#include "qpinn/pde.hpp"
#include "qpinn/training.hpp"

namespace qpinn {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // [problem]
    std::string problem{"heat1d"};
    // [grid]
    std::size_t nx{100};
    std::size_t ny{50};
    std::size_t nt{50};
    double subsample{1.0};
    // [model]
    unsigned n_qubits{5};
    unsigned layers{4};
    std::vector<GateKind> rotations{GateKind::RY, GateKind::RZ};
    Entangler entangler{Entangler::chain};
    std::vector<std::size_t> hidden{10, 10};
    Aggregation aggregation{Aggregation::sum_z};
    bool output_map{true};
    double output_scale{1.0};
    double output_bias{0.0};
    double fd_step{1e-3};
    // [train]
    TrainConfig train{};
    // [output]
    std::string output_dir{"runs/out"};
    std::string checkpoint{"checkpoint.qpc"};
    // [eval]
    std::size_t eval_nx{100};
    std::size_t eval_ny{50};
    std::vector<double> eval_times{};  // empty: five evenly spaced times over [0, t_max]

    std::string to_text() const;
    friend bool operator==(const RunConfig& a, const RunConfig& b) { return a.to_text() == b.to_text(); }
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

// "section.key=value"; throws ConfigError on unknown keys or bad values.
void apply_override(RunConfig& config, std::string_view assignment);
void set_value(RunConfig& config, std::string_view section, std::string_view key, std::string_view value);

PdeProblem make_problem(const RunConfig& config);
ModelConfig make_model_config(const RunConfig& config);
GridSpec make_grid(const RunConfig& config);
std::vector<std::size_t> eval_nodes(const RunConfig& config);
std::vector<double> eval_times(const RunConfig& config);

// Every (section, key) pair the parser accepts, in emission order.
std::vector<std::pair<std::string, std::string>> config_keys();

}  // namespace qpinn
