#include "qpinn/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "qpinn/io.hpp"

namespace qpinn {
namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double to_double(std::string_view v) {
    const std::string s = trim(v);
    char* end = nullptr;
    errno = 0;
    const double d = std::strtod(s.c_str(), &end);
    if (s.empty() || errno != 0 || end != s.c_str() + s.size()) {
        throw ConfigError("expected a number, got '" + s + "'");
    }
    return d;
}

std::uint64_t to_uint(std::string_view v) {
    const std::string s = trim(v);
    char* end = nullptr;
    errno = 0;
    const unsigned long long u = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || s[0] == '-' || errno != 0 || end != s.c_str() + s.size()) {
        throw ConfigError("expected a non-negative integer, got '" + s + "'");
    }
    return u;
}

bool to_bool(std::string_view v) {
    const std::string s = trim(v);
    if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "off" || s == "no") return false;
    throw ConfigError("expected true/false, got '" + s + "'");
}

std::vector<std::string> split(std::string_view v) {
    std::vector<std::string> out;
    std::istringstream ss{std::string(v)};
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

GateKind to_rotation(const std::string& s) {
    if (s == "RY") return GateKind::RY;
    if (s == "RZ") return GateKind::RZ;
    if (s == "RX") return GateKind::RX;
    throw ConfigError("unknown rotation '" + s + "' (expected RY, RZ or RX)");
}

template <class T>
std::string join(const std::vector<T>& v, const std::function<std::string(const T&)>& f) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += f(v[i]);
    }
    return out;
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

struct Entry {
    const char* section;
    const char* key;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define QPINN_NUM(sec, name, field)                                                            \
    Entry {                                                                                    \
        sec, name, [](RunConfig& c, std::string_view v) { c.field = to_double(v); },           \
            [](const RunConfig& c) { return format_double(c.field); }                          \
    }
#define QPINN_UINT(sec, name, field, type)                                                     \
    Entry {                                                                                    \
        sec, name, [](RunConfig& c, std::string_view v) { c.field = static_cast<type>(to_uint(v)); }, \
            [](const RunConfig& c) { return std::to_string(c.field); }                         \
    }
#define QPINN_BOOL(sec, name, field)                                                           \
    Entry {                                                                                    \
        sec, name, [](RunConfig& c, std::string_view v) { c.field = to_bool(v); },             \
            [](const RunConfig& c) { return fmt_bool(c.field); }                               \
    }
#define QPINN_STR(sec, name, field)                                                            \
    Entry {                                                                                    \
        sec, name, [](RunConfig& c, std::string_view v) { c.field = trim(v); },                \
            [](const RunConfig& c) { return c.field; }                                         \
    }

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        QPINN_STR("problem", "name", problem),

        QPINN_UINT("grid", "nx", nx, std::size_t),
        QPINN_UINT("grid", "ny", ny, std::size_t),
        QPINN_UINT("grid", "nt", nt, std::size_t),
        QPINN_NUM("grid", "subsample", subsample),

        QPINN_UINT("model", "n_qubits", n_qubits, unsigned),
        QPINN_UINT("model", "layers", layers, unsigned),
        Entry{"model", "rotations",
              [](RunConfig& c, std::string_view v) {
                  c.rotations.clear();
                  for (const auto& s : split(v)) c.rotations.push_back(to_rotation(s));
              },
              [](const RunConfig& c) {
                  return join<GateKind>(c.rotations, [](const GateKind& k) { return std::string(gate_name(k)); });
              }},
        Entry{"model", "entangler",
              [](RunConfig& c, std::string_view v) {
                  const std::string s = trim(v);
                  if (s == "chain") c.entangler = Entangler::chain;
                  else if (s == "ring") c.entangler = Entangler::ring;
                  else throw ConfigError("unknown entangler '" + s + "' (expected chain or ring)");
              },
              [](const RunConfig& c) { return std::string(c.entangler == Entangler::ring ? "ring" : "chain"); }},
        Entry{"model", "hidden",
              [](RunConfig& c, std::string_view v) {
                  c.hidden.clear();
                  const std::string s = trim(v);
                  if (s.empty() || s == "none") return;
                  for (const auto& item : split(s)) {
                      const auto w = to_uint(item);
                      if (w == 0) throw ConfigError("hidden layer width must be positive");
                      c.hidden.push_back(w);
                  }
              },
              [](const RunConfig& c) {
                  if (c.hidden.empty()) return std::string("none");
                  return join<std::size_t>(c.hidden, [](const std::size_t& w) { return std::to_string(w); });
              }},
        Entry{"model", "aggregation",
              [](RunConfig& c, std::string_view v) {
                  try {
                      c.aggregation = parse_aggregation(trim(v));
                  } catch (const std::invalid_argument& e) {
                      throw ConfigError(e.what());
                  }
              },
              [](const RunConfig& c) { return std::string(aggregation_name(c.aggregation)); }},
        QPINN_BOOL("model", "output_map", output_map),
        QPINN_NUM("model", "output_scale", output_scale),
        QPINN_NUM("model", "output_bias", output_bias),
        QPINN_NUM("model", "fd_step", fd_step),

        QPINN_UINT("train", "epochs", train.epochs, std::uint64_t),
        QPINN_NUM("train", "learning_rate", train.learning_rate),
        QPINN_NUM("train", "adam_beta1", train.adam_beta1),
        QPINN_NUM("train", "adam_beta2", train.adam_beta2),
        QPINN_NUM("train", "adam_eps", train.adam_eps),
        QPINN_UINT("train", "seed", train.seed, std::uint64_t),
        QPINN_UINT("train", "log_every", train.log_every, std::uint64_t),
        QPINN_NUM("train", "lambda_bc", train.lambda_bc),
        QPINN_NUM("train", "lambda_ic", train.lambda_ic),
        QPINN_NUM("train", "theta_init_range", train.theta_init_range),
        QPINN_BOOL("train", "record_wall_time", train.record_wall_time),

        QPINN_STR("output", "dir", output_dir),
        QPINN_STR("output", "checkpoint", checkpoint),

        QPINN_UINT("eval", "nx", eval_nx, std::size_t),
        QPINN_UINT("eval", "ny", eval_ny, std::size_t),
        Entry{"eval", "times",
              [](RunConfig& c, std::string_view v) {
                  const std::string s = trim(v);
                  c.eval_times.clear();
                  if (s.empty() || s == "auto") return;
                  try {
                      c.eval_times = parse_double_list(s);
                  } catch (const std::invalid_argument& e) {
                      throw ConfigError(e.what());
                  }
              },
              [](const RunConfig& c) {
                  if (c.eval_times.empty()) return std::string("auto");
                  return join<double>(c.eval_times, [](const double& t) { return format_double(t); });
              }},
    };
    return table;
}

#undef QPINN_NUM
#undef QPINN_UINT
#undef QPINN_BOOL
#undef QPINN_STR

}  // namespace

std::vector<std::pair<std::string, std::string>> config_keys() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : entries()) out.emplace_back(e.section, e.key);
    return out;
}

void set_value(RunConfig& config, std::string_view section, std::string_view key, std::string_view value) {
    for (const auto& e : entries()) {
        if (section == e.section && key == e.key) {
            try {
                e.set(config, value);
            } catch (const ConfigError& err) {
                throw ConfigError(std::string(section) + "." + std::string(key) + ": " + err.what());
            }
            return;
        }
    }
    throw ConfigError("unknown config key '" + std::string(section) + "." + std::string(key) + "'");
}

void apply_override(RunConfig& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
        throw ConfigError("override must look like section.key=value, got '" + std::string(assignment) + "'");
    }
    set_value(config, trim(assignment.substr(0, dot)), trim(assignment.substr(dot + 1, eq - dot - 1)),
              assignment.substr(eq + 1));
}

std::string RunConfig::to_text() const {
    std::string out;
    std::string section;
    for (const auto& e : entries()) {
        if (section != e.section) {
            if (!section.empty()) out += '\n';
            section = e.section;
            out += '[' + section + "]\n";
        }
        out += std::string(e.key) + " = " + e.get(*this) + '\n';
    }
    return out;
}

RunConfig parse_config(std::string_view text) {
    RunConfig config;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (body.front() == '[') {
            if (body.back() != ']') throw ConfigError(where + "malformed section header '" + body + "'");
            section = trim(std::string_view(body).substr(1, body.size() - 2));
            bool known = false;
            for (const auto& e : entries()) known = known || section == e.section;
            if (!known) throw ConfigError(where + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value, got '" + body + "'");
        if (section.empty()) throw ConfigError(where + "key outside of any [section]");
        try {
            set_value(config, section, trim(std::string_view(body).substr(0, eq)),
                      std::string_view(body).substr(eq + 1));
        } catch (const ConfigError& err) {
            throw ConfigError(where + err.what());
        }
    }
    return config;
}

RunConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text);
}

PdeProblem make_problem(const RunConfig& config) {
    try {
        return problem_by_name(config.problem);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ModelConfig make_model_config(const RunConfig& config) {
    const PdeProblem problem = make_problem(config);
    ModelConfig m;
    m.ansatz.n_qubits = config.n_qubits;
    m.ansatz.n_layers = config.layers;
    m.ansatz.rotation_pattern = config.rotations;
    m.ansatz.entangler = config.entangler;
    m.embedding_dims.push_back(problem.input_dim());
    m.embedding_dims.insert(m.embedding_dims.end(), config.hidden.begin(), config.hidden.end());
    m.embedding_dims.push_back(config.n_qubits);
    m.aggregation = config.aggregation;
    m.output_scale = config.output_scale;
    m.output_bias = config.output_bias;
    m.train_output_map = config.output_map;
    m.fd_step = config.fd_step;
    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return m;
}

GridSpec make_grid(const RunConfig& config) {
    const PdeProblem problem = make_problem(config);
    GridSpec g;
    g.spatial = {config.nx};
    if (problem.spatial_dim == 2) g.spatial.push_back(config.ny);
    g.nt = config.nt;
    g.subsample = config.subsample;
    return g;
}

std::vector<std::size_t> eval_nodes(const RunConfig& config) {
    const PdeProblem problem = make_problem(config);
    std::vector<std::size_t> nodes{config.eval_nx};
    if (problem.spatial_dim == 2) nodes.push_back(config.eval_ny);
    return nodes;
}

std::vector<double> eval_times(const RunConfig& config) {
    if (!config.eval_times.empty()) return config.eval_times;
    const PdeProblem problem = make_problem(config);
    std::vector<double> times;
    for (int i = 0; i < 5; ++i) times.push_back(problem.t_max * i / 4.0);
    return times;
}

}  // namespace qpinn
