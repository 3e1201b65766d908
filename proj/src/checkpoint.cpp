#include "qpinn/checkpoint.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "qpinn/io.hpp"

namespace qpinn {
namespace {

std::string hex(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

void put_vector(std::string& out, const char* name, const std::vector<double>& v) {
    out += name;
    out += ' ' + std::to_string(v.size());
    for (double x : v) out += ' ' + hex(x);
    out += '\n';
}

class Reader {
  public:
    explicit Reader(const std::string& text) : in_(text) {}

    std::string line() {
        std::string l;
        if (!std::getline(in_, l)) throw CheckpointError("checkpoint truncated");
        return l;
    }

    void expect_word(std::istringstream& ls, const std::string& word) {
        std::string got;
        ls >> got;
        if (got != word) throw CheckpointError("checkpoint: expected '" + word + "', found '" + got + "'");
    }

    std::uint64_t read_uint(const std::string& name) {
        std::istringstream ls(line());
        expect_word(ls, name);
        std::uint64_t v = 0;
        if (!(ls >> v)) throw CheckpointError("checkpoint: bad value for " + name);
        return v;
    }

    std::vector<double> read_vector(const std::string& name) {
        std::istringstream ls(line());
        expect_word(ls, name);
        std::size_t n = 0;
        if (!(ls >> n)) throw CheckpointError("checkpoint: bad length for " + name);
        std::vector<double> v(n);
        for (auto& x : v) {
            std::string tok;
            if (!(ls >> tok)) throw CheckpointError("checkpoint: short vector " + name);
            char* end = nullptr;
            errno = 0;
            x = std::strtod(tok.c_str(), &end);
            if (errno != 0 || end != tok.c_str() + tok.size()) {
                throw CheckpointError("checkpoint: bad number '" + tok + "' in " + name);
            }
        }
        return v;
    }

  private:
    std::istringstream in_;
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
    const TrainState& s = ckpt.state;
    std::string out = std::string(kCheckpointTag) + '\n';
    out += "[config]\n" + ckpt.config_text;
    if (!ckpt.config_text.empty() && ckpt.config_text.back() != '\n') out += '\n';
    out += "[end-config]\n";
    out += "epoch " + std::to_string(s.epoch) + '\n';
    out += "step " + std::to_string(s.step) + '\n';
    out += "seed " + std::to_string(s.seed) + '\n';
    out += "rng " + s.rng_state + '\n';
    put_vector(out, "theta", s.params.theta);
    std::vector<double> dims(s.params.xi.layer_dims.begin(), s.params.xi.layer_dims.end());
    put_vector(out, "xi_dims", dims);
    std::vector<double> xi;
    s.params.xi.flatten_into(xi);
    put_vector(out, "xi", xi);
    put_vector(out, "outmap", {s.params.scale, s.params.bias});
    put_vector(out, "adam_m", s.adam_m);
    put_vector(out, "adam_v", s.adam_v);
    out += "end\n";
    return out;
}

Checkpoint parse_checkpoint(const std::string& text) {
    Reader r(text);
    if (r.line() != kCheckpointTag) throw CheckpointError("not a checkpoint (missing format tag)");
    if (r.line() != "[config]") throw CheckpointError("checkpoint: missing [config] block");
    Checkpoint ckpt;
    for (std::string l = r.line(); l != "[end-config]"; l = r.line()) ckpt.config_text += l + '\n';

    TrainState& s = ckpt.state;
    s.epoch = r.read_uint("epoch");
    s.step = r.read_uint("step");
    s.seed = r.read_uint("seed");
    {
        const std::string l = r.line();
        if (l.rfind("rng ", 0) != 0) throw CheckpointError("checkpoint: missing rng state");
        s.rng_state = l.substr(4);
    }
    s.params.theta = r.read_vector("theta");
    std::vector<std::size_t> dims;
    for (double d : r.read_vector("xi_dims")) dims.push_back(static_cast<std::size_t>(d));
    try {
        s.params.xi = EmbeddingParams::zeros(dims);
    } catch (const std::invalid_argument& e) {
        throw CheckpointError(std::string("checkpoint: ") + e.what());
    }
    const std::vector<double> xi = r.read_vector("xi");
    if (xi.size() != s.params.xi.parameter_count()) throw CheckpointError("checkpoint: xi size mismatch");
    s.params.xi.assign_from(xi);
    const std::vector<double> outmap = r.read_vector("outmap");
    if (outmap.size() != 2) throw CheckpointError("checkpoint: outmap must have 2 entries");
    s.params.scale = outmap[0];
    s.params.bias = outmap[1];
    s.adam_m = r.read_vector("adam_m");
    s.adam_v = r.read_vector("adam_v");
    if (s.adam_m.size() != s.params.parameter_count() || s.adam_v.size() != s.params.parameter_count()) {
        throw CheckpointError("checkpoint: optimizer moments do not match parameters");
    }
    if (r.line() != "end") throw CheckpointError("checkpoint: missing end marker");
    return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    atomic_write(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw CheckpointError(e.what());
    }
    return parse_checkpoint(text);
}

}  // namespace qpinn
