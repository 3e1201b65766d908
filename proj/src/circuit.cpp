#include "qpinn/circuit.hpp"

#include <atomic>
#include <cstdio>
#include <stdexcept>

namespace qpinn {
namespace {

std::atomic<std::uint64_t> g_executions{0};

void check_length(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(want) +
                                    " angles, got " + std::to_string(got));
    }
}

}  // namespace

std::size_t AnsatzSpec::cnots_per_layer() const {
    if (n_qubits < 2) return 0;
    return (n_qubits - 1) + (entangler == Entangler::ring ? 1 : 0);
}

void AnsatzSpec::validate() const {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw std::invalid_argument("ansatz qubit count out of range");
    }
    if (n_layers > 0 && rotation_pattern.empty()) {
        throw std::invalid_argument("ansatz rotation pattern is empty");
    }
    for (auto k : rotation_pattern) {
        if (k == GateKind::CNOT) throw std::invalid_argument("CNOT in rotation pattern");
    }
    if (entangler == Entangler::ring && n_qubits < 2) {
        throw std::invalid_argument("ring entangler needs at least 2 qubits");
    }
}

std::vector<GateOp> build_encoding(std::span<const double> angles) {
    std::vector<GateOp> gates;
    gates.reserve(angles.size());
    for (std::size_t q = 0; q < angles.size(); ++q) {
        gates.push_back(GateOp::ry(static_cast<unsigned>(q), angles[q]));
    }
    return gates;
}

std::vector<GateOp> build_ansatz(const AnsatzSpec& spec, std::span<const double> theta) {
    spec.validate();
    check_length(theta.size(), spec.parameter_count(), "ansatz");
    const unsigned n = spec.n_qubits;
    std::vector<GateOp> gates;
    gates.reserve(spec.parameter_count() + spec.n_layers * spec.cnots_per_layer());
    std::size_t k = 0;
    for (unsigned layer = 0; layer < spec.n_layers; ++layer) {
        for (unsigned q = 0; q < n; ++q) {
            for (GateKind kind : spec.rotation_pattern) {
                gates.push_back(GateOp{kind, q, std::nullopt, theta[k++]});
            }
        }
        for (unsigned q = 0; q + 1 < n; ++q) gates.push_back(GateOp::cnot(q, q + 1));
        if (spec.entangler == Entangler::ring && n >= 2) gates.push_back(GateOp::cnot(n - 1, 0));
    }
    return gates;
}

BoundCircuit bind_circuit(const AnsatzSpec& spec, std::span<const double> enc_angles,
                          std::span<const double> theta) {
    check_length(enc_angles.size(), spec.n_qubits, "encoding");
    BoundCircuit out;
    out.n_qubits = spec.n_qubits;
    out.gates = build_encoding(enc_angles);
    for (std::size_t i = 0; i < out.gates.size(); ++i) out.enc_slots.push_back(i);
    const auto ansatz = build_ansatz(spec, theta);
    for (const auto& g : ansatz) {
        if (g.is_rotation()) out.var_slots.push_back(out.gates.size());
        out.gates.push_back(g);
    }
    return out;
}

StateVector run_circuit_state(const AnsatzSpec& spec, std::span<const double> enc_angles,
                              std::span<const double> theta) {
    const BoundCircuit circuit = bind_circuit(spec, enc_angles, theta);
    StateVector state = init_zero_state(spec.n_qubits);
    state.apply(circuit.gates);
    g_executions.fetch_add(1, std::memory_order_relaxed);
    return state;
}

std::vector<double> run_circuit(unsigned n_qubits, std::span<const double> enc_angles,
                                const AnsatzSpec& spec, std::span<const double> theta) {
    if (n_qubits != spec.n_qubits) {
        throw std::invalid_argument("run_circuit: qubit count disagrees with ansatz");
    }
    const StateVector state = run_circuit_state(spec, enc_angles, theta);
    std::vector<double> z(n_qubits);
    for (unsigned q = 0; q < n_qubits; ++q) z[q] = expect_z(state, q);
    return z;
}

std::uint64_t circuit_executions() { return g_executions.load(std::memory_order_relaxed); }

std::string format_circuit(const BoundCircuit& circuit, bool mark_slots, int precision) {
    std::vector<std::string> tags(circuit.gates.size());
    if (mark_slots) {
        for (auto i : circuit.enc_slots) tags[i] = "enc";
        for (std::size_t k = 0; k < circuit.var_slots.size(); ++k) {
            tags[circuit.var_slots[k]] = "var[" + std::to_string(k) + "]";
        }
    }
    std::string out;
    char buf[64];
    for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
        const GateOp& g = circuit.gates[i];
        out += gate_name(g.kind);
        if (g.kind == GateKind::CNOT) {
            std::snprintf(buf, sizeof buf, " q%u q%u", *g.control, g.target);
        } else {
            std::snprintf(buf, sizeof buf, " q%u %.*f", g.target, precision, g.angle);
        }
        out += buf;
        if (!tags[i].empty()) out += "  " + tags[i];
        out += '\n';
    }
    return out;
}

}  // namespace qpinn
