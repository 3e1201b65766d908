#include "qpinn/quantum.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "qpinn/simd/kernels.hpp"

namespace qpinn {

std::string_view gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::RY: return "RY";
        case GateKind::RZ: return "RZ";
        case GateKind::RX: return "RX";
        case GateKind::CNOT: return "CNOT";
    }
    return "?";
}

StateVector::StateVector(unsigned n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw std::invalid_argument("qubit count " + std::to_string(n_qubits) +
                                    " outside [1, " + std::to_string(kMaxQubits) + "]");
    }
    amps_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
    amps_[0] = 1.0;
}

double StateVector::norm_sq() const { return simd::kernels().norm_sq(amps_.data(), amps_.size()); }

void validate_gate(const GateOp& gate, unsigned n_qubits) {
    if (gate.target >= n_qubits) {
        throw std::out_of_range("gate target q" + std::to_string(gate.target) + " on " +
                                std::to_string(n_qubits) + "-qubit state");
    }
    if (gate.kind == GateKind::CNOT) {
        if (!gate.control) throw std::invalid_argument("CNOT without control qubit");
        if (*gate.control >= n_qubits) {
            throw std::out_of_range("CNOT control q" + std::to_string(*gate.control) + " on " +
                                    std::to_string(n_qubits) + "-qubit state");
        }
        if (*gate.control == gate.target) {
            throw std::invalid_argument("CNOT control equals target");
        }
    } else if (gate.control) {
        throw std::invalid_argument("rotation gate with a control qubit");
    }
}

void StateVector::apply(const GateOp& gate) {
    validate_gate(gate, n_qubits_);
    const auto& k = simd::kernels();
    const double c = std::cos(0.5 * gate.angle);
    const double s = std::sin(0.5 * gate.angle);
    switch (gate.kind) {
        case GateKind::RY: k.rotate_real(amps_.data(), amps_.size(), gate.target, c, s); break;
        case GateKind::RZ: k.phase_pair(amps_.data(), amps_.size(), gate.target, c, s); break;
        case GateKind::RX: k.rotate_x(amps_.data(), amps_.size(), gate.target, c, s); break;
        case GateKind::CNOT: {
            const std::size_t cmask = std::size_t{1} << *gate.control;
            const std::size_t tmask = std::size_t{1} << gate.target;
            for (std::size_t i = 0; i < amps_.size(); ++i) {
                if ((i & cmask) != 0 && (i & tmask) == 0) std::swap(amps_[i], amps_[i | tmask]);
            }
            break;
        }
    }
}

void StateVector::apply(std::span<const GateOp> gates) {
    for (const auto& g : gates) apply(g);
}

StateVector init_zero_state(unsigned n_qubits) { return StateVector(n_qubits); }

StateVector apply_gate(StateVector state, const GateOp& gate) {
    state.apply(gate);
    return state;
}

double expect_z(const StateVector& state, unsigned qubit) {
    if (qubit >= state.n_qubits()) {
        throw std::out_of_range("expect_z on q" + std::to_string(qubit) + " of " +
                                std::to_string(state.n_qubits()) + "-qubit state");
    }
    const auto amps = state.amplitudes();
    return simd::kernels().expect_z(amps.data(), amps.size(), qubit);
}

double expect_z_sum(const StateVector& state) {
    double acc = 0.0;
    for (unsigned q = 0; q < state.n_qubits(); ++q) acc += expect_z(state, q);
    return acc;
}

double expect_z_product(const StateVector& state) {
    // Z x ... x Z is diagonal with entry (-1)^popcount(k).
    double acc = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t k = 0; k < amps.size(); ++k) {
        const double p = std::norm(amps[k]);
        acc += (std::popcount(k) & 1) ? -p : p;
    }
    return acc;
}

}  // namespace qpinn
