#pragma once

// Exact statevector simulation of small qubit registers.
//
// Amplitude index bit q holds qubit q (qubit 0 is the least-significant bit).
// RY(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]], RZ(t) = diag(e^{-it/2}, e^{it/2}),
// RX(t) = [[cos t/2, -i sin t/2], [-i sin t/2, cos t/2]].

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace qpinn {

using cplx = std::complex<double>;

inline constexpr unsigned kMaxQubits = 20;

enum class GateKind { RY, RZ, RX, CNOT };

std::string_view gate_name(GateKind kind);

struct GateOp {
    GateKind kind{GateKind::RY};
    unsigned target{0};
    std::optional<unsigned> control;
    double angle{0.0};

    static GateOp ry(unsigned q, double angle) { return {GateKind::RY, q, std::nullopt, angle}; }
    static GateOp rz(unsigned q, double angle) { return {GateKind::RZ, q, std::nullopt, angle}; }
    static GateOp rx(unsigned q, double angle) { return {GateKind::RX, q, std::nullopt, angle}; }
    static GateOp cnot(unsigned control, unsigned target) {
        return {GateKind::CNOT, target, control, 0.0};
    }

    bool is_rotation() const { return kind != GateKind::CNOT; }
    friend bool operator==(const GateOp&, const GateOp&) = default;
};

class StateVector {
  public:
    // |0...0> on n qubits; throws std::invalid_argument outside [1, kMaxQubits].
    explicit StateVector(unsigned n_qubits);

    unsigned n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }

    std::span<const cplx> amplitudes() const { return amps_; }
    std::span<cplx> amplitudes() { return amps_; }
    const cplx& operator[](std::size_t k) const { return amps_[k]; }
    cplx& operator[](std::size_t k) { return amps_[k]; }

    double norm_sq() const;

    // In-place gate application; the free functions below wrap this.
    void apply(const GateOp& gate);
    void apply(std::span<const GateOp> gates);

  private:
    unsigned n_qubits_;
    std::vector<cplx> amps_;
};

StateVector init_zero_state(unsigned n_qubits);

// Throws std::out_of_range on bad qubit indices, std::invalid_argument on a
// CNOT without a distinct control.
StateVector apply_gate(StateVector state, const GateOp& gate);

void validate_gate(const GateOp& gate, unsigned n_qubits);

double expect_z(const StateVector& state, unsigned qubit);
double expect_z_sum(const StateVector& state);
// <Z x Z x ... x Z> over all qubits.
double expect_z_product(const StateVector& state);

}  // namespace qpinn
