#pragma once

// Angle-encoding + layered variational circuit construction and execution.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qpinn/quantum.hpp"

namespace qpinn {

enum class Entangler { chain, ring };

struct AnsatzSpec {
    unsigned n_qubits{1};
    unsigned n_layers{0};
    std::vector<GateKind> rotation_pattern{GateKind::RY, GateKind::RZ};
    Entangler entangler{Entangler::chain};

    std::size_t parameter_count() const {
        return std::size_t{n_layers} * n_qubits * rotation_pattern.size();
    }
    std::size_t cnots_per_layer() const;
    // Throws std::invalid_argument on an inconsistent spec.
    void validate() const;
};

// A fully bound circuit. Slot lists index into `gates`.
struct BoundCircuit {
    unsigned n_qubits{0};
    std::vector<GateOp> gates;
    std::vector<std::size_t> enc_slots;
    std::vector<std::size_t> var_slots;
};

// One RY(angles[q]) per qubit, in qubit order.
std::vector<GateOp> build_encoding(std::span<const double> angles);

// Layer-major, qubit-minor, pattern-innermost: theta[(l * n + q) * |pattern| + r]
// drives rotation r on qubit q in layer l. Each layer ends with its CNOTs.
std::vector<GateOp> build_ansatz(const AnsatzSpec& spec, std::span<const double> theta);

BoundCircuit bind_circuit(const AnsatzSpec& spec, std::span<const double> enc_angles,
                          std::span<const double> theta);

// |0> -> encoding -> ansatz. Each call counts as one circuit execution.
StateVector run_circuit_state(const AnsatzSpec& spec, std::span<const double> enc_angles,
                              std::span<const double> theta);

// Per-qubit <Z_q> after running the circuit.
std::vector<double> run_circuit(unsigned n_qubits, std::span<const double> enc_angles,
                                const AnsatzSpec& spec, std::span<const double> theta);

// Process-wide count of run_circuit / run_circuit_state calls.
std::uint64_t circuit_executions();

// One gate per line ("RY q0 0.7312", "CNOT q0 q1"); with `mark_slots`, a
// trailing "enc" / "var[k]" tag.
std::string format_circuit(const BoundCircuit& circuit, bool mark_slots = false, int precision = 4);

}  // namespace qpinn
