#pragma once

// Batched evaluation of the hybrid model for a fixed variational angle set.
//
// The encoding acts on |0...0>, so the encoded state is the real product
// vector psi = (x)_q (cos(phi_q/2), sin(phi_q/2)). With U the ansatz unitary and
// O the aggregated observable, the raw output is psi^T M psi, M = Re(U^dag O U).
// M is built once per parameter update; each point then costs one dense
// quadratic form instead of a statevector run. Variational gradients contract
// the parameter-shifted matrices against R = sum_p w_p psi_p psi_p^T.

#include <cstddef>
#include <span>
#include <vector>

#include "qpinn/model.hpp"

namespace qpinn {

// Real product state of the RY encoding; out.size() must be 2^n.
void encoding_state(std::span<const double> angles, std::span<double> out);

// d psi / d phi_q for every q, stored as n consecutive 2^n blocks.
void encoding_state_derivatives(std::span<const double> angles, std::span<double> out);

// grad[q] = v . d psi / d phi_q for all q in one reverse sweep over the
// product build. scratch needs 2 * 2^n entries.
void encoding_backward(std::span<const double> angles, std::span<const double> v, std::span<double> grad,
                       std::span<double> scratch);

// Re(U^dag O U) for the ansatz bound to theta, row-major 2^n x 2^n.
std::vector<double> observable_matrix(const ModelConfig& config, std::span<const double> theta);

class CompiledObservable {
  public:
    CompiledObservable(const ModelConfig& config, std::span<const double> theta);

    std::size_t dim() const { return dim_; }
    unsigned n_qubits() const { return n_qubits_; }
    std::span<const double> matrix() const { return m_; }

    // psi^T M psi; writes M psi into `m_psi`.
    double value(std::span<const double> psi, std::span<double> m_psi) const;

    // d/dphi_q of psi^T M psi given M psi and the encoding derivatives.
    void angle_gradient(std::span<const double> m_psi, std::span<const double> dpsi,
                        std::span<double> out) const;

    // g_k = <dM/dtheta_k, R>_F, with dM/dtheta_k from the +/- pi/2 shift rule.
    std::vector<double> theta_gradient(std::span<const double> r) const;

  private:
    ModelConfig config_;
    std::vector<double> theta_;
    unsigned n_qubits_;
    std::size_t dim_;
    std::vector<double> m_;
};

// Raw (pre output-map) value of one point through the compiled path.
double compiled_raw_output(const CompiledObservable& obs, const EmbeddingParams& xi,
                           std::span<const double> point);

}  // namespace qpinn
