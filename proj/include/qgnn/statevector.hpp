#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace qgnn {

class Permutation;

using Amplitude = std::complex<double>;

enum class GateKind { RX, RY, RZ, ZZPhase, CRX };

// One gate application. All rotations use the convention
// U = exp(-i * angle/2 * P) for the gate's Pauli word P; CRX applies RX on the
// target conditioned on the control qubit being |1>.
struct GateOp {
    GateKind kind;
    int q0;         // target qubit
    int q1 = -1;    // second qubit: ZZPhase partner or CRX control
    double angle = 0.0;
};

bool is_two_qubit(GateKind kind);

/// Dense 2^n complex statevector. Constructed in |0...0>.
class StateVector {
  public:
    explicit StateVector(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    std::size_t size() const { return amps_.size(); }
    std::span<Amplitude> amplitudes() { return amps_; }
    std::span<const Amplitude> amplitudes() const { return amps_; }
    Amplitude &operator[](std::size_t i) { return amps_[i]; }
    const Amplitude &operator[](std::size_t i) const { return amps_[i]; }

    double norm() const;

  private:
    int n_qubits_;
    std::vector<Amplitude> amps_;
};

/// |psi>^(x n) with |psi> = RX(a2) RZ(a1) RX(a0) |0>, angles = (a0, a1, a2).
StateVector init_product_state(int n, const std::array<double, 3> &euler);

/// In-place gate application; norm-preserving, linear in the amplitudes.
void apply_gate(StateVector &state, const GateOp &gate);

/// <bra|P|ket> for the gate's generator P (the Pauli word; for CRX the
/// projector-conditioned X). Used by the adjoint gradient sweep.
Amplitude generator_overlap(const StateVector &bra, const StateVector &ket, const GateOp &gate);

std::vector<double> probabilities(const StateVector &state);

/// P(measuring |1> on the given qubit).
double marginal_one(const StateVector &state, int qubit);

/// Sum_b |amp_b|^2 * eigenvalues[b] for a diagonal observable.
double expectation_diag(const StateVector &state, std::span<const double> eigenvalues);

/// Basis relabelling: amplitude at index b moves to the index whose bit s(v)
/// equals bit v of b. Equals conjugating the state by the qubit permutation.
StateVector permute_amplitudes(const StateVector &state, const Permutation &s);

} // namespace qgnn
