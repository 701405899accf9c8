#include "qgnn/statevector.hpp"

#include "qgnn/graph.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace qgnn {

namespace {

constexpr int kMaxQubits = 26; // 2^26 amplitudes = 1 GiB; well past experiment sizes

void check_qubit(const StateVector &state, int qubit) {
    if (qubit < 0 || qubit >= state.n_qubits()) {
        throw std::invalid_argument(
            fmt::format("qubit {} out of range for {} qubits", qubit, state.n_qubits()));
    }
}

} // namespace

bool is_two_qubit(GateKind kind) {
    return kind == GateKind::ZZPhase || kind == GateKind::CRX;
}

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw std::invalid_argument(
            fmt::format("statevector size {} outside [1, {}]", n_qubits, kMaxQubits));
    }
    amps_.assign(std::size_t{1} << n_qubits, Amplitude{0.0, 0.0});
    amps_[0] = Amplitude{1.0, 0.0};
}

double StateVector::norm() const {
    double total = 0.0;
    for (const auto &a : amps_) {
        total += std::norm(a);
    }
    return std::sqrt(total);
}

StateVector init_product_state(int n, const std::array<double, 3> &euler) {
    StateVector state(n);
    for (int v = 0; v < n; ++v) {
        apply_gate(state, {GateKind::RX, v, -1, euler[0]});
        apply_gate(state, {GateKind::RZ, v, -1, euler[1]});
        apply_gate(state, {GateKind::RX, v, -1, euler[2]});
    }
    return state;
}

void apply_gate(StateVector &state, const GateOp &gate) {
    check_qubit(state, gate.q0);
    if (is_two_qubit(gate.kind)) {
        check_qubit(state, gate.q1);
        if (gate.q0 == gate.q1) {
            throw std::invalid_argument("two-qubit gate needs distinct qubits");
        }
    }

    auto amps = state.amplitudes();
    const std::size_t size = amps.size();
    const std::uint64_t m0 = std::uint64_t{1} << gate.q0;
    const double c = std::cos(gate.angle / 2.0);
    const double s = std::sin(gate.angle / 2.0);

    switch (gate.kind) {
    case GateKind::RX: {
        const Amplitude is{0.0, -s};
        for (std::uint64_t i = 0; i < size; ++i) {
            if (!(i & m0)) {
                const Amplitude a = amps[i];
                const Amplitude b = amps[i | m0];
                amps[i] = c * a + is * b;
                amps[i | m0] = is * a + c * b;
            }
        }
        break;
    }
    case GateKind::RY: {
        for (std::uint64_t i = 0; i < size; ++i) {
            if (!(i & m0)) {
                const Amplitude a = amps[i];
                const Amplitude b = amps[i | m0];
                amps[i] = c * a - s * b;
                amps[i | m0] = s * a + c * b;
            }
        }
        break;
    }
    case GateKind::RZ: {
        const Amplitude p0{c, -s}; // exp(-i angle/2)
        const Amplitude p1{c, +s};
        for (std::uint64_t i = 0; i < size; ++i) {
            amps[i] *= (i & m0) ? p1 : p0;
        }
        break;
    }
    case GateKind::ZZPhase: {
        const std::uint64_t m1 = std::uint64_t{1} << gate.q1;
        const Amplitude even{c, -s}; // Z x Z eigenvalue +1
        const Amplitude odd{c, +s};
        for (std::uint64_t i = 0; i < size; ++i) {
            const bool same = ((i & m0) != 0) == ((i & m1) != 0);
            amps[i] *= same ? even : odd;
        }
        break;
    }
    case GateKind::CRX: {
        const std::uint64_t ctrl = std::uint64_t{1} << gate.q1;
        const Amplitude is{0.0, -s};
        for (std::uint64_t i = 0; i < size; ++i) {
            if ((i & ctrl) && !(i & m0)) {
                const Amplitude a = amps[i];
                const Amplitude b = amps[i | m0];
                amps[i] = c * a + is * b;
                amps[i | m0] = is * a + c * b;
            }
        }
        break;
    }
    }
}

Amplitude generator_overlap(const StateVector &bra, const StateVector &ket, const GateOp &gate) {
    if (bra.n_qubits() != ket.n_qubits()) {
        throw std::invalid_argument("generator_overlap: size mismatch");
    }
    const auto b = bra.amplitudes();
    const auto k = ket.amplitudes();
    const std::size_t size = k.size();
    const std::uint64_t m0 = std::uint64_t{1} << gate.q0;
    Amplitude acc{0.0, 0.0};

    switch (gate.kind) {
    case GateKind::RX: // P = X
        for (std::uint64_t i = 0; i < size; ++i) {
            acc += std::conj(b[i]) * k[i ^ m0];
        }
        break;
    case GateKind::RY: // P = Y
        for (std::uint64_t i = 0; i < size; ++i) {
            const Amplitude phase = (i & m0) ? Amplitude{0.0, 1.0} : Amplitude{0.0, -1.0};
            acc += std::conj(b[i]) * phase * k[i ^ m0];
        }
        break;
    case GateKind::RZ: // P = Z
        for (std::uint64_t i = 0; i < size; ++i) {
            const double sign = (i & m0) ? -1.0 : 1.0;
            acc += std::conj(b[i]) * sign * k[i];
        }
        break;
    case GateKind::ZZPhase: { // P = Z x Z
        const std::uint64_t m1 = std::uint64_t{1} << gate.q1;
        for (std::uint64_t i = 0; i < size; ++i) {
            const bool same = ((i & m0) != 0) == ((i & m1) != 0);
            acc += std::conj(b[i]) * (same ? 1.0 : -1.0) * k[i];
        }
        break;
    }
    case GateKind::CRX: { // P = |1><1|_ctrl x X_target
        const std::uint64_t ctrl = std::uint64_t{1} << gate.q1;
        for (std::uint64_t i = 0; i < size; ++i) {
            if (i & ctrl) {
                acc += std::conj(b[i]) * k[i ^ m0];
            }
        }
        break;
    }
    }
    return acc;
}

std::vector<double> probabilities(const StateVector &state) {
    std::vector<double> probs(state.size());
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < probs.size(); ++i) {
        probs[i] = std::norm(amps[i]);
    }
    return probs;
}

double marginal_one(const StateVector &state, int qubit) {
    check_qubit(state, qubit);
    const std::uint64_t mask = std::uint64_t{1} << qubit;
    const auto amps = state.amplitudes();
    double total = 0.0;
    for (std::uint64_t i = 0; i < amps.size(); ++i) {
        if (i & mask) {
            total += std::norm(amps[i]);
        }
    }
    return total;
}

double expectation_diag(const StateVector &state, std::span<const double> eigenvalues) {
    if (eigenvalues.size() != state.size()) {
        throw std::invalid_argument(
            fmt::format("expectation_diag: {} eigenvalues for {} amplitudes",
                        eigenvalues.size(), state.size()));
    }
    const auto amps = state.amplitudes();
    double total = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        total += std::norm(amps[i]) * eigenvalues[i];
    }
    return total;
}

StateVector permute_amplitudes(const StateVector &state, const Permutation &s) {
    if (s.size() != state.n_qubits()) {
        throw std::invalid_argument("permute_amplitudes: permutation size mismatch");
    }
    StateVector out(state.n_qubits());
    const auto src = state.amplitudes();
    auto dst = out.amplitudes();
    for (std::uint64_t b = 0; b < src.size(); ++b) {
        dst[permute_bits(b, s)] = src[b];
    }
    return out;
}

} // namespace qgnn
