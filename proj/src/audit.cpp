#include "qgnn/audit.hpp"

#include "qgnn/rng.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace qgnn {

std::vector<Permutation> audit_permutations(int n, std::uint64_t seed) {
    if (n <= 5) {
        return all_permutations(n);
    }
    Rng rng(seed);
    std::vector<Permutation> sigmas;
    sigmas.reserve(50);
    for (int i = 0; i < 50; ++i) {
        sigmas.push_back(random_permutation(n, rng));
    }
    return sigmas;
}

double check_equivariance(const AnsatzSpec &spec, const Graph &g, const ParameterSet &params,
                          const Permutation &sigma) {
    const StateVector permuted_graph_state = apply_ansatz(spec, permute(g, sigma), params);
    const StateVector relabelled = permute_amplitudes(apply_ansatz(spec, g, params), sigma);
    double max_dev = 0.0;
    for (std::size_t b = 0; b < relabelled.size(); ++b) {
        max_dev = std::max(max_dev, std::abs(permuted_graph_state[b] - relabelled[b]));
    }
    return max_dev;
}

DatasetEntry permute_entry(const DatasetEntry &entry, const Permutation &sigma) {
    DatasetEntry out{permute(entry.graph, sigma), entry.omega, entry.target_bitstrings,
                     entry.edge_probability, entry.source_seed};
    for (Bitstring &b : out.target_bitstrings) {
        b = permute_bits(b, sigma);
    }
    std::sort(out.target_bitstrings.begin(), out.target_bitstrings.end());
    return out;
}

double check_loss_invariance(const ModelConfig &config, const DatasetEntry &entry,
                             std::span<const double> theta,
                             std::span<const Permutation> sigmas) {
    const double base = entry_loss(config, entry, theta).scalar;
    double max_delta = 0.0;
    for (const Permutation &sigma : sigmas) {
        const double value = entry_loss(config, permute_entry(entry, sigma), theta).scalar;
        max_delta = std::max(max_delta, std::abs(value - base));
    }
    return max_delta;
}

std::vector<AccuracyDropRow> permuted_accuracy_drop(const Checkpoint &checkpoint,
                                                    std::span<const DatasetEntry> entries,
                                                    int permutations_per_entry,
                                                    std::uint64_t seed) {
    if (permutations_per_entry < 1) {
        throw std::invalid_argument("permuted_accuracy_drop: needs >= 1 permutation per entry");
    }
    Rng rng(seed);
    std::vector<AccuracyDropRow> rows;
    rows.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const DatasetEntry &entry = entries[i];
        const EntryMetrics original = evaluate_entry(checkpoint.model, entry, checkpoint.theta);
        AccuracyDropRow row;
        row.entry_index = i;
        row.n = entry.graph.n();
        row.original_argmax = original.argmax_acc;
        row.original_dist = original.dist_acc;
        const double inv = 1.0 / static_cast<double>(permutations_per_entry);
        for (int k = 0; k < permutations_per_entry; ++k) {
            const Permutation sigma = random_permutation(entry.graph.n(), rng);
            const EntryMetrics permuted =
                evaluate_entry(checkpoint.model, permute_entry(entry, sigma), checkpoint.theta);
            row.permuted_argmax_mean += permuted.argmax_acc * inv;
            row.permuted_dist_mean += permuted.dist_acc * inv;
        }
        rows.push_back(row);
    }
    return rows;
}

namespace {

using Mat = Eigen::MatrixXcd;
using Cplx = std::complex<double>;

Mat gate_1q(GateKind kind, double angle) {
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    Mat m(2, 2);
    switch (kind) {
    case GateKind::RX:
        m << Cplx{c, 0}, Cplx{0, -s}, Cplx{0, -s}, Cplx{c, 0};
        break;
    case GateKind::RY:
        m << Cplx{c, 0}, Cplx{-s, 0}, Cplx{s, 0}, Cplx{c, 0};
        break;
    case GateKind::RZ:
        m << Cplx{c, -s}, Cplx{0, 0}, Cplx{0, 0}, Cplx{c, s};
        break;
    default:
        throw std::logic_error("not a one-qubit gate");
    }
    return m;
}

Mat kron(const Mat &a, const Mat &b) {
    Mat m(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            m.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return m;
}

// Two-qubit block basis: bit 0 = lower vertex (CRX target), bit 1 = higher
// vertex (CRX control); index = (b1 << 1) | b0.
Mat on_bit0(const Mat &g) { return kron(Mat::Identity(2, 2), g); }

Mat on_bit1(const Mat &g) { return kron(g, Mat::Identity(2, 2)); }

Mat zz_phase(double angle) {
    const Cplx same = std::exp(Cplx{0, -angle / 2.0});
    const Cplx diff = std::exp(Cplx{0, +angle / 2.0});
    Mat m = Mat::Zero(4, 4);
    m(0, 0) = same;
    m(1, 1) = diff;
    m(2, 2) = diff;
    m(3, 3) = same;
    return m;
}

Mat crx(double angle) {
    Mat m = Mat::Identity(4, 4);
    const Mat rx = gate_1q(GateKind::RX, angle);
    m.block(2, 2, 2, 2) = rx;
    return m;
}

/// The 4x4 unitary of one (anti-)edge block, given its slot values.
Mat pair_block_unitary(const AnsatzSpec &spec, std::span<const double> slots) {
    Mat u = Mat::Identity(4, 4);
    if (spec.family == AnsatzFamily::Rook) {
        u = zz_phase(slots[0]) * u;
        u = on_bit0(gate_1q(GateKind::RZ, slots[1])) * u;
        u = on_bit1(gate_1q(GateKind::RZ, slots[1])) * u;
        return u;
    }
    for (int m = 0; m < spec.inner_layers; ++m) {
        const std::size_t s = static_cast<std::size_t>(5 * m);
        u = on_bit0(gate_1q(GateKind::RY, slots[s + 0])) * u;
        u = on_bit1(gate_1q(GateKind::RY, slots[s + 1])) * u;
        u = on_bit0(gate_1q(GateKind::RZ, slots[s + 2])) * u;
        u = on_bit1(gate_1q(GateKind::RZ, slots[s + 3])) * u;
        u = crx(slots[s + 4]) * u;
    }
    return u;
}

double spectral_norm(const Mat &m) {
    return Eigen::JacobiSVD<Mat>(m).singularValues()(0);
}

Mat swap_gate() {
    Mat s = Mat::Zero(4, 4);
    s(0, 0) = 1;
    s(1, 2) = 1;
    s(2, 1) = 1;
    s(3, 3) = 1;
    return s;
}

// Embed the two-qubit block into 3 qubits with bit 0 of the block on qubit
// `lower` and bit 1 on qubit `higher`.
Mat embed_pair(const Mat &u, int lower, int higher) {
    Mat m = Mat::Zero(8, 8);
    const int spectator = 3 - lower - higher; // qubits are {0,1,2}
    for (int r = 0; r < 8; ++r) {
        const int r0 = (r >> lower) & 1;
        const int r1 = (r >> higher) & 1;
        const int rs = (r >> spectator) & 1;
        for (int c = 0; c < 8; ++c) {
            const int c0 = (c >> lower) & 1;
            const int c1 = (c >> higher) & 1;
            const int cs = (c >> spectator) & 1;
            if (rs == cs) {
                m(r, c) = u((r1 << 1) | r0, (c1 << 1) | c0);
            }
        }
    }
    return m;
}

// Overlapping-pair commutator: two copies of the block sharing one vertex,
// in every role arrangement the shared vertex can take.
double overlap_commutator_norm(const Mat &u) {
    const std::pair<std::pair<int, int>, std::pair<int, int>> arrangements[] = {
        {{0, 1}, {0, 2}}, // shared vertex lower in both
        {{0, 2}, {1, 2}}, // shared vertex higher in both
        {{0, 1}, {1, 2}}, // shared vertex higher in one, lower in the other
    };
    double worst = 0.0;
    for (const auto &[pa, pb] : arrangements) {
        const Mat a = embed_pair(u, pa.first, pa.second);
        const Mat b = embed_pair(u, pb.first, pb.second);
        worst = std::max(worst, spectral_norm(a * b - b * a));
    }
    return worst;
}

double identity_distance(const Mat &u) {
    const Cplx trace = u.trace();
    const Cplx phase = std::abs(trace) < 1e-12 ? Cplx{1, 0} : trace / std::abs(trace);
    return spectral_norm(u - phase * Mat::Identity(u.rows(), u.cols()));
}

} // namespace

std::array<std::complex<double>, 16> pair_block_matrix(const AnsatzSpec &spec,
                                                       std::span<const double> slots) {
    if (static_cast<int>(slots.size()) != edge_param_count(spec)) {
        throw std::invalid_argument("pair_block_matrix: slot count mismatch");
    }
    const Mat u = pair_block_unitary(spec, slots);
    std::array<std::complex<double>, 16> flat;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            flat[static_cast<std::size_t>(r * 4 + c)] = u(r, c);
        }
    }
    return flat;
}

SymmetryReport gate_symmetry_metrics(const AnsatzSpec &spec, const ParameterSet &params) {
    validate_spec(spec);
    if (static_cast<int>(params.values.size()) != param_count(spec)) {
        throw std::invalid_argument("gate_symmetry_metrics: parameter length mismatch");
    }
    const Mat swap = swap_gate();
    const int edge_len = edge_param_count(spec);
    const int per_layer = 3 + 2 * edge_len;
    const int base = spec.include_initial_state ? 3 : 0;

    SymmetryReport report;
    for (int layer = 0; layer < spec.layers; ++layer) {
        for (const bool anti : {false, true}) {
            const int offset = base + layer * per_layer + 3 + (anti ? edge_len : 0);
            const std::span<const double> slots{params.values.data() + offset,
                                                static_cast<std::size_t>(edge_len)};
            const Mat u = pair_block_unitary(spec, slots);
            SymmetryLayerRow row;
            row.layer = layer + 1;
            row.anti_edge = anti;
            row.swap_asymmetry = spectral_norm(u - swap * u * swap);
            row.commutator_norm = overlap_commutator_norm(u);
            row.identity_distance = identity_distance(u);
            report.rows.push_back(row);
        }
    }
    return report;
}

} // namespace qgnn
