#pragma once

#include "qgnn/model.hpp"
#include "qgnn/training.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace qgnn {

/// Exhaustive permutations for n <= 5 (at most 120), a seeded sample of 50
/// otherwise.
std::vector<Permutation> audit_permutations(int n, std::uint64_t seed);

/// Max amplitude deviation between the ansatz on the relabelled graph and the
/// relabelled amplitudes of the ansatz on the original.
double check_equivariance(const AnsatzSpec &spec, const Graph &g, const ParameterSet &params,
                          const Permutation &sigma);

/// Relabelled copy of an entry: graph and target bitstrings move together.
DatasetEntry permute_entry(const DatasetEntry &entry, const Permutation &sigma);

/// Max |loss(sigma.G) - loss(G)| over the given permutations.
double check_loss_invariance(const ModelConfig &config, const DatasetEntry &entry,
                             std::span<const double> theta,
                             std::span<const Permutation> sigmas);

struct AccuracyDropRow {
    std::size_t entry_index = 0;
    int n = 0;
    double original_argmax = 0.0;
    double permuted_argmax_mean = 0.0;
    double original_dist = 0.0;
    double permuted_dist_mean = 0.0;
};

/// Accuracy on each entry vs the mean over randomly relabelled copies.
std::vector<AccuracyDropRow> permuted_accuracy_drop(const Checkpoint &checkpoint,
                                                    std::span<const DatasetEntry> entries,
                                                    int permutations_per_entry,
                                                    std::uint64_t seed);

struct SymmetryLayerRow {
    int layer = 0;
    bool anti_edge = false;
    // operator-norm distance between the edge unitary and its qubit-swapped
    // conjugate
    double swap_asymmetry = 0.0;
    // max commutator norm over the shared-vertex arrangements of two copies
    double commutator_norm = 0.0;
    // distance to the identity after global-phase alignment
    double identity_distance = 0.0;
};

struct SymmetryReport {
    std::vector<SymmetryLayerRow> rows;
    double loss_invariance_delta = 0.0; // filled by the audit driver
};

/// Per-layer edge and anti-edge gate metrics on explicit small matrices.
SymmetryReport gate_symmetry_metrics(const AnsatzSpec &spec, const ParameterSet &params);

/// The 4x4 unitary of one (anti-)edge block, row-major, in the basis where
/// bit 0 is the lower vertex of the pair (the CRX target) and bit 1 the
/// higher (the control). `slots` is the block's parameter vector: 2 values
/// for Rook, 5M for MilleFeuille.
std::array<std::complex<double>, 16> pair_block_matrix(const AnsatzSpec &spec,
                                                       std::span<const double> slots);

} // namespace qgnn
