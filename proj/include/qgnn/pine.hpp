#pragma once

#include "qgnn/graph.hpp"
#include "qgnn/training.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qgnn {

enum class HeuristicKind { Uniform, Degree, QuantumMarginal };

std::string heuristic_name(HeuristicKind kind);

// Source of the per-step node distribution. QuantumMarginal runs the
// checkpoint's ansatz on the current subgraph and reads normalised one-qubit
// marginals; the tied parameter layout makes the checkpoint size-agnostic.
struct NodeHeuristic {
    HeuristicKind kind = HeuristicKind::Uniform;
    std::optional<Checkpoint> checkpoint; // QuantumMarginal only

    static NodeHeuristic uniform() { return {HeuristicKind::Uniform, std::nullopt}; }
    static NodeHeuristic degree() { return {HeuristicKind::Degree, std::nullopt}; }
    static NodeHeuristic quantum(Checkpoint checkpoint) {
        return {HeuristicKind::QuantumMarginal, std::move(checkpoint)};
    }
};

/// Distribution over g's vertices: non-negative, sums to 1. Degree smooths by
/// 1e-9 so edgeless graphs stay valid; quantum marginals that vanish fall
/// back to uniform.
std::vector<double> node_distribution(const NodeHeuristic &heuristic, const Graph &g);

struct PineStep {
    int subgraph_size = 0;
    int chosen_vertex = 0; // original vertex id
    std::vector<double> distribution;
};

struct PineTrace {
    std::vector<PineStep> steps;
    Bitstring clique = 0; // always a clique of the input graph
};

/// One recursion: sample a vertex, restrict to its neighbourhood, repeat
/// until the subgraph is empty. Sampling uses a cumulative-sum draw from the
/// seeded generator, so traces replay exactly.
PineTrace pine_run(const Graph &g, const NodeHeuristic &heuristic, std::uint64_t seed);

/// Exact probability that the recursion emits a maximum clique, by weighted
/// depth-first enumeration of the recursion tree (memoised on the clique
/// built so far). n <= 16.
double pine_success_prob(const Graph &g, const NodeHeuristic &heuristic);

} // namespace qgnn
