#include "qgnn/pine.hpp"

#include "qgnn/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_map>

namespace qgnn {

std::string heuristic_name(HeuristicKind kind) {
    switch (kind) {
    case HeuristicKind::Uniform: return "uniform";
    case HeuristicKind::Degree: return "degree";
    case HeuristicKind::QuantumMarginal: return "quantum";
    }
    return {};
}

namespace {

// Induced subgraph on the masked vertices, re-indexed densely (sorted
// original order) so circuit widths track the live problem size.
struct SubView {
    Graph graph;
    std::vector<int> original; // dense index -> original vertex id
};

SubView induced_subgraph(const Graph &g, std::uint64_t mask) {
    std::vector<int> original;
    for (int v = 0; v < g.n(); ++v) {
        if ((mask >> v) & 1) {
            original.push_back(v);
        }
    }
    std::vector<Edge> edges;
    for (std::size_t a = 0; a < original.size(); ++a) {
        for (std::size_t b = a + 1; b < original.size(); ++b) {
            if (g.has_edge(original[a], original[b])) {
                edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
            }
        }
    }
    return {Graph(static_cast<int>(original.size()), std::move(edges)), std::move(original)};
}

} // namespace

std::vector<double> node_distribution(const NodeHeuristic &heuristic, const Graph &g) {
    const int n = g.n();
    std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
    switch (heuristic.kind) {
    case HeuristicKind::Uniform: {
        const double u = 1.0 / static_cast<double>(n);
        std::fill(dist.begin(), dist.end(), u);
        break;
    }
    case HeuristicKind::Degree: {
        constexpr double smoothing = 1e-9;
        double total = 0.0;
        for (int v = 0; v < n; ++v) {
            dist[static_cast<std::size_t>(v)] = static_cast<double>(g.degree(v)) + smoothing;
            total += dist[static_cast<std::size_t>(v)];
        }
        for (double &d : dist) {
            d /= total;
        }
        break;
    }
    case HeuristicKind::QuantumMarginal: {
        if (!heuristic.checkpoint.has_value()) {
            throw std::invalid_argument("quantum heuristic needs a checkpoint");
        }
        const Checkpoint &ckpt = *heuristic.checkpoint;
        const StateVector state =
            apply_ansatz(ckpt.model.ansatz, g, ParameterSet{ckpt.theta});
        double total = 0.0;
        for (int v = 0; v < n; ++v) {
            dist[static_cast<std::size_t>(v)] = marginal_one(state, v);
            total += dist[static_cast<std::size_t>(v)];
        }
        if (total < 1e-12) { // vanishing marginals carry no signal
            const double u = 1.0 / static_cast<double>(n);
            std::fill(dist.begin(), dist.end(), u);
        } else {
            for (double &d : dist) {
                d /= total;
            }
        }
        break;
    }
    }
    return dist;
}

PineTrace pine_run(const Graph &g, const NodeHeuristic &heuristic, std::uint64_t seed) {
    Rng rng(seed);
    PineTrace trace;
    std::uint64_t current = (std::uint64_t{1} << g.n()) - 1;
    while (current != 0) {
        const SubView sub = induced_subgraph(g, current);
        std::vector<double> dist = node_distribution(heuristic, sub.graph);

        const double draw = rng.uniform_double();
        double cumulative = 0.0;
        std::size_t pick = dist.size() - 1; // guard against rounding shortfall
        for (std::size_t i = 0; i < dist.size(); ++i) {
            cumulative += dist[i];
            if (draw < cumulative) {
                pick = i;
                break;
            }
        }
        const int chosen = sub.original[pick];
        trace.steps.push_back({sub.graph.n(), chosen, std::move(dist)});
        trace.clique |= std::uint64_t{1} << chosen;
        current &= g.adjacency(chosen);
    }
    return trace;
}

double pine_success_prob(const Graph &g, const NodeHeuristic &heuristic) {
    if (g.n() > 16) {
        throw std::invalid_argument(
            fmt::format("pine_success_prob: n={} exceeds the exact budget of 16", g.n()));
    }
    const CliqueLabel label = max_clique_label(g);

    // The subgraph reached after building clique C is determined by C alone
    // (the common neighbourhood), so success probabilities memoise on C.
    std::unordered_map<std::uint64_t, double> memo;

    auto recurse = [&](auto &&self, std::uint64_t clique, std::uint64_t current) -> double {
        if (current == 0) {
            return std::binary_search(label.max_cliques.begin(), label.max_cliques.end(), clique)
                       ? 1.0
                       : 0.0;
        }
        if (const auto it = memo.find(clique); it != memo.end()) {
            return it->second;
        }
        const SubView sub = induced_subgraph(g, current);
        const std::vector<double> dist = node_distribution(heuristic, sub.graph);
        double total = 0.0;
        for (std::size_t i = 0; i < dist.size(); ++i) {
            if (dist[i] == 0.0) {
                continue;
            }
            const int v = sub.original[i];
            total += dist[i] *
                     self(self, clique | (std::uint64_t{1} << v), current & g.adjacency(v));
        }
        memo.emplace(clique, total);
        return total;
    };
    return recurse(recurse, 0, (std::uint64_t{1} << g.n()) - 1);
}

} // namespace qgnn
