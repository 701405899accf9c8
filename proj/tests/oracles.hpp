#pragma once

// Independent reference implementations used only by tests. Everything here
// deliberately avoids the production code paths it checks: cliques by subset
// scan instead of branch-and-bound, isomorphism classes by permutation scan
// instead of WL-2 refinement, product states by explicit Kronecker algebra,
// gradients by central finite differences.

#include "qgnn/graph.hpp"
#include "qgnn/model.hpp"
#include "qgnn/pine.hpp"
#include "qgnn/rng.hpp"

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <vector>

namespace qgnn::oracles {

inline CliqueLabel brute_force_clique_label(const Graph &g) {
    std::vector<std::vector<bool>> adj(static_cast<std::size_t>(g.n()),
                                       std::vector<bool>(static_cast<std::size_t>(g.n()), false));
    for (const auto &[u, v] : g.edges()) {
        adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = true;
        adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = true;
    }
    CliqueLabel label;
    label.omega = 0;
    for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << g.n()); ++subset) {
        bool clique = true;
        for (int u = 0; clique && u < g.n(); ++u) {
            if (!((subset >> u) & 1)) {
                continue;
            }
            for (int v = u + 1; v < g.n(); ++v) {
                if (((subset >> v) & 1) && !adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]) {
                    clique = false;
                    break;
                }
            }
        }
        if (!clique) {
            continue;
        }
        const int size = std::popcount(subset);
        if (size > label.omega) {
            label.omega = size;
            label.max_cliques.clear();
        }
        if (size == label.omega) {
            label.max_cliques.push_back(subset);
        }
    }
    std::sort(label.max_cliques.begin(), label.max_cliques.end());
    return label;
}

/// Canonical form as the minimum edge mask over all vertex relabellings.
inline std::uint64_t canonical_edge_mask(const Graph &g) {
    std::uint64_t best = ~std::uint64_t{0};
    for (const Permutation &sigma : all_permutations(g.n())) {
        best = std::min(best, permute(g, sigma).edge_mask());
    }
    return best;
}

inline std::size_t count_iso_classes_brute_force(const std::vector<Graph> &graphs) {
    std::vector<std::uint64_t> forms;
    for (const Graph &g : graphs) {
        forms.push_back(canonical_edge_mask(g));
    }
    std::sort(forms.begin(), forms.end());
    forms.erase(std::unique(forms.begin(), forms.end()), forms.end());
    return forms.size();
}

/// |psi> = RX(a2) RZ(a1) RX(a0) |0> by explicit 2x2 matrix algebra.
inline std::vector<std::complex<double>> single_qubit_state(const std::array<double, 3> &euler) {
    using C = std::complex<double>;
    auto rx = [](double t) {
        return std::array<C, 4>{C{std::cos(t / 2), 0}, C{0, -std::sin(t / 2)},
                                C{0, -std::sin(t / 2)}, C{std::cos(t / 2), 0}};
    };
    auto rz = [](double t) {
        return std::array<C, 4>{std::exp(C{0, -t / 2}), C{0, 0}, C{0, 0}, std::exp(C{0, t / 2})};
    };
    auto mul = [](const std::array<C, 4> &m, const std::array<C, 2> &v) {
        return std::array<C, 2>{m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
    };
    std::array<C, 2> state{C{1, 0}, C{0, 0}};
    state = mul(rx(euler[0]), state);
    state = mul(rz(euler[1]), state);
    state = mul(rx(euler[2]), state);
    return {state[0], state[1]};
}

/// n-fold Kronecker power with qubit 0 as the least significant bit.
inline std::vector<std::complex<double>> kron_power(const std::vector<std::complex<double>> &one,
                                                    int n) {
    std::vector<std::complex<double>> state{1.0};
    for (int q = 0; q < n; ++q) {
        std::vector<std::complex<double>> next(state.size() * 2);
        for (std::size_t high = 0; high < 2; ++high) {
            for (std::size_t rest = 0; rest < state.size(); ++rest) {
                next[(high << q) | rest] = one[high] * state[rest];
            }
        }
        state.swap(next);
    }
    return state;
}

/// Central finite differences of the entry loss.
inline std::vector<double> fd_gradient(const ModelConfig &config, const DatasetEntry &entry,
                                       std::vector<double> theta, double h = 1e-5) {
    std::vector<double> grad(theta.size(), 0.0);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double saved = theta[i];
        theta[i] = saved + h;
        const double up = entry_loss(config, entry, theta).scalar;
        theta[i] = saved - h;
        const double down = entry_loss(config, entry, theta).scalar;
        theta[i] = saved;
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

struct MonteCarloEstimate {
    double rate = 0.0;
    double sigma = 0.0;
};

inline MonteCarloEstimate monte_carlo_pine(const Graph &g, const NodeHeuristic &heuristic,
                                           int runs, std::uint64_t seed) {
    const CliqueLabel label = max_clique_label(g);
    int successes = 0;
    for (int i = 0; i < runs; ++i) {
        const PineTrace trace = pine_run(g, heuristic, mix_seed(seed, static_cast<std::uint64_t>(i)));
        if (std::binary_search(label.max_cliques.begin(), label.max_cliques.end(), trace.clique)) {
            ++successes;
        }
    }
    MonteCarloEstimate estimate;
    estimate.rate = static_cast<double>(successes) / runs;
    estimate.sigma = std::sqrt(estimate.rate * (1.0 - estimate.rate) / runs);
    return estimate;
}

inline DatasetEntry make_entry(Graph g, double p = -1.0, std::uint64_t seed = 0) {
    CliqueLabel label = max_clique_label(g);
    return DatasetEntry{std::move(g), label.omega, std::move(label.max_cliques), p, seed};
}

} // namespace qgnn::oracles
