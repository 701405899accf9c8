#pragma once

#include "qgnn/graph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qgnn {

struct DatasetEntry {
    Graph graph;
    int omega = 0;
    std::vector<Bitstring> target_bitstrings; // all maximum cliques, sorted
    double edge_probability = -1.0;           // -1 for exhaustively enumerated cells
    std::uint64_t source_seed = 0;
};

// One generation cell: either every isomorphism class of size n (exhaustive,
// n <= 6), or `count` pairwise non-isomorphic Erdos-Renyi draws at edge
// probability p.
struct GenCell {
    int n = 0;
    bool exhaustive = false;
    double p = -1.0;
    int count = 0;

    bool operator==(const GenCell &) const = default;
};

struct DatasetManifest {
    std::uint64_t seed = 0;
    std::vector<GenCell> cells;
    std::vector<DatasetEntry> entries;
};

/// G(n, p): each of the n(n-1)/2 pairs included independently with
/// probability p. Deterministic per seed.
Graph sample_er(int n, double p, std::uint64_t seed);

/// Structure hash from iterated colour refinement on ordered vertex pairs
/// (level-2 Weisfeiler-Leman). Equal for isomorphic graphs.
std::uint64_t wl2_signature(const Graph &g);

/// Exact isomorphism via backtracking with degree pruning.
bool isomorphic(const Graph &a, const Graph &b);

/// One representative per equivalence class, first-seen order. Classes are
/// WL-2 buckets confirmed by the exact test, so hash collisions cannot merge
/// distinct classes.
std::vector<Graph> dedup_wl2(const std::vector<Graph> &graphs);

/// Every isomorphism class on n vertices (n <= 6), by enumerating all
/// labelled graphs in edge-mask order and deduplicating.
std::vector<Graph> enumerate_isomorphism_classes(int n);

DatasetManifest build_dataset(const std::vector<GenCell> &cells, std::uint64_t seed);

void save_manifest(const DatasetManifest &manifest, const std::string &path);
DatasetManifest load_manifest(const std::string &path);

std::string cell_to_string(const GenCell &cell);

} // namespace qgnn
