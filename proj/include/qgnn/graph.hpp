#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qgnn {

// Vertex subsets are encoded as bitmasks: bit v (least significant bit is
// vertex 0) marks membership of vertex v. This convention is fixed repo-wide;
// the string form is most-significant-vertex first, so vertex 0 is the
// rightmost character.
using Bitstring = std::uint64_t;

using Edge = std::pair<int, int>; // normalised u < v

/// Simple undirected graph on n >= 1 vertices, immutable after construction.
class Graph {
  public:
    Graph(int n, std::vector<Edge> edges);

    static Graph empty(int n) { return Graph(n, {}); }
    static Graph complete(int n);
    static Graph path(int n);

    int n() const { return n_; }
    const std::vector<Edge> &edges() const { return edges_; } // sorted
    std::uint64_t adjacency(int v) const { return adj_[static_cast<std::size_t>(v)]; }
    bool has_edge(int u, int v) const;
    int degree(int v) const;

    // Edge set packed into a bitmask over pairs (u,v), u<v, in lexicographic
    // order. Usable as an exact identity for n <= 11.
    std::uint64_t edge_mask() const;
    static Graph from_edge_mask(int n, std::uint64_t mask);

    bool operator==(const Graph &other) const {
        return n_ == other.n_ && edges_ == other.edges_;
    }

  private:
    int n_;
    std::vector<Edge> edges_;
    std::vector<std::uint64_t> adj_;
};

/// Bijection on {0..n-1}.
class Permutation {
  public:
    explicit Permutation(std::vector<int> images);

    static Permutation identity(int n);

    int size() const { return static_cast<int>(images_.size()); }
    int operator()(int v) const { return images_[static_cast<std::size_t>(v)]; }
    const std::vector<int> &images() const { return images_; }
    Permutation inverse() const;
    bool is_identity() const;

  private:
    std::vector<int> images_;
};

struct CliqueLabel {
    int omega = 0;
    std::vector<Bitstring> max_cliques; // sorted ascending, all maximum cliques
};

/// Pairs (u,v), u<v, absent from g. Disjoint from g.edges(); union is complete.
std::vector<Edge> complement_edges(const Graph &g);

/// Relabel vertices: edge (u,v) maps to (s(u), s(v)).
Graph permute(const Graph &g, const Permutation &s);

/// Map a vertex subset through a permutation: bit v moves to bit s(v).
Bitstring permute_bits(Bitstring b, const Permutation &s);

/// True iff the selected vertices are pairwise adjacent. Empty set and
/// singletons count as cliques.
bool is_clique(const Graph &g, Bitstring b);

/// Clique number plus the full set of maximum cliques, via Bron-Kerbosch with
/// pivoting. Exact; n <= 24 enforced as the oracle budget.
CliqueLabel max_clique_label(const Graph &g);

/// All n! permutations in lexicographic order. Guarded to n <= 10.
std::vector<Permutation> all_permutations(int n);

Permutation random_permutation(int n, class Rng &rng);

std::string bitstring_to_string(Bitstring b, int n);
Bitstring bitstring_from_string(const std::string &s);

} // namespace qgnn
