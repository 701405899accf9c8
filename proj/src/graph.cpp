#include "qgnn/graph.hpp"

#include "qgnn/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace qgnn {

Graph::Graph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n < 1 || n > 63) {
        throw std::invalid_argument(fmt::format("graph size {} outside [1, 63]", n));
    }
    for (auto &[u, v] : edges_) {
        if (u > v) {
            std::swap(u, v);
        }
        if (u == v) {
            throw std::invalid_argument(fmt::format("self-loop at vertex {}", u));
        }
        if (u < 0 || v >= n) {
            throw std::invalid_argument(
                fmt::format("edge ({},{}) out of range for n={}", u, v, n));
        }
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
        throw std::invalid_argument("duplicate edge");
    }
    adj_.assign(static_cast<std::size_t>(n), 0);
    for (const auto &[u, v] : edges_) {
        adj_[static_cast<std::size_t>(u)] |= std::uint64_t{1} << v;
        adj_[static_cast<std::size_t>(v)] |= std::uint64_t{1} << u;
    }
}

Graph Graph::complete(int n) {
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            edges.emplace_back(u, v);
        }
    }
    return Graph(n, std::move(edges));
}

Graph Graph::path(int n) {
    std::vector<Edge> edges;
    for (int v = 0; v + 1 < n; ++v) {
        edges.emplace_back(v, v + 1);
    }
    return Graph(n, std::move(edges));
}

bool Graph::has_edge(int u, int v) const {
    if (u < 0 || v < 0 || u >= n_ || v >= n_ || u == v) {
        return false;
    }
    return (adj_[static_cast<std::size_t>(u)] >> v) & 1;
}

int Graph::degree(int v) const {
    return std::popcount(adj_[static_cast<std::size_t>(v)]);
}

std::uint64_t Graph::edge_mask() const {
    if (n_ > 11) {
        throw std::invalid_argument("edge_mask needs n <= 11");
    }
    std::uint64_t mask = 0;
    int k = 0;
    for (int u = 0; u < n_; ++u) {
        for (int v = u + 1; v < n_; ++v, ++k) {
            if (has_edge(u, v)) {
                mask |= std::uint64_t{1} << k;
            }
        }
    }
    return mask;
}

Graph Graph::from_edge_mask(int n, std::uint64_t mask) {
    std::vector<Edge> edges;
    int k = 0;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v, ++k) {
            if ((mask >> k) & 1) {
                edges.emplace_back(u, v);
            }
        }
    }
    return Graph(n, std::move(edges));
}

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
    std::vector<int> sorted = images_;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] != static_cast<int>(i)) {
            throw std::invalid_argument("permutation images are not a bijection on 0..n-1");
        }
    }
}

Permutation Permutation::identity(int n) {
    std::vector<int> images(static_cast<std::size_t>(n));
    std::iota(images.begin(), images.end(), 0);
    return Permutation(std::move(images));
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(images_.size());
    for (std::size_t v = 0; v < images_.size(); ++v) {
        inv[static_cast<std::size_t>(images_[v])] = static_cast<int>(v);
    }
    return Permutation(std::move(inv));
}

bool Permutation::is_identity() const {
    for (std::size_t v = 0; v < images_.size(); ++v) {
        if (images_[v] != static_cast<int>(v)) {
            return false;
        }
    }
    return true;
}

std::vector<Edge> complement_edges(const Graph &g) {
    std::vector<Edge> result;
    for (int u = 0; u < g.n(); ++u) {
        for (int v = u + 1; v < g.n(); ++v) {
            if (!g.has_edge(u, v)) {
                result.emplace_back(u, v);
            }
        }
    }
    return result;
}

Graph permute(const Graph &g, const Permutation &s) {
    if (s.size() != g.n()) {
        throw std::invalid_argument(
            fmt::format("permutation length {} != graph size {}", s.size(), g.n()));
    }
    std::vector<Edge> edges;
    edges.reserve(g.edges().size());
    for (const auto &[u, v] : g.edges()) {
        edges.emplace_back(s(u), s(v));
    }
    return Graph(g.n(), std::move(edges));
}

Bitstring permute_bits(Bitstring b, const Permutation &s) {
    Bitstring out = 0;
    for (int v = 0; v < s.size(); ++v) {
        if ((b >> v) & 1) {
            out |= Bitstring{1} << s(v);
        }
    }
    return out;
}

bool is_clique(const Graph &g, Bitstring b) {
    std::uint64_t remaining = b;
    while (remaining != 0) {
        const int v = std::countr_zero(remaining);
        remaining &= remaining - 1;
        // every later member must be adjacent to v
        if ((remaining & ~g.adjacency(v)) != 0) {
            return false;
        }
    }
    return true;
}

namespace {

void bron_kerbosch(const Graph &g, std::uint64_t r, std::uint64_t p, std::uint64_t x,
                   CliqueLabel &label) {
    if (p == 0 && x == 0) {
        const int size = std::popcount(r);
        if (size > label.omega) {
            label.omega = size;
            label.max_cliques.clear();
        }
        if (size == label.omega) {
            label.max_cliques.push_back(r);
        }
        return;
    }
    // pivot maximising |P & N(u)| prunes the branch set
    int pivot = -1;
    int best = -1;
    std::uint64_t candidates = p | x;
    while (candidates != 0) {
        const int u = std::countr_zero(candidates);
        candidates &= candidates - 1;
        const int covered = std::popcount(p & g.adjacency(u));
        if (covered > best) {
            best = covered;
            pivot = u;
        }
    }
    std::uint64_t branch = p & ~g.adjacency(pivot);
    while (branch != 0) {
        const int v = std::countr_zero(branch);
        branch &= branch - 1;
        const std::uint64_t bit = std::uint64_t{1} << v;
        bron_kerbosch(g, r | bit, p & g.adjacency(v), x & g.adjacency(v), label);
        p &= ~bit;
        x |= bit;
    }
}

} // namespace

CliqueLabel max_clique_label(const Graph &g) {
    if (g.n() > 24) {
        throw std::invalid_argument(
            fmt::format("max_clique_label: n={} exceeds the exact-oracle budget of 24", g.n()));
    }
    CliqueLabel label;
    const std::uint64_t all = (std::uint64_t{1} << g.n()) - 1;
    bron_kerbosch(g, 0, all, 0, label);
    std::sort(label.max_cliques.begin(), label.max_cliques.end());
    return label;
}

std::vector<Permutation> all_permutations(int n) {
    if (n < 1 || n > 10) {
        throw std::invalid_argument("all_permutations needs 1 <= n <= 10");
    }
    std::vector<int> images(static_cast<std::size_t>(n));
    std::iota(images.begin(), images.end(), 0);
    std::vector<Permutation> result;
    do {
        result.emplace_back(images);
    } while (std::next_permutation(images.begin(), images.end()));
    return result;
}

Permutation random_permutation(int n, Rng &rng) {
    std::vector<int> images(static_cast<std::size_t>(n));
    std::iota(images.begin(), images.end(), 0);
    rng.shuffle(images);
    return Permutation(std::move(images));
}

std::string bitstring_to_string(Bitstring b, int n) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int v = 0; v < n; ++v) {
        if ((b >> v) & 1) {
            s[static_cast<std::size_t>(n - 1 - v)] = '1';
        }
    }
    return s;
}

Bitstring bitstring_from_string(const std::string &s) {
    Bitstring b = 0;
    const int n = static_cast<int>(s.size());
    for (int v = 0; v < n; ++v) {
        const char c = s[static_cast<std::size_t>(n - 1 - v)];
        if (c == '1') {
            b |= Bitstring{1} << v;
        } else if (c != '0') {
            throw std::invalid_argument(fmt::format("bad bitstring character '{}'", c));
        }
    }
    return b;
}

} // namespace qgnn
