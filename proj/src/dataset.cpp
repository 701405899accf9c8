#include "qgnn/dataset.hpp"

#include "qgnn/rng.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

using nlohmann::json;

namespace qgnn {

Graph sample_er(int n, double p, std::uint64_t seed) {
    if (n < 1) {
        throw std::invalid_argument("sample_er needs n >= 1");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(fmt::format("edge probability {} outside [0, 1]", p));
    }
    Rng rng(seed);
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            if (rng.uniform_double() < p) {
                edges.emplace_back(u, v);
            }
        }
    }
    return Graph(n, std::move(edges));
}

namespace {

std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return mix_seed(a ^ 0x6a09e667f3bcc909ULL, b);
}

std::uint64_t hash_sequence(std::uint64_t seed, const std::vector<std::uint64_t> &values) {
    std::uint64_t h = seed;
    for (const std::uint64_t v : values) {
        h = mix64(h, v);
    }
    return h;
}

} // namespace

std::uint64_t wl2_signature(const Graph &g) {
    const int n = g.n();
    const std::size_t pairs = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    std::vector<std::uint64_t> colour(pairs);
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            std::uint64_t init = 2;
            if (u == v) {
                init = 0;
            } else if (g.has_edge(u, v)) {
                init = 1;
            }
            colour[static_cast<std::size_t>(u * n + v)] = mix64(0x5851f42d4c957f2dULL, init);
        }
    }

    auto distinct = [&]() {
        std::vector<std::uint64_t> sorted = colour;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        return sorted.size();
    };

    std::size_t classes = distinct();
    std::vector<std::uint64_t> next(pairs);
    std::vector<std::uint64_t> neigh(static_cast<std::size_t>(n));
    for (int round = 0; round < n * n + 1; ++round) {
        for (int u = 0; u < n; ++u) {
            for (int v = 0; v < n; ++v) {
                for (int w = 0; w < n; ++w) {
                    neigh[static_cast<std::size_t>(w)] =
                        mix64(colour[static_cast<std::size_t>(u * n + w)],
                              colour[static_cast<std::size_t>(w * n + v)]);
                }
                std::sort(neigh.begin(), neigh.end());
                next[static_cast<std::size_t>(u * n + v)] =
                    hash_sequence(colour[static_cast<std::size_t>(u * n + v)], neigh);
            }
        }
        colour.swap(next);
        const std::size_t refined = distinct();
        if (refined == classes) {
            break; // partition stable
        }
        classes = refined;
    }

    std::vector<std::uint64_t> sorted = colour;
    std::sort(sorted.begin(), sorted.end());
    return hash_sequence(0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(n), sorted);
}

namespace {

bool extend_mapping(const Graph &a, const Graph &b, const std::vector<int> &order,
                    std::vector<int> &mapping, std::uint64_t used, std::size_t depth) {
    if (depth == order.size()) {
        return true;
    }
    const int u = order[depth];
    for (int cand = 0; cand < b.n(); ++cand) {
        if ((used >> cand) & 1) {
            continue;
        }
        if (a.degree(u) != b.degree(cand)) {
            continue;
        }
        bool consistent = true;
        for (std::size_t i = 0; i < depth; ++i) {
            const int prev = order[i];
            if (a.has_edge(u, prev) != b.has_edge(cand, mapping[static_cast<std::size_t>(prev)])) {
                consistent = false;
                break;
            }
        }
        if (!consistent) {
            continue;
        }
        mapping[static_cast<std::size_t>(u)] = cand;
        if (extend_mapping(a, b, order, mapping, used | (std::uint64_t{1} << cand), depth + 1)) {
            return true;
        }
    }
    return false;
}

} // namespace

bool isomorphic(const Graph &a, const Graph &b) {
    if (a.n() != b.n() || a.edges().size() != b.edges().size()) {
        return false;
    }
    std::vector<int> da, db;
    for (int v = 0; v < a.n(); ++v) {
        da.push_back(a.degree(v));
        db.push_back(b.degree(v));
    }
    std::sort(da.begin(), da.end());
    std::sort(db.begin(), db.end());
    if (da != db) {
        return false;
    }
    // map high-degree vertices first; their candidate sets are smallest
    std::vector<int> order;
    for (int v = 0; v < a.n(); ++v) {
        order.push_back(v);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return a.degree(x) > a.degree(y); });
    std::vector<int> mapping(static_cast<std::size_t>(a.n()), -1);
    return extend_mapping(a, b, order, mapping, 0, 0);
}

std::vector<Graph> dedup_wl2(const std::vector<Graph> &graphs) {
    std::vector<Graph> kept;
    std::map<std::uint64_t, std::vector<std::size_t>> buckets;
    for (const Graph &g : graphs) {
        if (g.n() != graphs.front().n()) {
            throw std::invalid_argument("dedup_wl2: mixed graph sizes");
        }
        const std::uint64_t sig = wl2_signature(g);
        auto &bucket = buckets[sig];
        bool duplicate = false;
        for (const std::size_t idx : bucket) {
            if (isomorphic(g, kept[idx])) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) {
            bucket.push_back(kept.size());
            kept.push_back(g);
        }
    }
    return kept;
}

std::vector<Graph> enumerate_isomorphism_classes(int n) {
    if (n < 1 || n > 6) {
        throw std::invalid_argument(
            fmt::format("exhaustive enumeration supports n <= 6 (requested {})", n));
    }
    const int pairs = n * (n - 1) / 2;
    std::vector<Graph> kept;
    std::map<std::uint64_t, std::vector<std::size_t>> buckets;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs); ++mask) {
        Graph g = Graph::from_edge_mask(n, mask);
        const std::uint64_t sig = wl2_signature(g);
        auto &bucket = buckets[sig];
        bool duplicate = false;
        for (const std::size_t idx : bucket) {
            if (isomorphic(g, kept[idx])) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) {
            bucket.push_back(kept.size());
            kept.push_back(std::move(g));
        }
    }
    return kept;
}

std::string cell_to_string(const GenCell &cell) {
    if (cell.exhaustive) {
        return fmt::format("n={} all", cell.n);
    }
    return fmt::format("n={} p={} count={}", cell.n, cell.p, cell.count);
}

namespace {

DatasetEntry label_entry(Graph g, double p, std::uint64_t seed) {
    CliqueLabel label = max_clique_label(g);
    DatasetEntry entry{std::move(g), label.omega, std::move(label.max_cliques), p, seed};
    return entry;
}

void generate_cell(const GenCell &cell, std::size_t cell_index, std::uint64_t seed,
                   std::vector<DatasetEntry> &out) {
    if (cell.exhaustive) {
        for (Graph &g : enumerate_isomorphism_classes(cell.n)) {
            out.push_back(label_entry(std::move(g), -1.0, 0));
        }
        return;
    }
    if (cell.count < 1) {
        throw std::invalid_argument(fmt::format("cell {}: count must be >= 1", cell_to_string(cell)));
    }
    if (!(cell.p >= 0.0 && cell.p <= 1.0)) {
        throw std::invalid_argument(
            fmt::format("cell {}: edge probability outside [0, 1]", cell_to_string(cell)));
    }
    // For small n the class count is known exactly; elsewhere a stall cap
    // catches requests that outrun the distinct classes reachable at this p.
    if (cell.n <= 6) {
        std::size_t available = enumerate_isomorphism_classes(cell.n).size();
        if (cell.p == 0.0 || cell.p == 1.0) {
            available = 1;
        }
        if (static_cast<std::size_t>(cell.count) > available) {
            throw std::invalid_argument(
                fmt::format("cell {}: requested {} graphs but only {} isomorphism classes exist",
                            cell_to_string(cell), cell.count, available));
        }
    }

    std::vector<Graph> kept;
    std::map<std::uint64_t, std::vector<std::size_t>> buckets;
    std::vector<std::uint64_t> kept_seeds;
    const std::uint64_t cell_stream = mix_seed(seed, 0xce11ULL + cell_index);
    std::uint64_t attempt = 0;
    std::uint64_t stalled = 0;
    const std::uint64_t stall_cap = 200000;
    while (kept.size() < static_cast<std::size_t>(cell.count)) {
        if (stalled > stall_cap) {
            throw std::runtime_error(fmt::format(
                "cell {}: found only {} distinct classes after {} consecutive duplicates; "
                "the request likely exceeds the available isomorphism classes",
                cell_to_string(cell), kept.size(), stall_cap));
        }
        const std::uint64_t graph_seed = mix_seed(cell_stream, attempt++);
        Graph g = sample_er(cell.n, cell.p, graph_seed);
        const std::uint64_t sig = wl2_signature(g);
        auto &bucket = buckets[sig];
        bool duplicate = false;
        for (const std::size_t idx : bucket) {
            if (isomorphic(g, kept[idx])) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) {
            ++stalled;
            continue;
        }
        stalled = 0;
        bucket.push_back(kept.size());
        kept.push_back(std::move(g));
        kept_seeds.push_back(graph_seed);
    }
    for (std::size_t i = 0; i < kept.size(); ++i) {
        out.push_back(label_entry(std::move(kept[i]), cell.p, kept_seeds[i]));
    }
}

} // namespace

DatasetManifest build_dataset(const std::vector<GenCell> &cells, std::uint64_t seed) {
    if (cells.empty()) {
        throw std::invalid_argument("build_dataset: no generation cells given");
    }
    DatasetManifest manifest;
    manifest.seed = seed;
    manifest.cells = cells;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        generate_cell(cells[i], i, seed, manifest.entries);
    }
    return manifest;
}

namespace {

json cell_to_json(const GenCell &cell) {
    json j;
    j["n"] = cell.n;
    j["exhaustive"] = cell.exhaustive;
    j["p"] = cell.p;
    j["count"] = cell.count;
    return j;
}

GenCell cell_from_json(const json &j) {
    GenCell cell;
    cell.n = j.at("n").get<int>();
    cell.exhaustive = j.at("exhaustive").get<bool>();
    cell.p = j.at("p").get<double>();
    cell.count = j.at("count").get<int>();
    return cell;
}

} // namespace

void save_manifest(const DatasetManifest &manifest, const std::string &path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
    }
    json header;
    header["version"] = 1;
    header["seed"] = manifest.seed;
    header["cells"] = json::array();
    for (const GenCell &cell : manifest.cells) {
        header["cells"].push_back(cell_to_json(cell));
    }
    out << header.dump() << '\n';
    for (const DatasetEntry &entry : manifest.entries) {
        json j;
        j["n"] = entry.graph.n();
        j["edges"] = json::array();
        for (const auto &[u, v] : entry.graph.edges()) {
            j["edges"].push_back(json::array({u, v}));
        }
        j["p"] = entry.edge_probability;
        j["omega"] = entry.omega;
        j["max_cliques"] = json::array();
        for (const Bitstring b : entry.target_bitstrings) {
            j["max_cliques"].push_back(bitstring_to_string(b, entry.graph.n()));
        }
        j["seed"] = entry.source_seed;
        out << j.dump() << '\n';
    }
}

DatasetManifest load_manifest(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(fmt::format("cannot open '{}'", path));
    }
    DatasetManifest manifest;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error &e) {
            throw std::runtime_error(
                fmt::format("{}:{}: malformed manifest line: {}", path, line_no, e.what()));
        }
        try {
            if (!have_header) {
                if (j.at("version").get<int>() != 1) {
                    throw std::runtime_error("unsupported manifest version");
                }
                manifest.seed = j.at("seed").get<std::uint64_t>();
                for (const json &c : j.at("cells")) {
                    manifest.cells.push_back(cell_from_json(c));
                }
                have_header = true;
                continue;
            }
            const int n = j.at("n").get<int>();
            std::vector<Edge> edges;
            for (const json &e : j.at("edges")) {
                edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
            }
            DatasetEntry entry{Graph(n, std::move(edges)), j.at("omega").get<int>(), {},
                               j.at("p").get<double>(), j.at("seed").get<std::uint64_t>()};
            for (const json &b : j.at("max_cliques")) {
                entry.target_bitstrings.push_back(bitstring_from_string(b.get<std::string>()));
            }
            std::sort(entry.target_bitstrings.begin(), entry.target_bitstrings.end());

            const CliqueLabel label = max_clique_label(entry.graph);
            if (entry.omega != label.omega || entry.target_bitstrings != label.max_cliques) {
                throw std::runtime_error("clique label inconsistent with the graph");
            }
            manifest.entries.push_back(std::move(entry));
        } catch (const json::exception &e) {
            throw std::runtime_error(
                fmt::format("{}:{}: invalid manifest entry: {}", path, line_no, e.what()));
        } catch (const std::runtime_error &e) {
            throw std::runtime_error(fmt::format("{}:{}: {}", path, line_no, e.what()));
        }
    }
    if (!have_header) {
        throw std::runtime_error(fmt::format("{}: empty manifest", path));
    }
    return manifest;
}

} // namespace qgnn
