#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

#include "qgnn/dataset.hpp"
#include "qgnn/rng.hpp"

#include <cstdio>
#include <fstream>

using namespace qgnn;

namespace {

std::string temp_path(const std::string &name) {
    return std::string("/tmp/qgnn_test_") + name;
}

} // namespace

TEST_CASE("erdos-renyi sampling") {
    SUBCASE("p = 0 gives the empty graph, p = 1 the complete graph") {
        CHECK(sample_er(5, 0.0, 7).edges().empty());
        CHECK(sample_er(5, 1.0, 7).edges().size() == 10);
    }
    SUBCASE("deterministic per seed") {
        CHECK(sample_er(8, 0.37, 123) == sample_er(8, 0.37, 123));
    }
    SUBCASE("edge probability out of range") {
        CHECK_THROWS(sample_er(5, -0.1, 0));
        CHECK_THROWS(sample_er(5, 1.1, 0));
        CHECK_THROWS(sample_er(0, 0.5, 0));
    }
    SUBCASE("mean edge count matches the binomial mean within 3 standard errors") {
        // n = 8, p = 0.5: mean 14, variance 7 over 28 pairs
        const int samples = 10000;
        double total = 0.0;
        for (int i = 0; i < samples; ++i) {
            total += static_cast<double>(sample_er(8, 0.5, 1000 + static_cast<std::uint64_t>(i))
                                             .edges()
                                             .size());
        }
        const double mean = total / samples;
        const double standard_error = std::sqrt(7.0 / samples);
        CHECK(std::abs(mean - 14.0) < 3.0 * standard_error);
    }
}

TEST_CASE("wl2 deduplication") {
    SUBCASE("all 64 labelled graphs on 4 vertices collapse to 11 classes") {
        std::vector<Graph> graphs;
        for (std::uint64_t mask = 0; mask < 64; ++mask) {
            graphs.push_back(Graph::from_edge_mask(4, mask));
        }
        CHECK(dedup_wl2(graphs).size() == 11);
    }
    SUBCASE("duplicates collapse to the first-seen representative") {
        const std::vector<Graph> graphs{Graph::complete(3), Graph::complete(3)};
        const std::vector<Graph> unique = dedup_wl2(graphs);
        REQUIRE(unique.size() == 1);
        CHECK(unique.front() == Graph::complete(3));
    }
    SUBCASE("idempotent") {
        std::vector<Graph> graphs;
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            graphs.push_back(sample_er(5, 0.5, seed));
        }
        const std::vector<Graph> once = dedup_wl2(graphs);
        const std::vector<Graph> twice = dedup_wl2(once);
        CHECK(once.size() == twice.size());
    }
    SUBCASE("mixed sizes are rejected") {
        CHECK_THROWS(dedup_wl2({Graph::complete(3), Graph::complete(4)}));
    }
}

TEST_CASE("exhaustive class enumeration matches the known counts") {
    CHECK(enumerate_isomorphism_classes(2).size() == 2);
    CHECK(enumerate_isomorphism_classes(3).size() == 4);
    CHECK(enumerate_isomorphism_classes(4).size() == 11);
    CHECK(enumerate_isomorphism_classes(5).size() == 34);
    CHECK(enumerate_isomorphism_classes(6).size() == 156);
    CHECK_THROWS(enumerate_isomorphism_classes(7));
}

TEST_CASE("wl2 classes equal exact isomorphism classes for n <= 5") {
    // brute-force canonical forms over all n! relabellings as the oracle
    for (int n = 2; n <= 5; ++n) {
        const int pairs = n * (n - 1) / 2;
        std::vector<Graph> graphs;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs); ++mask) {
            graphs.push_back(Graph::from_edge_mask(n, mask));
        }
        const std::size_t wl_classes = dedup_wl2(graphs).size();
        CHECK(wl_classes == oracles::count_iso_classes_brute_force(graphs));
    }
}

TEST_CASE("isomorphism test agrees with canonical forms") {
    Rng rng(60);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform_int(3));
        const Graph a = sample_er(n, 0.5, rng.next());
        const Graph b = sample_er(n, 0.5, rng.next());
        CHECK(isomorphic(a, b) ==
              (oracles::canonical_edge_mask(a) == oracles::canonical_edge_mask(b)));
        // relabelled copies are always isomorphic
        CHECK(isomorphic(a, permute(a, random_permutation(n, rng))));
    }
}

TEST_CASE("build_dataset cells") {
    SUBCASE("exhaustive cells") {
        const DatasetManifest two = build_dataset({{2, true, -1.0, 0}}, 1);
        CHECK(two.entries.size() == 2);
        const DatasetManifest three = build_dataset({{3, true, -1.0, 0}}, 1);
        CHECK(three.entries.size() == 4);
    }
    SUBCASE("counted cell yields pairwise non-isomorphic labelled entries") {
        const DatasetManifest m = build_dataset({{8, false, 0.5, 111}}, 7);
        REQUIRE(m.entries.size() == 111);
        for (std::size_t i = 0; i < m.entries.size(); ++i) {
            for (std::size_t j = i + 1; j < m.entries.size(); ++j) {
                REQUIRE_FALSE(isomorphic(m.entries[i].graph, m.entries[j].graph));
            }
        }
        for (const DatasetEntry &entry : m.entries) {
            REQUIRE(entry.omega >= 1);
            REQUIRE_FALSE(entry.target_bitstrings.empty());
        }
    }
    SUBCASE("requests beyond the class count name the cell") {
        CHECK_THROWS_WITH_AS(build_dataset({{3, false, 0.5, 5}}, 1),
                             doctest::Contains("n=3 p=0.5 count=5"), std::invalid_argument);
    }
    SUBCASE("empty cell list is rejected") {
        CHECK_THROWS(build_dataset({}, 1));
    }
    SUBCASE("deterministic per seed") {
        const DatasetManifest a = build_dataset({{6, false, 0.4, 20}}, 99);
        const DatasetManifest b = build_dataset({{6, false, 0.4, 20}}, 99);
        REQUIRE(a.entries.size() == b.entries.size());
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            CHECK(a.entries[i].graph == b.entries[i].graph);
        }
    }
}

TEST_CASE("omega labels re-derivable by the exhaustive oracle") {
    const DatasetManifest m = build_dataset({{5, true, -1.0, 0}, {7, false, 0.5, 15}}, 3);
    for (const DatasetEntry &entry : m.entries) {
        const CliqueLabel slow = oracles::brute_force_clique_label(entry.graph);
        CHECK(entry.omega == slow.omega);
        CHECK(entry.target_bitstrings == slow.max_cliques);
    }
}

TEST_CASE("manifest persistence") {
    const std::string path = temp_path("manifest.jsonl");
    const DatasetManifest m = build_dataset({{4, true, -1.0, 0}, {6, false, 0.5, 10}}, 17);

    SUBCASE("round trip is structurally identical") {
        save_manifest(m, path);
        const DatasetManifest loaded = load_manifest(path);
        CHECK(loaded.seed == m.seed);
        CHECK(loaded.cells == m.cells);
        REQUIRE(loaded.entries.size() == m.entries.size());
        for (std::size_t i = 0; i < m.entries.size(); ++i) {
            CHECK(loaded.entries[i].graph == m.entries[i].graph);
            CHECK(loaded.entries[i].omega == m.entries[i].omega);
            CHECK(loaded.entries[i].target_bitstrings == m.entries[i].target_bitstrings);
            CHECK(loaded.entries[i].edge_probability == m.entries[i].edge_probability);
            CHECK(loaded.entries[i].source_seed == m.entries[i].source_seed);
        }
    }
    SUBCASE("truncated files fail with a line number") {
        save_manifest(m, path);
        std::ifstream in(path);
        std::string header, second;
        std::getline(in, header);
        std::getline(in, second);
        in.close();
        std::ofstream out(path);
        out << header << '\n' << second.substr(0, second.size() / 2) << '\n';
        out.close();
        CHECK_THROWS_WITH_AS(load_manifest(path), doctest::Contains(":2:"), std::runtime_error);
    }
    SUBCASE("inconsistent labels are a validation error") {
        std::ofstream out(path);
        out << R"({"cells":[],"seed":0,"version":1})" << '\n';
        // triangle labelled with omega 2: inconsistent with {111}
        out << R"({"edges":[[0,1],[0,2],[1,2]],"max_cliques":["011"],"n":3,"omega":2,"p":0.5,"seed":1})"
            << '\n';
        out.close();
        CHECK_THROWS_WITH_AS(load_manifest(path), doctest::Contains("inconsistent"),
                             std::runtime_error);
    }
    SUBCASE("missing and empty files") {
        CHECK_THROWS(load_manifest(temp_path("does_not_exist.jsonl")));
        std::ofstream out(path);
        out.close();
        CHECK_THROWS_WITH_AS(load_manifest(path), doctest::Contains("empty"), std::runtime_error);
    }
    std::remove(path.c_str());
}
