#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "support.hpp"

#include "dfgfp/graph.hpp"
#include "dfgfp/quality.hpp"
#include "dfgfp/rng.hpp"

using namespace dfgfp;
using testsupport::make_graph;

TEST_CASE("the layered family has the predicted sizes") {
    LayeredGraph g0 = build_gn(0);
    REQUIRE(g0.layers.size() == 1);
    CHECK(g0.layers[0].size() == 1);
    CHECK(g0.graph.vertex_count() == 1);
    CHECK(g0.graph.edge_count() == 0);

    LayeredGraph g1 = build_gn(1);
    REQUIRE(g1.layers.size() == 2);
    CHECK(g1.layers[0].size() == 1);
    CHECK(g1.layers[1].size() == 2);

    LayeredGraph g3 = build_gn(3);
    REQUIRE(g3.layers.size() == 4);
    CHECK(g3.layers[0].size() == 1);
    CHECK(g3.layers[1].size() == 2);
    CHECK(g3.layers[2].size() == 8);
    CHECK(g3.layers[3].size() == 2048);
    CHECK(g3.graph.vertex_count() == 2059);
}

TEST_CASE("layer members own every subset of the lower layers exactly once") {
    LayeredGraph g = build_gn(2);
    REQUIRE(g.by_children.size() == 3);
    CHECK(g.by_children[0].size() == 1);
    CHECK(g.by_children[1].size() == 2);
    CHECK(g.by_children[2].size() == 8);
    // Layer 2 subsets range over the 3 vertices below it.
    std::set<std::vector<VertexId>> seen;
    for (const auto& [children, v] : g.by_children[2]) {
        seen.insert(children);
        CHECK(g.graph.has_vertex(v));
        std::vector<VertexId> actual = g.graph.children(v);
        CHECK(actual == children);
    }
    CHECK(seen.size() == 8);
}

TEST_CASE("the family stops where materialization becomes absurd") {
    CHECK_THROWS_AS(build_gn(4), std::invalid_argument);
    CHECK_THROWS_AS(build_gn(-1), std::invalid_argument);
}

TEST_CASE("layered edges only ever point to strictly lower layers") {
    LayeredGraph g = build_gn(3);
    std::map<VertexId, int> layer_of;
    for (int i = 0; i < int(g.layers.size()); ++i) {
        for (VertexId v : g.layers[i]) layer_of[v] = i;
    }
    for (const auto& [src, dst] : g.graph.edges()) {
        CHECK(layer_of[src] > layer_of[dst]);
    }
}

TEST_CASE("sampled graphs stay inside the pinned budget") {
    Rng rng(404);
    for (int i = 0; i < 200; ++i) {
        std::vector<std::vector<VertexId>> layers;
        DataFlowGraph h = sample_layered(rng, SampleShape{}, &layers);
        CHECK(h.vertex_count() <= 80);
        CHECK(h.vertex_count() >= 1);
        REQUIRE(!layers.empty());
        CHECK(layers.size() <= 4 + 1u);
        std::map<VertexId, int> layer_of;
        for (int l = 0; l < int(layers.size()); ++l) {
            for (VertexId v : layers[l]) layer_of[v] = l;
        }
        for (const auto& [src, dst] : h.edges()) {
            CHECK(layer_of[src] > layer_of[dst]);
        }
        for (VertexId v : h.vertex_ids()) {
            CHECK(h.label(v) == "op");
        }
        CHECK(validate(h).empty());
    }
}

TEST_CASE("children sets are distinct within a sampled layer") {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        std::vector<std::vector<VertexId>> layers;
        DataFlowGraph h = sample_layered(rng, SampleShape{}, &layers);
        for (const auto& layer : layers) {
            std::set<std::vector<VertexId>> seen;
            for (VertexId v : layer) {
                CHECK(seen.insert(h.children(v)).second);
            }
        }
    }
}

TEST_CASE("samples embed into the materialized family by children sets") {
    // The sampler's last layer belongs to the unmaterializable next family
    // member, so the embedding covers the first four layers only.
    LayeredGraph family = build_gn(3);
    Rng rng(77);
    for (int i = 0; i < 50; ++i) {
        std::vector<std::vector<VertexId>> layers;
        DataFlowGraph h = sample_layered(rng, SampleShape{}, &layers);
        std::size_t covered = std::min(layers.size(), family.layers.size());
        std::map<VertexId, VertexId> image;
        std::size_t expected = 0;
        for (std::size_t l = 0; l < covered; ++l) {
            expected += layers[l].size();
            for (VertexId v : layers[l]) {
                std::vector<VertexId> mapped;
                for (VertexId c : h.children(v)) mapped.push_back(image[c]);
                std::sort(mapped.begin(), mapped.end());
                auto it = family.by_children[l].find(mapped);
                REQUIRE(it != family.by_children[l].end());
                image[v] = it->second;
            }
        }
        CHECK(image.size() == expected);
    }
}

TEST_CASE("fixed point detection matches its definition") {
    DataFlowGraph chain = make_graph({{0, "a"}, {1, "b"}, {2, "c"}},
                                     {{0, 1}, {1, 2}});
    CHECK(is_approx_fixed_point(chain));
    // Twin middle vertices with one shared child and one shared parent
    // carry equal probabilities at equal depth, so a pass merges them.
    DataFlowGraph dia = make_graph(
        {{0, "op"}, {1, "op"}, {2, "op"}, {3, "op"}},
        {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
    CHECK(!is_approx_fixed_point(dia));
}

TEST_CASE("iso pair counting sees structure, not probabilities") {
    DataFlowGraph dia = make_graph(
        {{0, "op"}, {1, "op"}, {2, "op"}, {3, "op"}},
        {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
    CHECK(count_rooted_iso_pairs(dia) == 1);

    DataFlowGraph chain = make_graph({{0, "a"}, {1, "b"}, {2, "c"}},
                                     {{0, 1}, {1, 2}});
    CHECK(count_rooted_iso_pairs(chain) == 0);

    // Two disjoint identical chains pair up at every depth.
    DataFlowGraph twins = make_graph(
        {{0, "x"}, {1, "y"}, {10, "x"}, {11, "y"}}, {{0, 1}, {10, 11}});
    CHECK(count_rooted_iso_pairs(twins) == 2);
}

TEST_CASE("same-label relabeling can create pairs the chain lacked") {
    DataFlowGraph chain = make_graph({{0, "op"}, {1, "op"}, {2, "op"}},
                                     {{0, 1}, {1, 2}});
    // Same shape, all labels equal: cones at depths 0, 1, 2 still differ
    // in size, so no pairs appear.
    CHECK(count_rooted_iso_pairs(chain) == 0);
}

TEST_CASE("the study is deterministic per seed") {
    QualityReport a = run_quality_study(40, 5);
    QualityReport b = run_quality_study(40, 5);
    CHECK(a.samples == 40);
    CHECK(a.fixed_point_fraction == b.fixed_point_fraction);
    CHECK(a.mean_iso_pairs == b.mean_iso_pairs);
    CHECK(a.resimplified_fixed_point_fraction ==
          b.resimplified_fixed_point_fraction);
    CHECK(a.sampler == b.sampler);
    CHECK(!a.sampler.empty());
    QualityReport c = run_quality_study(40, 6);
    bool differs = a.fixed_point_fraction != c.fixed_point_fraction ||
                   a.mean_iso_pairs != c.mean_iso_pairs;
    CHECK(differs);
}

TEST_CASE("the study validates its inputs") {
    CHECK_THROWS_AS(run_quality_study(0, 1), std::invalid_argument);
}

TEST_CASE("study fractions are proper fractions") {
    QualityReport r = run_quality_study(60, 123);
    CHECK(r.fixed_point_fraction >= 0.0);
    CHECK(r.fixed_point_fraction <= 1.0);
    CHECK(r.resimplified_fixed_point_fraction >= r.fixed_point_fraction);
    CHECK(r.mean_iso_pairs >= 0.0);
}
