#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "support.hpp"

#include "dfgfp/graph.hpp"
#include "dfgfp/rng.hpp"

using namespace dfgfp;
using testsupport::diamond;
using testsupport::make_graph;
using testsupport::random_dag;

TEST_CASE("graph construction and lookups") {
    DataFlowGraph g = diamond();
    CHECK(g.vertex_count() == 4);
    CHECK(g.edge_count() == 4);
    CHECK(g.label(1) == "xor");
    CHECK(g.has_edge(0, 1));
    CHECK(!g.has_edge(1, 0));
    CHECK(g.in_degree(3) == 2);
    CHECK(g.out_degree(0) == 2);
    CHECK(g.children(0) == std::vector<VertexId>{1, 2});
    CHECK(g.parents(3) == std::vector<VertexId>{1, 2});
}

TEST_CASE("add_vertex rejects relabeling but accepts repeats") {
    DataFlowGraph g;
    g.add_vertex(1, "xor");
    g.add_vertex(1, "xor");
    CHECK(g.vertex_count() == 1);
    CHECK_THROWS_AS(g.add_vertex(1, "and"), GraphError);
}

TEST_CASE("add_edge requires declared endpoints and dedups") {
    DataFlowGraph g;
    g.add_vertex(1, "xor");
    CHECK_THROWS_AS(g.add_edge(1, 2), GraphError);
    g.add_vertex(2, "other");
    g.add_edge(1, 2);
    g.add_edge(1, 2);
    CHECK(g.edge_count() == 1);
}

TEST_CASE("compute_depths on a single vertex") {
    DataFlowGraph g = make_graph({{7, "xor"}}, {});
    DepthMap d = compute_depths(g);
    CHECK(d.at(7) == 0);
}

TEST_CASE("compute_depths on a chain") {
    DataFlowGraph g = make_graph({{0, "a"}, {1, "b"}, {2, "c"}},
                                 {{0, 1}, {1, 2}});
    DepthMap d = compute_depths(g);
    CHECK(d.at(0) == 0);
    CHECK(d.at(1) == 1);
    CHECK(d.at(2) == 2);
}

TEST_CASE("compute_depths on the diamond") {
    DepthMap d = compute_depths(diamond());
    CHECK(d.at(0) == 0);
    CHECK(d.at(1) == 1);
    CHECK(d.at(2) == 1);
    CHECK(d.at(3) == 2);
}

TEST_CASE("compute_depths rejects cycles naming a back edge") {
    DataFlowGraph g;
    g.add_vertex(0, "a");
    g.add_vertex(1, "b");
    g.add_edge(0, 1);
    g.add_edge(1, 0);
    CHECK_THROWS_WITH_AS(compute_depths(g),
                         doctest::Contains("cycle"), GraphError);
}

TEST_CASE("depth is zero exactly for vertices with no incoming edge") {
    Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        DataFlowGraph g = random_dag(rng, 30, {"a", "b", "c"});
        DepthMap d = compute_depths(g);
        for (VertexId v : g.vertex_ids()) {
            CHECK((d.at(v) == 0) == (g.in_degree(v) == 0));
        }
        for (const auto& [u, v] : g.edges()) {
            CHECK(d.at(v) >= d.at(u) + 1);
        }
    }
}

TEST_CASE("maximal_rooted_subgraph from the diamond top is everything") {
    DataFlowGraph g = diamond();
    RootedSubgraph s = maximal_rooted_subgraph(g, 0);
    CHECK(s.root == 0);
    CHECK(s.graph.vertex_count() == 4);
    CHECK(s.graph.edge_count() == 4);
}

TEST_CASE("maximal_rooted_subgraph from a middle vertex") {
    DataFlowGraph g = diamond();
    RootedSubgraph s = maximal_rooted_subgraph(g, 1);
    CHECK(s.graph.vertex_count() == 2);
    CHECK(s.graph.has_edge(1, 3));
    CHECK(s.graph.edge_count() == 1);
}

TEST_CASE("maximal_rooted_subgraph of a sink is a singleton") {
    DataFlowGraph g = diamond();
    RootedSubgraph s = maximal_rooted_subgraph(g, 3);
    CHECK(s.graph.vertex_count() == 1);
    CHECK(s.graph.edge_count() == 0);
}

TEST_CASE("maximal_rooted_subgraph rejects unknown roots") {
    DataFlowGraph g = diamond();
    CHECK_THROWS_AS(maximal_rooted_subgraph(g, 99), GraphError);
}

TEST_CASE("every longest path in a rooted cone passes through the root") {
    Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        DataFlowGraph g = random_dag(rng, 14, {"a", "b"});
        std::vector<VertexId> ids = g.vertex_ids();
        VertexId root = ids[rng.bounded(ids.size())];
        RootedSubgraph cone = maximal_rooted_subgraph(g, root);

        // Longest directed paths inside the cone, found by brute force.
        std::size_t best = 0;
        std::vector<std::vector<VertexId>> longest;
        std::function<void(std::vector<VertexId>&)> extend =
            [&](std::vector<VertexId>& path) {
                bool grew = false;
                for (VertexId c : cone.graph.children(path.back())) {
                    grew = true;
                    path.push_back(c);
                    extend(path);
                    path.pop_back();
                }
                if (!grew) {
                    if (path.size() > best) {
                        best = path.size();
                        longest.clear();
                    }
                    if (path.size() == best) longest.push_back(path);
                }
            };
        for (VertexId v : cone.graph.vertex_ids()) {
            std::vector<VertexId> path{v};
            extend(path);
        }
        for (const auto& path : longest) {
            CHECK(std::find(path.begin(), path.end(), root) != path.end());
        }
    }
}

TEST_CASE("rooted_isomorphic on singletons") {
    DataFlowGraph a = make_graph({{0, "xor"}}, {});
    DataFlowGraph b = make_graph({{5, "xor"}}, {});
    DataFlowGraph c = make_graph({{9, "and"}}, {});
    CHECK(rooted_isomorphic({0, a}, {5, b}));
    CHECK(!rooted_isomorphic({0, a}, {9, c}));
}

TEST_CASE("rooted_isomorphic on the diamond's twin cones") {
    DataFlowGraph g = diamond();
    RootedSubgraph sb = maximal_rooted_subgraph(g, 1);
    RootedSubgraph sc = maximal_rooted_subgraph(g, 2);
    CHECK(rooted_isomorphic(sb, sc));
}

TEST_CASE("rooted_isomorphic forces root onto root") {
    // Same vertex multiset, but only one graph has its root on the long
    // branch.
    DataFlowGraph a = make_graph({{0, "x"}, {1, "x"}, {2, "y"}},
                                 {{0, 1}, {1, 2}});
    DataFlowGraph b = make_graph({{0, "x"}, {1, "x"}, {2, "y"}},
                                 {{0, 1}, {0, 2}});
    CHECK(!rooted_isomorphic({0, a}, {0, b}));
}

TEST_CASE("rooted_isomorphic honors the ambient in-degree option") {
    // Two isomorphic 2-vertex cones; an extra consumer gives vertex 4 a
    // different ambient in-degree than its partner.
    DataFlowGraph g = make_graph(
        {{0, "s"}, {1, "xor"}, {2, "c"}, {3, "xor"}, {4, "c"}, {5, "t"}},
        {{0, 1}, {0, 3}, {1, 2}, {3, 4}, {5, 4}});
    RootedSubgraph s1 = maximal_rooted_subgraph(g, 1);
    RootedSubgraph s3 = maximal_rooted_subgraph(g, 3);
    CHECK(rooted_isomorphic(s1, s3));
    IsoOptions strict;
    strict.match_indegree_in = &g;
    CHECK(!rooted_isomorphic(s1, s3, strict));
}

TEST_CASE("rooted_isomorphic refuses oversized inputs") {
    DataFlowGraph big;
    for (VertexId v = 0; v < 201; ++v) big.add_vertex(v, "x");
    IsoOptions opts;
    CHECK_THROWS_WITH_AS(rooted_isomorphic({0, big}, {0, big}, opts),
                         doctest::Contains("size guard"), GraphError);
}

TEST_CASE("rooted_isomorphic is an equivalence on random cones") {
    Rng rng(37);
    std::vector<RootedSubgraph> cones;
    for (int trial = 0; trial < 12; ++trial) {
        DataFlowGraph g = random_dag(rng, 10, {"a", "b"});
        std::vector<VertexId> ids = g.vertex_ids();
        cones.push_back(maximal_rooted_subgraph(g, ids[rng.bounded(ids.size())]));
    }
    for (const auto& s : cones) CHECK(rooted_isomorphic(s, s));
    for (std::size_t i = 0; i < cones.size(); ++i) {
        for (std::size_t j = i + 1; j < cones.size(); ++j) {
            CHECK(rooted_isomorphic(cones[i], cones[j]) ==
                  rooted_isomorphic(cones[j], cones[i]));
        }
    }
    for (std::size_t i = 0; i < cones.size(); ++i) {
        for (std::size_t j = 0; j < cones.size(); ++j) {
            for (std::size_t k = 0; k < cones.size(); ++k) {
                if (rooted_isomorphic(cones[i], cones[j]) &&
                    rooted_isomorphic(cones[j], cones[k])) {
                    CHECK(rooted_isomorphic(cones[i], cones[k]));
                }
            }
        }
    }
}

TEST_CASE("merge_vertices collapses the diamond middle into a chain") {
    DataFlowGraph g = diamond();
    DataFlowGraph m = merge_vertices(g, {{1, 2}});
    CHECK(m.vertex_count() == 3);
    CHECK(m.edge_count() == 2);
    CHECK(m.has_edge(0, 1));
    CHECK(m.has_edge(1, 3));
    CHECK(m.label(1) == "xor");
}

TEST_CASE("merge_vertices with singleton groups is the identity") {
    DataFlowGraph g = diamond();
    DataFlowGraph m = merge_vertices(g, {{0}, {3}});
    CHECK(m == g);
}

TEST_CASE("merge_vertices unions in-edges when merging sinks") {
    DataFlowGraph g = make_graph(
        {{0, "a"}, {1, "b"}, {2, "s"}, {3, "s"}}, {{0, 2}, {1, 3}});
    DataFlowGraph m = merge_vertices(g, {{2, 3}});
    CHECK(m.vertex_count() == 3);
    CHECK(m.has_edge(0, 2));
    CHECK(m.has_edge(1, 2));
}

TEST_CASE("merge_vertices validates its groups") {
    DataFlowGraph g = diamond();
    CHECK_THROWS_WITH_AS(merge_vertices(g, {{1, 3}}),
                         doctest::Contains("labels"), GraphError);
    CHECK_THROWS_WITH_AS(merge_vertices(g, {{0, 99}}),
                         doctest::Contains("99"), GraphError);
    CHECK_THROWS_AS(merge_vertices(g, {{}}), GraphError);
    CHECK_THROWS_AS(merge_vertices(g, {{1}, {1}}), GraphError);
    DataFlowGraph h = make_graph({{0, "x"}, {1, "x"}}, {{0, 1}});
    CHECK_THROWS_WITH_AS(merge_vertices(h, {{0, 1}}),
                         doctest::Contains("edge"), GraphError);
}

TEST_CASE("merge_vertices reduces vertex count by group excess") {
    Rng rng(51);
    for (int trial = 0; trial < 25; ++trial) {
        DataFlowGraph g = random_dag(rng, 20, {"a"});
        DepthMap d = compute_depths(g);
        std::map<std::size_t, std::vector<VertexId>> by_depth;
        for (const auto& [v, depth] : d) by_depth[depth].push_back(v);
        std::vector<std::vector<VertexId>> groups;
        std::size_t excess = 0;
        for (const auto& [depth, ids] : by_depth) {
            (void)depth;
            if (ids.size() >= 2) {
                groups.push_back(ids);
                excess += ids.size() - 1;
            }
        }
        if (groups.empty()) continue;
        DataFlowGraph m = merge_vertices(g, groups);
        CHECK(m.vertex_count() == g.vertex_count() - excess);
        CHECK(validate(m).empty());
    }
}

TEST_CASE("validate accepts the diamond and reports defects") {
    CHECK(validate(diamond()).empty());

    DataFlowGraph self;
    self.add_vertex(0, "a");
    self.add_edge(0, 0);
    std::vector<std::string> v1 = validate(self);
    REQUIRE(v1.size() == 1);
    CHECK(v1[0].find("self-loop") != std::string::npos);

    DataFlowGraph cyc;
    cyc.add_vertex(0, "a");
    cyc.add_vertex(1, "b");
    cyc.add_edge(0, 1);
    cyc.add_edge(1, 0);
    std::vector<std::string> v2 = validate(cyc);
    REQUIRE(v2.size() == 1);
    CHECK(v2[0].find("cycle") != std::string::npos);
}
