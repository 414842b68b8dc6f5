#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dfgfp/graph.hpp"
#include "dfgfp/rng.hpp"

namespace testsupport {

using dfgfp::DataFlowGraph;
using dfgfp::Label;
using dfgfp::VertexId;

inline DataFlowGraph make_graph(
    const std::vector<std::pair<VertexId, Label>>& vertices,
    const std::vector<std::pair<VertexId, VertexId>>& edges) {
    DataFlowGraph g;
    for (const auto& [id, label] : vertices) g.add_vertex(id, label);
    for (const auto& [src, dst] : edges) g.add_edge(src, dst);
    return g;
}

// a consumes b and c; b and c consume d. Labels default to the merge-ready
// configuration (b and c alike).
inline DataFlowGraph diamond(const Label& a = "other", const Label& b = "xor",
                             const Label& c = "xor", const Label& d = "and") {
    return make_graph({{0, a}, {1, b}, {2, c}, {3, d}},
                      {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
}

// Random DAG: edges always run from a higher id to a lower id, so the
// graph is acyclic by construction.
inline DataFlowGraph random_dag(dfgfp::Rng& rng, std::size_t max_vertices,
                                const std::vector<Label>& labels,
                                double edge_prob = 0.25) {
    const std::size_t n = 1 + rng.bounded(max_vertices);
    DataFlowGraph g;
    for (std::size_t i = 0; i < n; ++i) {
        g.add_vertex(i, labels[rng.bounded(labels.size())]);
    }
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (rng.unit() < edge_prob) g.add_edge(i, j);
        }
    }
    return g;
}

// Exhaustive injective label- and direction-preserving embedding test,
// independent of the library matcher.
inline bool brute_force_embeds(const DataFlowGraph& frag,
                               const DataFlowGraph& g) {
    std::vector<VertexId> fv = frag.vertex_ids();
    std::vector<VertexId> gv = g.vertex_ids();
    if (fv.size() > gv.size()) return false;

    std::map<VertexId, VertexId> map;
    std::set<VertexId> used;
    auto consistent = [&]() {
        for (const auto& [src, dst] : frag.edges()) {
            auto ms = map.find(src);
            auto md = map.find(dst);
            if (ms == map.end() || md == map.end()) continue;
            if (!g.has_edge(ms->second, md->second)) return false;
        }
        return true;
    };
    std::function<bool(std::size_t)> place = [&](std::size_t i) {
        if (i == fv.size()) return true;
        for (VertexId cand : gv) {
            if (used.count(cand)) continue;
            if (g.label(cand) != frag.label(fv[i])) continue;
            map[fv[i]] = cand;
            used.insert(cand);
            if (consistent() && place(i + 1)) return true;
            map.erase(fv[i]);
            used.erase(cand);
        }
        return false;
    };
    return place(0);
}

using EdgeSet = std::set<std::pair<VertexId, VertexId>>;

inline DataFlowGraph graph_from_edges(const DataFlowGraph& h,
                                      const EdgeSet& edges) {
    DataFlowGraph g;
    for (const auto& [src, dst] : edges) {
        if (!g.has_vertex(src)) g.add_vertex(src, h.label(src));
        if (!g.has_vertex(dst)) g.add_vertex(dst, h.label(dst));
    }
    for (const auto& [src, dst] : edges) g.add_edge(src, dst);
    return g;
}

// Exact distribution of the edge-growth fragment sampler: seed edge chosen
// uniformly, then uniformly among unchosen edges touching the fragment's
// vertex set, until n edges. Valid for graphs where growth cannot get
// stuck (a single weak component with >= n edges). Returns probability
// mass per final edge set.
inline std::map<EdgeSet, double> exact_fragment_distribution(
    const DataFlowGraph& h, std::size_t n) {
    std::vector<std::pair<VertexId, VertexId>> edges(h.edges().begin(),
                                                     h.edges().end());
    std::map<EdgeSet, double> out;

    std::function<void(const EdgeSet&, const std::set<VertexId>&, double)>
        grow = [&](const EdgeSet& chosen, const std::set<VertexId>& verts,
                   double prob) {
            if (chosen.size() == n) {
                out[chosen] += prob;
                return;
            }
            std::vector<std::pair<VertexId, VertexId>> candidates;
            for (const auto& e : edges) {
                if (chosen.count(e)) continue;
                if (verts.count(e.first) || verts.count(e.second)) {
                    candidates.push_back(e);
                }
            }
            if (candidates.empty()) {
                out[chosen] += prob;  // stuck; callers avoid this case
                return;
            }
            for (const auto& e : candidates) {
                EdgeSet next = chosen;
                next.insert(e);
                std::set<VertexId> nverts = verts;
                nverts.insert(e.first);
                nverts.insert(e.second);
                grow(next, nverts, prob / double(candidates.size()));
            }
        };

    for (const auto& e : edges) {
        grow({e}, {e.first, e.second}, 1.0 / double(edges.size()));
    }
    return out;
}

// Exact n-FIS value under the growth distribution, using the exhaustive
// embedding test as the inclusion oracle.
inline double exact_fis(const DataFlowGraph& h, const DataFlowGraph& g,
                        std::size_t n) {
    double score = 0.0;
    for (const auto& [edge_set, prob] : exact_fragment_distribution(h, n)) {
        if (brute_force_embeds(graph_from_edges(h, edge_set), g)) {
            score += prob;
        }
    }
    return score;
}

}  // namespace testsupport
