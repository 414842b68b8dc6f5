#include "dfgfp/fis.hpp"

#include <algorithm>
#include <stdexcept>

namespace dfgfp {

namespace {

using Edge = std::pair<VertexId, VertexId>;

struct GrowthAttempt {
    std::vector<Edge> chosen;
    std::set<Edge> chosen_set;
    std::set<VertexId> vset;
};

GrowthAttempt grow_once(const std::vector<Edge>& all_edges, int want,
                        Rng& rng) {
    GrowthAttempt a;
    Edge seed = all_edges[rng.bounded(all_edges.size())];
    a.chosen.push_back(seed);
    a.chosen_set.insert(seed);
    a.vset.insert(seed.first);
    a.vset.insert(seed.second);
    while (int(a.chosen.size()) < want) {
        std::vector<Edge> candidates;
        for (const Edge& e : all_edges) {
            if (a.chosen_set.count(e)) continue;
            if (a.vset.count(e.first) || a.vset.count(e.second)) {
                candidates.push_back(e);
            }
        }
        if (candidates.empty()) break;  // stuck
        Edge e = candidates[rng.bounded(candidates.size())];
        a.chosen.push_back(e);
        a.chosen_set.insert(e);
        a.vset.insert(e.first);
        a.vset.insert(e.second);
    }
    return a;
}

}  // namespace

Fragment sample_fragment(const DataFlowGraph& h, int edges, Rng& rng,
                         int max_restarts) {
    if (edges < 1) throw std::invalid_argument("fragment size must be >= 1");
    if (h.edge_count() == 0) {
        throw GraphError("cannot sample a fragment of an edgeless graph");
    }
    std::vector<Edge> all_edges(h.edges().begin(), h.edges().end());

    GrowthAttempt best;
    for (int attempt = 0; attempt <= max_restarts; ++attempt) {
        GrowthAttempt a = grow_once(all_edges, edges, rng);
        if (a.chosen.size() > best.chosen.size()) best = std::move(a);
        if (int(best.chosen.size()) == edges) break;
    }

    Fragment frag;
    frag.effective_edges = int(best.chosen.size());
    for (VertexId v : best.vset) frag.graph.add_vertex(v, h.label(v));
    for (const Edge& e : best.chosen) frag.graph.add_edge(e.first, e.second);
    return frag;
}

namespace {

struct MonoSearch {
    const DataFlowGraph& frag;
    const DataFlowGraph& g;
    std::vector<VertexId> order;
    std::map<VertexId, VertexId> map;
    std::set<VertexId> used;

    bool feasible(VertexId fv, VertexId gv) const {
        if (frag.label(fv) != g.label(gv)) return false;
        if (g.out_degree(gv) < frag.out_degree(fv)) return false;
        if (g.in_degree(gv) < frag.in_degree(fv)) return false;
        for (VertexId fc : frag.children(fv)) {
            auto it = map.find(fc);
            if (it != map.end() && !g.has_edge(gv, it->second)) return false;
        }
        for (VertexId fp : frag.parents(fv)) {
            auto it = map.find(fp);
            if (it != map.end() && !g.has_edge(it->second, gv)) return false;
        }
        return true;
    }

    bool extend(std::size_t pos) {
        if (pos == order.size()) return true;
        VertexId fv = order[pos];
        // Prefer candidates reachable from an already mapped neighbor; that
        // keeps the candidate set small on large targets.
        const std::vector<VertexId>* pool = nullptr;
        for (VertexId fp : frag.parents(fv)) {
            auto it = map.find(fp);
            if (it != map.end()) {
                pool = &g.children(it->second);
                break;
            }
        }
        if (!pool) {
            for (VertexId fc : frag.children(fv)) {
                auto it = map.find(fc);
                if (it != map.end()) {
                    pool = &g.parents(it->second);
                    break;
                }
            }
        }
        if (pool) {
            for (VertexId gv : *pool) {
                if (used.count(gv) || !feasible(fv, gv)) continue;
                map[fv] = gv;
                used.insert(gv);
                if (extend(pos + 1)) return true;
                map.erase(fv);
                used.erase(gv);
            }
            return false;
        }
        for (const auto& [gv, label] : g.labels()) {
            (void)label;
            if (used.count(gv) || !feasible(fv, gv)) continue;
            map[fv] = gv;
            used.insert(gv);
            if (extend(pos + 1)) return true;
            map.erase(fv);
            used.erase(gv);
        }
        return false;
    }
};

}  // namespace

bool is_subgraph(const DataFlowGraph& frag, const DataFlowGraph& g) {
    if (frag.vertex_count() == 0) {
        throw GraphError("subgraph test on an empty fragment");
    }
    if (frag.vertex_count() > g.vertex_count()) return false;
    if (frag.edge_count() > g.edge_count()) return false;

    // Order the fragment so each vertex after the first touches an earlier
    // one where possible (fragments are weakly connected, isolated vertices
    // only appear for hand-built inputs).
    MonoSearch search{frag, g, {}, {}, {}};
    std::set<VertexId> placed;
    std::vector<VertexId> ids = frag.vertex_ids();
    std::sort(ids.begin(), ids.end(), [&](VertexId a, VertexId b) {
        std::size_t da = frag.in_degree(a) + frag.out_degree(a);
        std::size_t db = frag.in_degree(b) + frag.out_degree(b);
        if (da != db) return da > db;
        return a < b;
    });
    while (placed.size() < ids.size()) {
        VertexId next = 0;
        bool found = false;
        for (VertexId v : ids) {
            if (placed.count(v)) continue;
            bool adjacent = placed.empty();
            for (VertexId c : frag.children(v)) {
                if (placed.count(c)) adjacent = true;
            }
            for (VertexId p : frag.parents(v)) {
                if (placed.count(p)) adjacent = true;
            }
            if (adjacent) {
                next = v;
                found = true;
                break;
            }
        }
        if (!found) {
            for (VertexId v : ids) {
                if (!placed.count(v)) {
                    next = v;
                    break;
                }
            }
        }
        placed.insert(next);
        search.order.push_back(next);
    }
    return search.extend(0);
}

FisScore nfis(const DataFlowGraph& h, const DataFlowGraph& g,
              const FisParams& params) {
    if (params.trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (params.fragment_edges < 1) {
        throw std::invalid_argument("fragment size must be >= 1");
    }
    if (h.edge_count() == 0) {
        throw GraphError("inclusion score needs at least one edge in h");
    }
    FisScore score;
    score.trials = params.trials;
    score.effective_n = params.fragment_edges;
    for (int t = 0; t < params.trials; ++t) {
        Rng rng(derive_seed(params.seed, "fragment", std::uint64_t(t)));
        Fragment frag = sample_fragment(h, params.fragment_edges, rng,
                                        params.max_restarts);
        score.effective_n = std::min(score.effective_n, frag.effective_edges);
        if (is_subgraph(frag.graph, g)) ++score.hits;
    }
    score.value = double(score.hits) / double(score.trials);
    return score;
}

}  // namespace dfgfp
