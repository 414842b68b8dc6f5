#include "dfgfp/simplify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dfgfp/rng.hpp"

namespace dfgfp {

std::map<VertexId, double> exact_visit_probability(const DataFlowGraph& g) {
    if (g.vertex_count() == 0) {
        throw GraphError("visit probability of an empty graph");
    }
    DepthMap depths = compute_depths(g);
    std::vector<VertexId> order = g.vertex_ids();
    // Children sit strictly deeper than their parents, so descending depth
    // evaluates children first.
    std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
        if (depths.at(a) != depths.at(b)) return depths.at(a) > depths.at(b);
        return a < b;
    });
    const double base = 1.0 / double(g.vertex_count());
    std::map<VertexId, double> p;
    for (VertexId v : order) {
        double acc = base;
        for (VertexId c : g.children(v)) {
            acc += p.at(c) / double(g.in_degree(c));
        }
        p[v] = acc;
    }
    return p;
}

VisitStats monte_carlo_visits(const DataFlowGraph& g, std::uint64_t walks,
                              std::uint64_t seed) {
    if (g.vertex_count() == 0) {
        throw GraphError("random walks on an empty graph");
    }
    const std::vector<VertexId> ids = g.vertex_ids();
    VisitStats stats;
    stats.walks = walks;
    for (VertexId id : ids) stats.visits[id] = 0;
    for (std::uint64_t w = 0; w < walks; ++w) {
        Rng rng(derive_seed(seed, "walk", w));
        VertexId cur = ids[rng.bounded(ids.size())];
        std::size_t steps = 0;
        while (true) {
            ++stats.visits[cur];
            const auto& consumers = g.parents(cur);
            if (consumers.empty()) break;
            cur = consumers[rng.bounded(consumers.size())];
            if (++steps > g.vertex_count()) {
                throw GraphError("walk exceeded vertex count; graph cyclic?");
            }
        }
    }
    for (const auto& [id, count] : stats.visits) {
        stats.frequency[id] =
            walks == 0 ? 0.0 : double(count) / double(walks);
    }
    return stats;
}

std::vector<int> cluster_1d(const std::vector<double>& values,
                            double bandwidth) {
    if (bandwidth <= 0.0) {
        throw std::invalid_argument("bandwidth must be positive");
    }
    const std::size_t n = values.size();
    if (n == 0) return {};

    std::vector<std::size_t> by_value(n);
    for (std::size_t i = 0; i < n; ++i) by_value[i] = i;
    std::sort(by_value.begin(), by_value.end(), [&](std::size_t a,
                                                    std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return a < b;
    });
    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = values[by_value[i]];
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + sorted[i];

    auto window_mean = [&](double m) {
        auto lo = std::lower_bound(sorted.begin(), sorted.end(), m - bandwidth);
        auto hi = std::upper_bound(sorted.begin(), sorted.end(), m + bandwidth);
        std::size_t a = std::size_t(lo - sorted.begin());
        std::size_t b = std::size_t(hi - sorted.begin());
        if (a == b) return m;  // empty window cannot happen for data points
        return (prefix[b] - prefix[a]) / double(b - a);
    };

    std::vector<double> mode(n);
    for (std::size_t i = 0; i < n; ++i) {
        double m = values[i];
        for (int iter = 0; iter < 500; ++iter) {
            double next = window_mean(m);
            if (std::fabs(next - m) <= 1e-9) {
                m = next;
                break;
            }
            m = next;
        }
        mode[i] = m;
    }

    // Group in mode order. A cluster closes when the next mode is at least
    // bandwidth/2 from the cluster's first mode, or when admitting the value
    // would spread the cluster's raw values past 2*bandwidth.
    std::vector<std::size_t> by_mode(n);
    for (std::size_t i = 0; i < n; ++i) by_mode[i] = i;
    std::sort(by_mode.begin(), by_mode.end(), [&](std::size_t a,
                                                  std::size_t b) {
        if (mode[a] != mode[b]) return mode[a] < mode[b];
        if (values[a] != values[b]) return values[a] < values[b];
        return a < b;
    });

    std::vector<int> cluster(n, -1);
    int next_id = -1;
    double anchor_mode = 0.0, lo_value = 0.0, hi_value = 0.0;
    for (std::size_t idx : by_mode) {
        bool fresh = next_id < 0 ||
                     mode[idx] - anchor_mode >= bandwidth / 2.0 ||
                     std::max(hi_value, values[idx]) -
                             std::min(lo_value, values[idx]) >
                         2.0 * bandwidth;
        if (fresh) {
            ++next_id;
            anchor_mode = mode[idx];
            lo_value = hi_value = values[idx];
        } else {
            lo_value = std::min(lo_value, values[idx]);
            hi_value = std::max(hi_value, values[idx]);
        }
        cluster[idx] = next_id;
    }
    return cluster;
}

namespace {

struct PassResult {
    DataFlowGraph graph;
    bool merged = false;
};

PassResult simplify_pass(const DataFlowGraph& g, const SimplifyParams& params,
                         std::uint64_t walk_seed) {
    PassResult result;
    if (g.vertex_count() == 0) {
        result.graph = g;
        return result;
    }

    std::map<VertexId, double> p;
    std::uint64_t walks = 0;
    if (params.use_exact_p) {
        p = exact_visit_probability(g);
    } else {
        walks = params.walks != 0
                    ? params.walks
                    : std::max<std::uint64_t>(10000, 100 * g.vertex_count());
        p = monte_carlo_visits(g, walks, walk_seed).frequency;
    }

    DepthMap depths = compute_depths(g);
    std::map<std::size_t, std::vector<VertexId>> by_depth;
    for (const auto& [id, d] : depths) by_depth[d].push_back(id);

    std::vector<std::vector<VertexId>> groups;
    for (const auto& [d, ids] : by_depth) {
        (void)d;
        std::vector<double> vals;
        vals.reserve(ids.size());
        for (VertexId id : ids) vals.push_back(p.at(id));

        double bw;
        if (params.bandwidth) {
            bw = *params.bandwidth;
        } else if (params.use_exact_p) {
            bw = 1e-12;
        } else {
            double spread = 0.0;
            for (double f : vals) {
                spread = std::max(spread, std::sqrt(f * (1.0 - f) /
                                                    double(walks)));
            }
            bw = std::max(3.0 * spread, 1.0 / double(walks));
        }

        std::vector<int> assign = cluster_1d(vals, bw);
        std::map<std::pair<int, Label>, std::vector<VertexId>> buckets;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            buckets[{assign[i], g.label(ids[i])}].push_back(ids[i]);
        }
        for (auto& [key, members] : buckets) {
            (void)key;
            if (members.size() > 1) groups.push_back(std::move(members));
        }
    }

    if (groups.empty()) {
        result.graph = g;
        return result;
    }
    result.graph = merge_vertices(g, groups);
    result.merged = true;
    return result;
}

}  // namespace

DataFlowGraph approx_simplify(const DataFlowGraph& g,
                              const SimplifyParams& params) {
    PassResult pass = simplify_pass(g, params, params.seed);
    if (!params.fixpoint) return pass.graph;
    std::uint64_t round = 1;
    while (pass.merged) {
        pass = simplify_pass(pass.graph, params,
                             derive_seed(params.seed, "fixpoint-pass", round));
        ++round;
    }
    return pass.graph;
}

DataFlowGraph exact_simplify(const DataFlowGraph& g,
                             const ExactSimplifyOptions& opts) {
    if (g.vertex_count() > opts.size_guard) {
        throw GraphError("exact simplification size guard exceeded (" +
                         std::to_string(g.vertex_count()) + " vertices)");
    }
    DataFlowGraph cur = g;
    while (true) {
        DepthMap depths = compute_depths(cur);
        std::vector<VertexId> ids = cur.vertex_ids();
        std::map<VertexId, RootedSubgraph> cones;
        auto cone_of = [&](VertexId v) -> const RootedSubgraph& {
            auto it = cones.find(v);
            if (it == cones.end()) {
                it = cones.emplace(v, maximal_rooted_subgraph(cur, v)).first;
            }
            return it->second;
        };

        IsoOptions iso;
        iso.size_guard = opts.size_guard;
        if (opts.strict_indegree) iso.match_indegree_in = &cur;

        bool merged = false;
        for (std::size_t i = 0; i < ids.size() && !merged; ++i) {
            for (std::size_t j = i + 1; j < ids.size() && !merged; ++j) {
                VertexId u = ids[i], v = ids[j];
                if (depths.at(u) != depths.at(v)) continue;
                if (cur.label(u) != cur.label(v)) continue;
                if (!rooted_isomorphic(cone_of(u), cone_of(v), iso)) continue;
                cur = merge_vertices(cur, {{u, v}});
                merged = true;
            }
        }
        if (!merged) return cur;
    }
}

}  // namespace dfgfp
