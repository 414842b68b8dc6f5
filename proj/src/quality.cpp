#include "dfgfp/quality.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dfgfp/simplify.hpp"

namespace dfgfp {

namespace {

const Label kUniformLabel = "op";

std::vector<VertexId> subset_from_mask(const std::vector<VertexId>& pool,
                                       std::size_t mask) {
    std::vector<VertexId> out;
    for (std::size_t bit = 0; bit < pool.size(); ++bit) {
        if (mask & (std::size_t(1) << bit)) out.push_back(pool[bit]);
    }
    return out;
}

// One uniformly random size-s subset of pool, as a sorted id list.
std::vector<VertexId> draw_sized_subset(const std::vector<VertexId>& pool,
                                        std::size_t s, Rng& rng) {
    std::vector<VertexId> picks(pool);
    for (std::size_t i = 0; i < s; ++i) {
        std::swap(picks[i], picks[i + rng.bounded(picks.size() - i)]);
    }
    picks.resize(s);
    std::sort(picks.begin(), picks.end());
    return picks;
}

// n children sets for one layer: sizes uniform in [min_c, max_c] clamped to
// the pool, sets uniformly random at their size, distinct within the layer.
// Sets may recur across layers; that repetition is what the study's
// isomorphism count feeds on. Gives up early, returning fewer sets, if
// rejection keeps hitting duplicates.
std::vector<std::vector<VertexId>> draw_distinct_subsets(
    const std::vector<VertexId>& pool, std::size_t n, std::size_t min_c,
    std::size_t max_c, Rng& rng) {
    std::set<std::vector<VertexId>> used;
    std::vector<std::vector<VertexId>> out;
    std::size_t attempts = 0;
    const std::size_t max_attempts = 64 * (n + 1);
    const std::size_t lo = std::min(min_c, pool.size());
    const std::size_t hi = std::min(max_c, pool.size());
    while (out.size() < n && attempts++ < max_attempts) {
        const std::size_t s = lo + rng.bounded(hi - lo + 1);
        std::vector<VertexId> subset = draw_sized_subset(pool, s, rng);
        if (used.insert(subset).second) out.push_back(std::move(subset));
    }
    return out;
}

}  // namespace

LayeredGraph build_gn(int n) {
    if (n < 0) throw std::invalid_argument("layer count must be >= 0");
    if (n > 3) {
        throw std::invalid_argument(
            "cannot materialize more than 3 layers beyond layer 0; the next "
            "layer has 2^2059 vertices");
    }
    LayeredGraph out;
    VertexId next_id = 0;
    std::vector<VertexId> pool;

    out.graph.add_vertex(next_id, kUniformLabel);
    out.layers.push_back({next_id});
    out.by_children.push_back({{{}, next_id}});
    pool.push_back(next_id);
    ++next_id;

    for (int layer = 1; layer <= n; ++layer) {
        std::vector<VertexId> members;
        std::map<std::vector<VertexId>, VertexId> index;
        const std::size_t count = std::size_t(1) << pool.size();
        for (std::size_t mask = 0; mask < count; ++mask) {
            std::vector<VertexId> children = subset_from_mask(pool, mask);
            out.graph.add_vertex(next_id, kUniformLabel);
            for (VertexId c : children) out.graph.add_edge(next_id, c);
            members.push_back(next_id);
            index.emplace(std::move(children), next_id);
            ++next_id;
        }
        out.layers.push_back(members);
        out.by_children.push_back(std::move(index));
        pool.insert(pool.end(), members.begin(), members.end());
    }
    return out;
}

DataFlowGraph sample_layered(Rng& rng, const SampleShape& shape,
                             std::vector<std::vector<VertexId>>* layers_out) {
    if (shape.layers < 0 ||
        std::size_t(shape.layers) > shape.layer_caps.size()) {
        throw std::invalid_argument("sampler layer count out of range");
    }
    if (shape.max_vertices < 1) {
        throw std::invalid_argument("sampler needs room for layer 0");
    }
    if (shape.max_children < shape.min_children || shape.max_children < 1) {
        throw std::invalid_argument("bad children-set size bounds");
    }
    DataFlowGraph g;
    std::vector<std::vector<VertexId>> layers;
    std::vector<VertexId> pool;
    VertexId next_id = 0;

    g.add_vertex(next_id, kUniformLabel);
    layers.push_back({next_id});
    pool.push_back(next_id);
    ++next_id;

    for (int layer = 1; layer <= shape.layers; ++layer) {
        const std::size_t budget = shape.max_vertices - pool.size();
        if (budget == 0) break;
        std::size_t want =
            1 + rng.bounded(shape.layer_caps[std::size_t(layer - 1)]);
        want = std::min(want, budget);
        std::vector<std::vector<VertexId>> sets =
            draw_distinct_subsets(pool, want, shape.min_children,
                                  shape.max_children, rng);
        std::vector<VertexId> members;
        for (const auto& children : sets) {
            g.add_vertex(next_id, kUniformLabel);
            for (VertexId c : children) g.add_edge(next_id, c);
            members.push_back(next_id);
            ++next_id;
        }
        layers.push_back(members);
        pool.insert(pool.end(), members.begin(), members.end());
    }
    if (layers_out) *layers_out = std::move(layers);
    return g;
}

DataFlowGraph sample_bounded_subgraph(Rng& rng) {
    return sample_layered(rng, SampleShape{});
}

bool is_approx_fixed_point(const DataFlowGraph& h) {
    SimplifyParams params;
    params.use_exact_p = true;
    DataFlowGraph simplified = approx_simplify(h, params);
    return simplified.vertex_count() == h.vertex_count();
}

std::size_t count_rooted_iso_pairs(const DataFlowGraph& h) {
    if (h.vertex_count() == 0) return 0;
    std::vector<VertexId> ids = h.vertex_ids();
    std::vector<RootedSubgraph> cones;
    cones.reserve(ids.size());
    for (VertexId v : ids) cones.push_back(maximal_rooted_subgraph(h, v));

    std::size_t pairs = 0;
    for (std::size_t i = 0; i < cones.size(); ++i) {
        for (std::size_t j = i + 1; j < cones.size(); ++j) {
            if (cones[i].graph.vertex_count() !=
                    cones[j].graph.vertex_count() ||
                cones[i].graph.edge_count() != cones[j].graph.edge_count()) {
                continue;
            }
            if (rooted_isomorphic(cones[i], cones[j])) ++pairs;
        }
    }
    return pairs;
}

QualityReport run_quality_study(std::size_t samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    const SampleShape shape;
    std::size_t fixed = 0;
    std::size_t refixed = 0;
    unsigned long long pair_total = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        Rng rng(derive_seed(seed, "quality-sample", s));
        DataFlowGraph h = sample_layered(rng, shape);
        if (is_approx_fixed_point(h)) ++fixed;
        pair_total += count_rooted_iso_pairs(h);

        SimplifyParams params;
        params.use_exact_p = true;
        DataFlowGraph hs = approx_simplify(h, params);
        if (is_approx_fixed_point(hs)) ++refixed;
    }
    QualityReport report;
    report.samples = samples;
    report.fixed_point_fraction = double(fixed) / double(samples);
    report.mean_iso_pairs = double(pair_total) / double(samples);
    report.resimplified_fixed_point_fraction =
        double(refixed) / double(samples);
    report.seed = seed;
    std::ostringstream os;
    os << "layers=" << shape.layers << " max_vertices=" << shape.max_vertices
       << " caps=";
    for (std::size_t i = 0; i < std::size_t(shape.layers); ++i) {
        if (i) os << ',';
        os << shape.layer_caps[i];
    }
    os << " children=" << shape.min_children << ".." << shape.max_children
       << " subsets=sized-uniform-distinct label=" << kUniformLabel;
    report.sampler = os.str();
    return report;
}

}  // namespace dfgfp
