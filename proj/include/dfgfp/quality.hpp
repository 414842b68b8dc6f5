#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dfgfp/graph.hpp"
#include "dfgfp/rng.hpp"

namespace dfgfp {

// Layered graph family used to study how well frequency-based merging
// approximates exact cone-isomorphism merging. Layer i holds one vertex
// per distinct children set drawn from the union of all lower layers;
// edges run from a vertex to each of its children.
struct LayeredGraph {
    DataFlowGraph graph;
    // layers[i] lists the vertex ids materialized in layer i.
    std::vector<std::vector<VertexId>> layers;
    // by_children[i] maps a sorted children-id set to the layer-i vertex
    // that owns it. Layer membership is tracked here explicitly; it is not
    // recoverable from depth because middle layers may contain vertices
    // with empty children sets.
    std::vector<std::map<std::vector<VertexId>, VertexId>> by_children;
};

// Materializes the full construction for n layers beyond layer 0: layer i
// contains one vertex per subset (including the empty one) of the union of
// lower layers, so layer sizes follow |S_i| = 2^(|S_0|+...+|S_{i-1}|).
// For n = 3 the sizes are [1, 2, 8, 2048]. Throws std::invalid_argument
// for n > 3; the next layer would have 2^2059 vertices.
LayeredGraph build_gn(int n);

// Shape of the random bounded-subgraph sampler. Layer sizes are drawn
// uniformly from [1, cap_i], clamped so the total stays within
// max_vertices and within the number of distinct subsets available.
// Each vertex gets a children set drawn as a uniformly random subset of
// the union of lower layers with size uniform in [min_children,
// max_children]; sets are distinct within a layer but may recur across
// layers. Nonempty sets keep layer 0 the only childless vertex. All
// vertices share one label. The size bounds and caps are calibration
// parameters, reported with every study.
struct SampleShape {
    int layers = 4;
    std::size_t max_vertices = 80;
    std::array<std::size_t, 4> layer_caps = {2, 4, 8, 40};
    std::size_t min_children = 2;
    std::size_t max_children = 2;
};

// Samples one layered graph. If layers_out is non-null it receives the
// per-layer vertex ids (same convention as LayeredGraph::layers).
DataFlowGraph sample_layered(Rng& rng, const SampleShape& shape,
                             std::vector<std::vector<VertexId>>* layers_out =
                                 nullptr);

// The study's pinned sampler: depth-4 graphs with at most 80 vertices.
DataFlowGraph sample_bounded_subgraph(Rng& rng);

// True iff one exact-probability simplify pass with equality clustering
// merges nothing, i.e. the graph is already a fixed point of the
// approximate algorithm when fed exact probabilities.
bool is_approx_fixed_point(const DataFlowGraph& h);

// Number of unordered vertex pairs whose maximal rooted subgraphs are
// isomorphic, at any depth. Counts pairs regardless of visit
// probabilities or in-degrees, so it measures repeated provenance
// structure whether or not simplification may touch it.
std::size_t count_rooted_iso_pairs(const DataFlowGraph& h);

struct QualityReport {
    std::size_t samples = 0;
    double fixed_point_fraction = 0.0;
    double mean_iso_pairs = 0.0;
    // Fraction of samples that are fixed points after one more
    // exact-probability simplify pass. Recorded for reference only.
    double resimplified_fixed_point_fraction = 0.0;
    std::uint64_t seed = 0;
    std::string sampler;
};

// Draws `samples` bounded subgraphs with per-sample derived seeds and
// aggregates the two study metrics. Deterministic per seed.
QualityReport run_quality_study(std::size_t samples, std::uint64_t seed);

}  // namespace dfgfp
