#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "dfgfp/graph.hpp"

namespace dfgfp {

// A backward random walk starts at a uniformly random vertex and repeatedly
// moves to a uniformly random in-neighbor until it reaches a vertex with no
// incoming edge. With edges running consumer -> operand this drifts from
// operands toward final consumers. The per-vertex visit probability obeys
//
//   P(v) = 1/|V| + sum over children c of v of P(c) / in_degree(c)
//
// evaluated children before parents; visit counts over N independent walks
// are Binomial(N, P(v)).

// Exact P for every vertex. Throws GraphError on cycles or empty graphs.
std::map<VertexId, double> exact_visit_probability(const DataFlowGraph& g);

struct VisitStats {
    std::uint64_t walks = 0;
    std::map<VertexId, std::uint64_t> visits;
    std::map<VertexId, double> frequency;  // visits / walks
};

// N seeded walks; each walk draws from its own substream of the seed, so the
// result does not depend on evaluation order. Every vertex is counted at
// most once per walk.
VisitStats monte_carlo_visits(const DataFlowGraph& g, std::uint64_t walks,
                              std::uint64_t seed);

// Flat-kernel one dimensional mean shift. Each value ascends to its window
// mean until the move falls under 1e-9 (or 500 iterations); modes closer
// than bandwidth/2 share a cluster; values further apart than 2*bandwidth
// never do. Returns one cluster id per input value, ids numbered in
// ascending cluster-value order.
std::vector<int> cluster_1d(const std::vector<double>& values,
                            double bandwidth);

struct SimplifyParams {
    // 0 means max(10000, 100 * |V|).
    std::uint64_t walks = 0;
    // Unset selects per-depth automatic bandwidth: with sampled frequencies
    // 3 * max sqrt(f(1-f)/N) over the depth's vertices, floored at 1/N; with
    // exact probabilities an equality tolerance of 1e-12.
    std::optional<double> bandwidth;
    bool use_exact_p = false;
    std::uint64_t seed = 0;
    // Repeat whole passes until no merge happens. Off by default: one pass,
    // probabilities and depths computed once at its start.
    bool fixpoint = false;
};

// Collapses repeated structure: per depth level, clusters visit
// probabilities and merges same-label vertices that land in one cluster.
// Surviving vertex ids are the smallest ids of their merge groups.
DataFlowGraph approx_simplify(const DataFlowGraph& g,
                              const SimplifyParams& params = {});

struct ExactSimplifyOptions {
    std::size_t size_guard = 200;
    // Additionally require merged pairs to match in-degrees in the ambient
    // graph, mirroring the sufficient condition for equal visit
    // probabilities.
    bool strict_indegree = false;
};

// Reference simplifier: repeatedly merges the smallest same-depth vertex
// pair whose maximal rooted subgraphs are isomorphic, recomputing depths
// after every merge, until no pair is left. Deterministic and quadratic;
// intended for oracles and small graphs (guarded by size_guard).
DataFlowGraph exact_simplify(const DataFlowGraph& g,
                             const ExactSimplifyOptions& opts = {});

}  // namespace dfgfp
