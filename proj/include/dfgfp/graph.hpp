#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dfgfp {

using VertexId = std::uint64_t;
using Label = std::string;

struct GraphError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Labeled DAG of instruction executions. An edge runs from a consuming
// execution to each of its operand origins, so the set reachable from a
// vertex is that vertex's operand-provenance cone and vertices without
// incoming edges are final (never consumed) results.
//
// The builder accepts self-loops and cycles so that validate() can report
// them; every operation below that states acyclicity as a precondition
// detects violations and throws. Instances are safe to share across threads
// once construction is done; nothing mutates through const access.
class DataFlowGraph {
public:
    void add_vertex(VertexId id, Label label);

    // Endpoints must be declared. Duplicate edges collapse silently; the
    // edge set never holds multi-edges.
    void add_edge(VertexId src, VertexId dst);

    bool has_vertex(VertexId id) const { return labels_.count(id) != 0; }
    bool has_edge(VertexId src, VertexId dst) const {
        return edges_.count({src, dst}) != 0;
    }
    const Label& label(VertexId id) const;

    std::size_t vertex_count() const { return labels_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const std::map<VertexId, Label>& labels() const { return labels_; }
    const std::set<std::pair<VertexId, VertexId>>& edges() const {
        return edges_;
    }

    // Out-neighbors (operand origins), ascending by id.
    const std::vector<VertexId>& children(VertexId id) const;
    // In-neighbors (consumers), ascending by id.
    const std::vector<VertexId>& parents(VertexId id) const;

    std::size_t in_degree(VertexId id) const { return parents(id).size(); }
    std::size_t out_degree(VertexId id) const { return children(id).size(); }

    std::vector<VertexId> vertex_ids() const;

    bool operator==(const DataFlowGraph& other) const {
        return labels_ == other.labels_ && edges_ == other.edges_;
    }

private:
    std::map<VertexId, Label> labels_;
    std::set<std::pair<VertexId, VertexId>> edges_;
    std::map<VertexId, std::vector<VertexId>> children_;
    std::map<VertexId, std::vector<VertexId>> parents_;
};

// depth(v) = number of edges on the longest path ending in v. Consequently
// depth(v) == 0 iff v has no incoming edge, and every edge (u, v) satisfies
// depth(v) >= depth(u) + 1. Throws GraphError naming a back edge on cycles.
using DepthMap = std::map<VertexId, std::size_t>;
DepthMap compute_depths(const DataFlowGraph& g);
std::size_t max_depth(const DepthMap& depths);

struct RootedSubgraph {
    VertexId root = 0;
    DataFlowGraph graph;  // induced on the set reachable from root
};

RootedSubgraph maximal_rooted_subgraph(const DataFlowGraph& g, VertexId v);

struct IsoOptions {
    // When set, matched vertex pairs must agree on in-degree counted in this
    // ambient graph, not just inside the compared subgraphs.
    const DataFlowGraph* match_indegree_in = nullptr;
    std::size_t size_guard = 200;
};

// Exact label-preserving isomorphism between two rooted subgraphs that maps
// root to root. Throws GraphError when either side exceeds the size guard.
bool rooted_isomorphic(const RootedSubgraph& a, const RootedSubgraph& b,
                       const IsoOptions& opts = {});

// Collapses each group to its smallest-id member, rewires edges and drops
// duplicates. Groups must be disjoint, non-empty, single-label and free of
// intra-group edges; the result is checked to still be acyclic.
DataFlowGraph merge_vertices(const DataFlowGraph& g,
                             const std::vector<std::vector<VertexId>>& groups);

// Structural audit; returns human-readable violations instead of throwing.
std::vector<std::string> validate(const DataFlowGraph& g);

}  // namespace dfgfp
