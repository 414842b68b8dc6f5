#pragma once

#include <cstdint>

#include "dfgfp/graph.hpp"
#include "dfgfp/rng.hpp"

namespace dfgfp {

struct Fragment {
    DataFlowGraph graph;
    // Edges actually collected; less than requested only when no weakly
    // connected component of the source graph has enough edges.
    int effective_edges = 0;
};

// Draws a weakly connected random fragment by edge growth: a uniformly
// random seed edge, then repeatedly a uniformly random not-yet-chosen edge
// incident (ignoring direction) to the fragment's vertex set. A stuck growth
// restarts from a fresh seed edge, up to max_restarts times; if every
// attempt sticks, the largest fragment reached is returned.
Fragment sample_fragment(const DataFlowGraph& h, int edges, Rng& rng,
                         int max_restarts = 50);

// Exact subgraph test: an injective map of frag into g preserving labels and
// edge direction. Non-induced, so extra edges of g among the mapped vertices
// are fine. Throws GraphError on an empty fragment.
bool is_subgraph(const DataFlowGraph& frag, const DataFlowGraph& g);

struct FisParams {
    int fragment_edges = 5;  // n
    int trials = 500;        // k
    std::uint64_t seed = 0;
    int max_restarts = 50;
};

struct FisScore {
    double value = 0.0;
    int hits = 0;
    int trials = 0;
    // Smallest fragment size any trial had to fall back to; equals the
    // requested size when growth never sticks.
    int effective_n = 0;
};

// Fraction of random fragments of h that embed in g. Asymmetric by design:
// h supplies structure, g is searched. Trials draw from per-trial seed
// substreams, so for a fixed (h, seed) the fragment sequence is the same
// whatever g is.
FisScore nfis(const DataFlowGraph& h, const DataFlowGraph& g,
              const FisParams& params = {});

}  // namespace dfgfp
