#include "dfgfp/graph.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <queue>
#include <sstream>

namespace dfgfp {

namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t combine(std::uint64_t h, std::uint64_t v) {
    return mix(h ^ (v + 0x165667b19e3779f9ull + (h << 6) + (h >> 2)));
}

// One edge that closes a cycle, if any. Iterative coloring DFS in id order.
std::optional<std::pair<VertexId, VertexId>> find_back_edge(
    const DataFlowGraph& g, bool ignore_self_loops = false) {
    enum class Mark { White, Gray, Black };
    std::map<VertexId, Mark> mark;
    for (const auto& [id, label] : g.labels()) {
        (void)label;
        mark[id] = Mark::White;
    }
    for (const auto& [start, label] : g.labels()) {
        (void)label;
        if (mark[start] != Mark::White) continue;
        // stack of (vertex, next child index)
        std::vector<std::pair<VertexId, std::size_t>> stack;
        stack.push_back({start, 0});
        mark[start] = Mark::Gray;
        while (!stack.empty()) {
            auto& [v, idx] = stack.back();
            const auto& kids = g.children(v);
            if (idx < kids.size()) {
                VertexId c = kids[idx++];
                if (c == v && ignore_self_loops) continue;
                if (mark[c] == Mark::Gray) return std::make_pair(v, c);
                if (mark[c] == Mark::White) {
                    mark[c] = Mark::Gray;
                    stack.push_back({c, 0});
                }
            } else {
                mark[v] = Mark::Black;
                stack.pop_back();
            }
        }
    }
    return std::nullopt;
}

}  // namespace

void DataFlowGraph::add_vertex(VertexId id, Label label) {
    auto it = labels_.find(id);
    if (it != labels_.end()) {
        if (it->second != label) {
            std::ostringstream os;
            os << "vertex " << id << " redeclared with label '" << label
               << "' (was '" << it->second << "')";
            throw GraphError(os.str());
        }
        return;
    }
    labels_.emplace(id, std::move(label));
    children_.emplace(id, std::vector<VertexId>{});
    parents_.emplace(id, std::vector<VertexId>{});
}

void DataFlowGraph::add_edge(VertexId src, VertexId dst) {
    if (!has_vertex(src) || !has_vertex(dst)) {
        std::ostringstream os;
        os << "edge " << src << " -> " << dst << " references unknown vertex";
        throw GraphError(os.str());
    }
    if (!edges_.insert({src, dst}).second) return;
    auto& kids = children_[src];
    kids.insert(std::lower_bound(kids.begin(), kids.end(), dst), dst);
    auto& pars = parents_[dst];
    pars.insert(std::lower_bound(pars.begin(), pars.end(), src), src);
}

const Label& DataFlowGraph::label(VertexId id) const {
    auto it = labels_.find(id);
    if (it == labels_.end()) {
        throw GraphError("unknown vertex " + std::to_string(id));
    }
    return it->second;
}

const std::vector<VertexId>& DataFlowGraph::children(VertexId id) const {
    auto it = children_.find(id);
    if (it == children_.end()) {
        throw GraphError("unknown vertex " + std::to_string(id));
    }
    return it->second;
}

const std::vector<VertexId>& DataFlowGraph::parents(VertexId id) const {
    auto it = parents_.find(id);
    if (it == parents_.end()) {
        throw GraphError("unknown vertex " + std::to_string(id));
    }
    return it->second;
}

std::vector<VertexId> DataFlowGraph::vertex_ids() const {
    std::vector<VertexId> ids;
    ids.reserve(labels_.size());
    for (const auto& [id, label] : labels_) {
        (void)label;
        ids.push_back(id);
    }
    return ids;
}

DepthMap compute_depths(const DataFlowGraph& g) {
    DepthMap depth;
    std::map<VertexId, std::size_t> pending;
    std::vector<VertexId> ready;
    for (const auto& [id, label] : g.labels()) {
        (void)label;
        std::size_t d = g.in_degree(id);
        pending[id] = d;
        if (d == 0) {
            depth[id] = 0;
            ready.push_back(id);
        }
    }
    std::size_t processed = 0;
    while (!ready.empty()) {
        VertexId u = ready.back();
        ready.pop_back();
        ++processed;
        for (VertexId v : g.children(u)) {
            auto it = depth.find(v);
            std::size_t cand = depth[u] + 1;
            if (it == depth.end() || it->second < cand) depth[v] = cand;
            if (--pending[v] == 0) ready.push_back(v);
        }
    }
    if (processed != g.vertex_count()) {
        auto back = find_back_edge(g);
        std::ostringstream os;
        os << "cycle detected";
        if (back) os << " through edge " << back->first << " -> " << back->second;
        throw GraphError(os.str());
    }
    return depth;
}

std::size_t max_depth(const DepthMap& depths) {
    std::size_t m = 0;
    for (const auto& [id, d] : depths) {
        (void)id;
        m = std::max(m, d);
    }
    return m;
}

RootedSubgraph maximal_rooted_subgraph(const DataFlowGraph& g, VertexId v) {
    if (!g.has_vertex(v)) {
        throw GraphError("unknown vertex " + std::to_string(v));
    }
    std::set<VertexId> members;
    std::vector<VertexId> stack{v};
    members.insert(v);
    while (!stack.empty()) {
        VertexId u = stack.back();
        stack.pop_back();
        for (VertexId c : g.children(u)) {
            if (members.insert(c).second) stack.push_back(c);
        }
    }
    RootedSubgraph sub;
    sub.root = v;
    for (VertexId m : members) sub.graph.add_vertex(m, g.label(m));
    // The member set is closed under out-edges, so induction needs only them.
    for (VertexId m : members) {
        for (VertexId c : g.children(m)) sub.graph.add_edge(m, c);
    }
    return sub;
}

namespace {

// Iterated neighborhood coloring; equal final colors are a necessary
// condition for two vertices to correspond under an isomorphism.
std::map<VertexId, std::uint64_t> refine_colors(const RootedSubgraph& s,
                                                const IsoOptions& opts) {
    const DataFlowGraph& g = s.graph;
    std::map<VertexId, std::uint64_t> color;
    std::hash<std::string> str_hash;
    for (const auto& [id, label] : g.labels()) {
        std::uint64_t c = combine(0x51ab1e, str_hash(label));
        c = combine(c, g.out_degree(id));
        c = combine(c, g.in_degree(id));
        if (opts.match_indegree_in) {
            c = combine(c, opts.match_indegree_in->in_degree(id));
        }
        c = combine(c, id == s.root ? 1 : 0);
        color[id] = c;
    }
    for (int round = 0; round < 3; ++round) {
        std::map<VertexId, std::uint64_t> next;
        for (const auto& [id, c] : color) {
            std::vector<std::uint64_t> kid_colors, par_colors;
            for (VertexId k : g.children(id)) kid_colors.push_back(color.at(k));
            for (VertexId p : g.parents(id)) par_colors.push_back(color.at(p));
            std::sort(kid_colors.begin(), kid_colors.end());
            std::sort(par_colors.begin(), par_colors.end());
            std::uint64_t n = combine(0xc01c, c);
            for (std::uint64_t k : kid_colors) n = combine(n, k);
            n = combine(n, 0x5e9a);
            for (std::uint64_t p : par_colors) n = combine(n, p);
            next[id] = n;
        }
        color = std::move(next);
    }
    return color;
}

struct IsoSearch {
    const DataFlowGraph& ga;
    const DataFlowGraph& gb;
    const std::map<VertexId, std::uint64_t>& color_a;
    const std::map<VertexId, std::uint64_t>& color_b;
    std::vector<VertexId> order;                    // of ga, BFS from root
    std::map<VertexId, VertexId> fwd;               // a -> b
    std::map<VertexId, VertexId> rev;               // b -> a

    bool consistent(VertexId av, VertexId bv) const {
        for (const auto& [au, bu] : fwd) {
            if (ga.has_edge(av, au) != gb.has_edge(bv, bu)) return false;
            if (ga.has_edge(au, av) != gb.has_edge(bu, bv)) return false;
        }
        return true;
    }

    bool extend(std::size_t pos) {
        if (pos == order.size()) return true;
        VertexId av = order[pos];
        std::uint64_t want = color_a.at(av);
        for (const auto& [bv, c] : color_b) {
            if (c != want || rev.count(bv)) continue;
            if (!consistent(av, bv)) continue;
            fwd[av] = bv;
            rev[bv] = av;
            if (extend(pos + 1)) return true;
            fwd.erase(av);
            rev.erase(bv);
        }
        return false;
    }
};

}  // namespace

bool rooted_isomorphic(const RootedSubgraph& a, const RootedSubgraph& b,
                       const IsoOptions& opts) {
    if (a.graph.vertex_count() > opts.size_guard ||
        b.graph.vertex_count() > opts.size_guard) {
        std::ostringstream os;
        os << "isomorphism size guard exceeded (" << a.graph.vertex_count()
           << " and " << b.graph.vertex_count() << " vertices, guard "
           << opts.size_guard << ")";
        throw GraphError(os.str());
    }
    if (a.graph.vertex_count() != b.graph.vertex_count()) return false;
    if (a.graph.edge_count() != b.graph.edge_count()) return false;
    if (a.graph.label(a.root) != b.graph.label(b.root)) return false;

    auto color_a = refine_colors(a, opts);
    auto color_b = refine_colors(b, opts);
    std::vector<std::uint64_t> ca, cb;
    for (const auto& [id, c] : color_a) {
        (void)id;
        ca.push_back(c);
    }
    for (const auto& [id, c] : color_b) {
        (void)id;
        cb.push_back(c);
    }
    std::sort(ca.begin(), ca.end());
    std::sort(cb.begin(), cb.end());
    if (ca != cb) return false;

    IsoSearch search{a.graph, b.graph, color_a, color_b, {}, {}, {}};
    std::set<VertexId> seen{a.root};
    std::queue<VertexId> q;
    q.push(a.root);
    while (!q.empty()) {
        VertexId u = q.front();
        q.pop();
        search.order.push_back(u);
        for (VertexId c : a.graph.children(u)) {
            if (seen.insert(c).second) q.push(c);
        }
    }
    return search.extend(0);
}

DataFlowGraph merge_vertices(const DataFlowGraph& g,
                             const std::vector<std::vector<VertexId>>& groups) {
    std::map<VertexId, VertexId> rep;
    for (const auto& group : groups) {
        if (group.empty()) throw GraphError("empty merge group");
        VertexId leader = *std::min_element(group.begin(), group.end());
        const Label* want = nullptr;
        for (VertexId v : group) {
            if (!g.has_vertex(v)) {
                throw GraphError("merge group references unknown vertex " +
                                 std::to_string(v));
            }
            if (rep.count(v)) {
                throw GraphError("vertex " + std::to_string(v) +
                                 " appears in more than one merge group");
            }
            if (!want) {
                want = &g.label(v);
            } else if (g.label(v) != *want) {
                throw GraphError("merge group mixes labels '" + *want +
                                 "' and '" + g.label(v) + "'");
            }
            rep[v] = leader;
        }
        for (VertexId u : group) {
            for (VertexId v : group) {
                if (g.has_edge(u, v)) {
                    std::ostringstream os;
                    os << "merge group contains internal edge " << u << " -> "
                       << v;
                    throw GraphError(os.str());
                }
            }
        }
    }

    auto resolve = [&rep](VertexId v) {
        auto it = rep.find(v);
        return it == rep.end() ? v : it->second;
    };

    DataFlowGraph out;
    for (const auto& [id, label] : g.labels()) {
        if (resolve(id) == id) out.add_vertex(id, label);
    }
    for (const auto& [src, dst] : g.edges()) {
        out.add_edge(resolve(src), resolve(dst));
    }
    if (auto back = find_back_edge(out)) {
        std::ostringstream os;
        os << "merge created cycle through edge " << back->first << " -> "
           << back->second;
        throw GraphError(os.str());
    }
    return out;
}

std::vector<std::string> validate(const DataFlowGraph& g) {
    std::vector<std::string> issues;
    for (const auto& [id, label] : g.labels()) {
        if (label.empty()) {
            issues.push_back("empty label at vertex " + std::to_string(id));
        }
    }
    for (const auto& [src, dst] : g.edges()) {
        if (!g.has_vertex(src) || !g.has_vertex(dst)) {
            std::ostringstream os;
            os << "edge " << src << " -> " << dst
               << " references undeclared vertex";
            issues.push_back(os.str());
        } else if (src == dst) {
            issues.push_back("self-loop at vertex " + std::to_string(src));
        }
    }
    // Self-loops are reported above, so the cycle walk skips them.
    if (auto back = find_back_edge(g, true)) {
        std::ostringstream os;
        os << "cycle through edge " << back->first << " -> " << back->second;
        issues.push_back(os.str());
    }
    return issues;
}

}  // namespace dfgfp
