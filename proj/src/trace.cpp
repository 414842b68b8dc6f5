#include "dfgfp/trace.hpp"

#include <fstream>
#include <sstream>

namespace dfgfp {

namespace {

constexpr VertexId kSyntheticBase = 1ull << 62;

const char* kResolvedHeader = "#dfgtrace v1 resolved dir=consumer-to-operand";
const char* kRawHeader = "#dfgtrace v1 raw";

[[noreturn]] void malformed(std::size_t line_no, const std::string& why) {
    std::ostringstream os;
    os << "trace line " << line_no << ": " << why;
    throw TraceError(os.str());
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw TraceError("cannot open trace file " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

void check_header(const std::string& line) {
    if (line == kResolvedHeader || line == kRawHeader) return;
    if (line.rfind("#dfgtrace v1 resolved", 0) == 0) {
        throw TraceError("trace records a different edge direction: " + line);
    }
    if (line.rfind("#dfgtrace ", 0) == 0) {
        throw TraceError("unsupported trace format version: " + line);
    }
    throw TraceError("not a trace file (bad header): " + line);
}

}  // namespace

DataFlowGraph ingest_resolved(const std::vector<ResolvedEvent>& events,
                              const IngestConfig& cfg) {
    DataFlowGraph g;
    std::map<std::uint64_t, Label> seen;
    bool first = true;
    std::uint64_t prev = 0;
    for (const ResolvedEvent& ev : events) {
        if (g.edge_count() >= cfg.max_edges) break;
        if (!first && ev.id <= prev) {
            throw TraceError("event ids not strictly increasing at event " +
                             std::to_string(ev.id));
        }
        first = false;
        prev = ev.id;
        seen.emplace(ev.id, ev.opcode);
        if (!cfg.instrumented.count(ev.opcode)) continue;
        g.add_vertex(ev.id, ev.opcode);
        for (std::uint64_t origin : ev.origins) {
            if (origin >= ev.id) {
                std::ostringstream os;
                os << "origin id " << origin << " not before consumer "
                   << ev.id;
                throw TraceError(os.str());
            }
            if (g.has_edge(ev.id, origin)) continue;
            if (g.edge_count() >= cfg.max_edges) return g;
            auto it = seen.find(origin);
            g.add_vertex(origin, it == seen.end() ? Label("other")
                                                  : it->second);
            g.add_edge(ev.id, origin);
        }
    }
    return g;
}

DataFlowGraph ingest_raw(const std::vector<RawStackEvent>& events,
                         const IngestConfig& cfg) {
    DataFlowGraph g;
    std::vector<VertexId> stack;
    std::map<std::pair<int, std::uint32_t>, VertexId> slots;
    std::map<std::pair<int, std::uint32_t>, VertexId> unwritten;
    VertexId next_synthetic = kSyntheticBase;

    auto origin_label = [&](VertexId origin) -> Label {
        if (origin >= kSyntheticBase) return "other";
        return events[origin].opcode;
    };

    for (std::size_t idx = 0; idx < events.size(); ++idx) {
        if (g.edge_count() >= cfg.max_edges) break;
        const RawStackEvent& ev = events[idx];
        if (stack.size() < ev.pops) {
            throw TraceError("stack underflow at event " +
                             std::to_string(idx));
        }
        std::vector<VertexId> popped;  // top of stack first
        for (std::uint32_t i = 0; i < ev.pops; ++i) {
            popped.push_back(stack.back());
            stack.pop_back();
        }

        if (cfg.instrumented.count(ev.opcode)) {
            g.add_vertex(idx, ev.opcode);
            for (VertexId origin : popped) {
                if (g.has_edge(idx, origin)) continue;
                if (g.edge_count() >= cfg.max_edges) return g;
                g.add_vertex(origin, origin_label(origin));
                g.add_edge(idx, origin);
            }
        }

        if (ev.slot && ev.slot->access == SlotAccess::Write) {
            if (popped.empty()) {
                throw TraceError("slot write without a popped value at event " +
                                 std::to_string(idx));
            }
            std::pair<int, std::uint32_t> key{int(ev.slot->kind),
                                              ev.slot->index};
            slots[key] = popped.front();
        }

        VertexId produced = idx;
        if (ev.slot && ev.slot->access == SlotAccess::Read) {
            std::pair<int, std::uint32_t> key{int(ev.slot->kind),
                                              ev.slot->index};
            auto it = slots.find(key);
            if (it != slots.end()) {
                produced = it->second;
            } else {
                auto [uit, fresh] = unwritten.emplace(key, next_synthetic);
                if (fresh) ++next_synthetic;
                produced = uit->second;
            }
        }
        for (std::uint32_t i = 0; i < ev.pushes; ++i) stack.push_back(produced);
    }
    return g;
}

TraceKind detect_trace_kind(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw TraceError("cannot open trace file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw TraceError("empty trace file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    check_header(line);
    return line == kRawHeader ? TraceKind::Raw : TraceKind::Resolved;
}

std::vector<ResolvedEvent> read_resolved_trace(
    const std::filesystem::path& path) {
    auto lines = read_lines(path);
    if (lines.empty()) throw TraceError("empty trace file");
    check_header(lines[0]);
    if (lines[0] != kResolvedHeader) {
        throw TraceError("expected a resolved trace, found: " + lines[0]);
    }
    std::vector<ResolvedEvent> events;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::istringstream is(lines[i]);
        std::string tag;
        is >> tag;
        if (tag != "EVENT") malformed(i + 1, "expected EVENT record");
        ResolvedEvent ev;
        if (!(is >> ev.id >> ev.opcode)) {
            malformed(i + 1, "expected '<id> <opcode>'");
        }
        std::uint64_t origin;
        while (is >> origin) ev.origins.push_back(origin);
        if (!is.eof()) malformed(i + 1, "trailing garbage");
        events.push_back(std::move(ev));
    }
    return events;
}

std::vector<RawStackEvent> read_raw_trace(const std::filesystem::path& path) {
    auto lines = read_lines(path);
    if (lines.empty()) throw TraceError("empty trace file");
    check_header(lines[0]);
    if (lines[0] != kRawHeader) {
        throw TraceError("expected a raw trace, found: " + lines[0]);
    }
    std::vector<RawStackEvent> events;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::istringstream is(lines[i]);
        std::string tag, pops, pushes;
        is >> tag;
        if (tag != "OP") malformed(i + 1, "expected OP record");
        RawStackEvent ev;
        if (!(is >> ev.opcode >> pops >> pushes)) {
            malformed(i + 1, "expected '<opcode> pops=<k> pushes=<k>'");
        }
        if (pops.rfind("pops=", 0) != 0 || pushes.rfind("pushes=", 0) != 0) {
            malformed(i + 1, "expected pops=/pushes= fields");
        }
        try {
            ev.pops = std::uint32_t(std::stoul(pops.substr(5)));
            ev.pushes = std::uint32_t(std::stoul(pushes.substr(7)));
        } catch (const std::exception&) {
            malformed(i + 1, "bad pops/pushes count");
        }
        std::string kind;
        if (is >> kind) {
            SlotEffect slot;
            if (kind == "local") {
                slot.kind = SlotKind::Local;
            } else if (kind == "global") {
                slot.kind = SlotKind::Global;
            } else {
                malformed(i + 1, "slot kind must be local or global");
            }
            std::string access;
            if (!(is >> slot.index >> access)) {
                malformed(i + 1, "expected '<idx> read|write'");
            }
            if (access == "read") {
                slot.access = SlotAccess::Read;
            } else if (access == "write") {
                slot.access = SlotAccess::Write;
            } else {
                malformed(i + 1, "slot access must be read or write");
            }
            ev.slot = slot;
        }
        events.push_back(std::move(ev));
    }
    return events;
}

void write_resolved_trace(const std::filesystem::path& path,
                          const std::vector<ResolvedEvent>& events) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw TraceError("cannot write trace file " + path.string());
    out << kResolvedHeader << "\n";
    for (const ResolvedEvent& ev : events) {
        out << "EVENT " << ev.id << " " << ev.opcode;
        for (std::uint64_t origin : ev.origins) out << " " << origin;
        out << "\n";
    }
}

void write_raw_trace(const std::filesystem::path& path,
                     const std::vector<RawStackEvent>& events) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw TraceError("cannot write trace file " + path.string());
    out << kRawHeader << "\n";
    for (const RawStackEvent& ev : events) {
        out << "OP " << ev.opcode << " pops=" << ev.pops
            << " pushes=" << ev.pushes;
        if (ev.slot) {
            out << " " << (ev.slot->kind == SlotKind::Local ? "local"
                                                            : "global")
                << " " << ev.slot->index << " "
                << (ev.slot->access == SlotAccess::Read ? "read" : "write");
        }
        out << "\n";
    }
}

}  // namespace dfgfp
