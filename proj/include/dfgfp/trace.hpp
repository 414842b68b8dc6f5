#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <vector>

#include "dfgfp/graph.hpp"

namespace dfgfp {

struct TraceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An instruction execution whose operand origins were already resolved by
// the tracer. Origins are event ids of earlier events.
struct ResolvedEvent {
    std::uint64_t id = 0;
    Label opcode;
    std::vector<std::uint64_t> origins;
};

enum class SlotKind { Local, Global };
enum class SlotAccess { Read, Write };

struct SlotEffect {
    SlotKind kind = SlotKind::Local;
    std::uint32_t index = 0;
    SlotAccess access = SlotAccess::Read;
};

// One stack-machine instruction execution, before origin resolution. Event
// ids are implicit stream positions (0-based).
struct RawStackEvent {
    Label opcode;
    std::uint32_t pops = 0;
    std::uint32_t pushes = 0;
    std::optional<SlotEffect> slot;
};

struct IngestConfig {
    std::set<Label> instrumented = {"and", "xor", "shr"};
    // Ingestion stops entirely once this many distinct edges are recorded.
    std::size_t max_edges = 2002;
};

// Graph construction from resolved events: one vertex per instrumented
// event, plus one vertex per distinct origin it references. Origin vertices
// keep the origin event's opcode when that event appears in the stream and
// are labeled "other" otherwise. Duplicate (consumer, origin) pairs collapse.
DataFlowGraph ingest_resolved(const std::vector<ResolvedEvent>& events,
                              const IngestConfig& cfg = {});

// Origin resolution by shadow stack: the stack mirrors the value stack but
// holds producing event ids. Writes to a local or global slot open a fresh
// generation holding the stored value's origin; reads push the current
// generation's origin. A read of a never-written slot yields a fresh
// "other"-labeled origin vertex (ids counted up from 1<<62 in first-read
// order), not an error. Stack underflow reports the offending event index.
DataFlowGraph ingest_raw(const std::vector<RawStackEvent>& events,
                         const IngestConfig& cfg = {});

// Trace container format, one of
//   #dfgtrace v1 resolved dir=consumer-to-operand
//   EVENT <id> <opcode> [<origin id>...]
// or
//   #dfgtrace v1 raw
//   OP <opcode> pops=<k> pushes=<k> [local|global <idx> read|write]
enum class TraceKind { Resolved, Raw };

TraceKind detect_trace_kind(const std::filesystem::path& path);
std::vector<ResolvedEvent> read_resolved_trace(
    const std::filesystem::path& path);
std::vector<RawStackEvent> read_raw_trace(const std::filesystem::path& path);
void write_resolved_trace(const std::filesystem::path& path,
                          const std::vector<ResolvedEvent>& events);
void write_raw_trace(const std::filesystem::path& path,
                     const std::vector<RawStackEvent>& events);

}  // namespace dfgfp
