#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dfgfp/trace.hpp"

namespace dfgfp {

// Workload families. Miner kinds emit R structurally identical mixing
// rounds that read a shared header value, so their data-flow graphs are R
// isomorphic provenance cones joined at the header origin; benign kinds
// have sparse or irregular instrumented flow.
enum class WorkloadKind {
    MinerSha2Like,
    MinerMixRounds,
    BenignConvolution,
    BenignChecksum,
    BenignRandom,
};

struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::MinerMixRounds;
    int rounds = 1;
    std::uint64_t seed = 0;
    // Approximate fraction of trace events that belong to spurious
    // instrumented islands (const, const, op, drop). 0 disables noise.
    double noise_rate = 0.0;
};

struct SynthTrace {
    std::vector<RawStackEvent> events;
    // The data-flow graph implied by the construction plan, with vertex ids
    // equal to event stream positions. Computed from the plan, not by
    // re-simulating the stack, so it can serve as an oracle for ingest_raw.
    // Ignores ingestion edge caps.
    DataFlowGraph ground_truth;
};

SynthTrace gen_trace(const WorkloadSpec& spec);

enum class ObfuscationStrategy {
    // xor a b  ->  (a or b) and not(a and b), spelled in stack ops.
    Substitute,
    // Pass-through masking: pushed values get an extra "and" with an
    // all-ones constant with probability rate.
    Split,
    // Spurious instrumented islands inserted at statement boundaries with
    // probability rate; their results are never consumed.
    FlattenNoise,
    // Dependency-respecting random reorder of whole statements. Preserves
    // the ingested graph up to event renumbering.
    Interleave,
};

struct ObfuscationSpec {
    ObfuscationStrategy strategy = ObfuscationStrategy::Interleave;
    std::uint64_t seed = 0;
    double rate = 0.1;  // used by Split and FlattenNoise
};

// Transforms a raw trace. When event_map is non-null it receives, for every
// input event index, the index the event ends up at in the output (for a
// substituted event: the index of the replacement's result producer).
std::vector<RawStackEvent> obfuscate_trace(
    const std::vector<RawStackEvent>& trace, const ObfuscationSpec& spec,
    std::vector<std::size_t>* event_map = nullptr);

const char* to_string(WorkloadKind kind);
const char* to_string(ObfuscationStrategy strategy);
WorkloadKind parse_workload_kind(const std::string& name);
ObfuscationStrategy parse_obfuscation_strategy(const std::string& name);

}  // namespace dfgfp
