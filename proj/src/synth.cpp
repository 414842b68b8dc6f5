#include "dfgfp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dfgfp/rng.hpp"

namespace dfgfp {

namespace {

const std::set<Label> kInstrumented = {"and", "xor", "shr"};

// Emits stack events for a value program while tracking, per value, the
// event that produced it. Ground-truth edges come from this plan-side
// knowledge; the shadow stack in ingest_raw rediscovers them independently.
class SynthBuilder {
public:
    SynthBuilder(std::uint64_t seed, double noise_rate)
        : rng_(derive_seed(seed, "synth")),
          island_p_(noise_rate <= 0.0
                        ? 0.0
                        : std::min(0.95, noise_rate / (1.0 - noise_rate))) {
        if (noise_rate < 0.0 || noise_rate >= 1.0) {
            throw std::invalid_argument("noise_rate must be in [0, 1)");
        }
    }

    struct Val {
        std::uint64_t origin = 0;  // producing event index
        std::uint32_t slot = 0;
        bool global = false;
    };

    Val make_const() {
        maybe_island();
        std::uint64_t ev = emit({"const", 0, 1, {}});
        std::uint32_t slot = next_slot_++;
        emit({"local.set", 1, 0, SlotEffect{SlotKind::Local, slot,
                                            SlotAccess::Write}});
        return {ev, slot, false};
    }

    Val make_global_const(std::uint32_t gslot) {
        maybe_island();
        std::uint64_t ev = emit({"const", 0, 1, {}});
        emit({"global.set", 1, 0, SlotEffect{SlotKind::Global, gslot,
                                             SlotAccess::Write}});
        return {ev, gslot, true};
    }

    Val binop(const Label& op, Val a, Val b) {
        return binop_into(op, a, b, next_slot_++);
    }

    // Writes the result over an existing slot; later reads of that slot see
    // the new generation.
    Val binop_into(const Label& op, Val a, Val b, std::uint32_t slot) {
        maybe_island();
        load(a);
        load(b);
        std::uint64_t ev = emit({op, 2, 1, {}});
        record_op(ev, op, {a.origin, b.origin});
        emit({"local.set", 1, 0, SlotEffect{SlotKind::Local, slot,
                                            SlotAccess::Write}});
        return {ev, slot, false};
    }

    SynthTrace take() {
        SynthTrace out;
        out.events = std::move(events_);
        out.ground_truth = std::move(gt_);
        return out;
    }

    Rng& rng() { return rng_; }

private:
    std::uint64_t emit(RawStackEvent ev) {
        events_.push_back(std::move(ev));
        return events_.size() - 1;
    }

    void load(const Val& v) {
        if (v.global) {
            emit({"global.get", 0, 1, SlotEffect{SlotKind::Global, v.slot,
                                                 SlotAccess::Read}});
        } else {
            emit({"local.get", 0, 1, SlotEffect{SlotKind::Local, v.slot,
                                                SlotAccess::Read}});
        }
    }

    void record_op(std::uint64_t ev, const Label& op,
                   std::initializer_list<std::uint64_t> origins) {
        if (!kInstrumented.count(op)) return;
        gt_.add_vertex(ev, op);
        for (std::uint64_t origin : origins) {
            gt_.add_vertex(origin, events_[origin].opcode);
            gt_.add_edge(ev, origin);
        }
    }

    void maybe_island() {
        if (island_p_ <= 0.0 || rng_.unit() >= island_p_) return;
        static const Label ops[3] = {"and", "xor", "shr"};
        std::uint64_t c1 = emit({"const", 0, 1, {}});
        std::uint64_t c2 = emit({"const", 0, 1, {}});
        const Label& op = ops[rng_.bounded(3)];
        std::uint64_t ev = emit({op, 2, 1, {}});
        record_op(ev, op, {c2, c1});
        emit({"drop", 1, 0, {}});
    }

    std::vector<RawStackEvent> events_;
    DataFlowGraph gt_;
    Rng rng_;
    double island_p_;
    std::uint32_t next_slot_ = 0;
};

void gen_miner_mixrounds(SynthBuilder& b, int rounds) {
    using Val = SynthBuilder::Val;
    Val header = b.make_global_const(0);
    for (int r = 0; r < rounds; ++r) {
        Val key = b.make_const();
        Val sh = b.make_const();
        Val m = b.make_const();
        Val sh2 = b.make_const();
        Val t1 = b.binop("xor", key, header);
        Val t2 = b.binop("shr", t1, sh);
        Val t3 = b.binop("and", t1, t2);
        Val t4 = b.binop("xor", t2, m);
        Val t5 = b.binop("and", t3, t4);
        b.binop("shr", t5, sh2);  // round result, never consumed
    }
}

void gen_miner_sha2like(SynthBuilder& b, int rounds) {
    using Val = SynthBuilder::Val;
    Val header = b.make_global_const(0);
    for (int r = 0; r < rounds; ++r) {
        Val x = b.make_const();
        Val y = b.make_const();
        Val c1 = b.make_const();
        Val c2 = b.make_const();
        Val c3 = b.make_const();
        Val a1 = b.binop("shr", x, c1);
        Val a2 = b.binop("shr", x, c2);
        Val a3 = b.binop("xor", a1, a2);
        Val a4 = b.binop("xor", a3, y);
        Val a5 = b.binop("and", a4, header);
        Val a6 = b.binop("shr", a5, c3);
        Val a7 = b.binop("xor", a6, a1);
        b.binop("and", a7, a4);  // round result, never consumed
    }
}

void gen_benign_convolution(SynthBuilder& b, int rounds) {
    using Val = SynthBuilder::Val;
    Val weight = b.make_const();
    Val acc = b.make_const();
    const std::uint32_t acc_slot = acc.slot;
    const int steps = 4 * rounds;
    for (int i = 0; i < steps; ++i) {
        Val x = b.make_const();
        Val m = b.binop("mul", x, weight);
        acc = b.binop_into("add", acc, m, acc_slot);
        if (i % 4 == 3) {
            Val mask = b.make_const();
            acc = b.binop_into("and", acc, mask, acc_slot);
        }
    }
}

void gen_benign_checksum(SynthBuilder& b, int rounds) {
    using Val = SynthBuilder::Val;
    Val mask = b.make_const();
    Val acc = b.make_const();
    const std::uint32_t acc_slot = acc.slot;
    const int steps = 4 * rounds;
    for (int i = 0; i < steps; ++i) {
        Val x = b.make_const();
        Val s = b.binop_into("add", acc, x, acc_slot);
        acc = b.binop_into("and", s, mask, acc_slot);
    }
}

void gen_benign_random(SynthBuilder& b, int rounds) {
    using Val = SynthBuilder::Val;
    static const Label pool[4] = {"add", "mul", "sub", "or"};
    Val v = b.make_const();
    const int steps = 8 * rounds;
    for (int i = 0; i < steps; ++i) {
        Val x = b.make_const();
        v = b.binop(pool[b.rng().bounded(4)], v, x);
    }
}

}  // namespace

SynthTrace gen_trace(const WorkloadSpec& spec) {
    if (spec.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
    SynthBuilder b(spec.seed, spec.noise_rate);
    switch (spec.kind) {
        case WorkloadKind::MinerSha2Like:
            gen_miner_sha2like(b, spec.rounds);
            break;
        case WorkloadKind::MinerMixRounds:
            gen_miner_mixrounds(b, spec.rounds);
            break;
        case WorkloadKind::BenignConvolution:
            gen_benign_convolution(b, spec.rounds);
            break;
        case WorkloadKind::BenignChecksum:
            gen_benign_checksum(b, spec.rounds);
            break;
        case WorkloadKind::BenignRandom:
            gen_benign_random(b, spec.rounds);
            break;
    }
    return b.take();
}

namespace {

std::size_t stack_delta_checked(const std::vector<RawStackEvent>& trace) {
    std::size_t depth = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace[i].pops > depth) {
            throw TraceError("stack underflow at event " + std::to_string(i));
        }
        depth -= trace[i].pops;
        depth += trace[i].pushes;
    }
    return depth;
}

std::vector<RawStackEvent> obfuscate_substitute(
    const std::vector<RawStackEvent>& trace,
    std::vector<std::size_t>* event_map) {
    std::vector<RawStackEvent> out;
    if (event_map) event_map->assign(trace.size(), 0);
    std::uint32_t scratch = 1u << 20;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const RawStackEvent& ev = trace[i];
        bool plain_xor =
            ev.opcode == "xor" && ev.pops == 2 && ev.pushes == 1 && !ev.slot;
        if (!plain_xor) {
            if (event_map) (*event_map)[i] = out.size();
            out.push_back(ev);
            continue;
        }
        const std::uint32_t ta = scratch++;
        const std::uint32_t tb = scratch++;
        auto local = [](std::uint32_t idx, SlotAccess access) {
            return SlotEffect{SlotKind::Local, idx, access};
        };
        out.push_back({"local.set", 1, 0, local(tb, SlotAccess::Write)});
        out.push_back({"local.set", 1, 0, local(ta, SlotAccess::Write)});
        out.push_back({"local.get", 0, 1, local(ta, SlotAccess::Read)});
        out.push_back({"local.get", 0, 1, local(tb, SlotAccess::Read)});
        out.push_back({"or", 2, 1, {}});
        out.push_back({"local.get", 0, 1, local(ta, SlotAccess::Read)});
        out.push_back({"local.get", 0, 1, local(tb, SlotAccess::Read)});
        out.push_back({"and", 2, 1, {}});
        out.push_back({"not", 1, 1, {}});
        out.push_back({"and", 2, 1, {}});
        if (event_map) (*event_map)[i] = out.size() - 1;
    }
    return out;
}

std::vector<RawStackEvent> obfuscate_split(
    const std::vector<RawStackEvent>& trace, const ObfuscationSpec& spec,
    std::vector<std::size_t>* event_map) {
    Rng rng(derive_seed(spec.seed, "split"));
    std::vector<RawStackEvent> out;
    if (event_map) event_map->assign(trace.size(), 0);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (event_map) (*event_map)[i] = out.size();
        out.push_back(trace[i]);
        if (trace[i].pushes == 1 && rng.unit() < spec.rate) {
            out.push_back({"const", 0, 1, {}});  // all-ones mask
            out.push_back({"and", 2, 1, {}});
        }
    }
    return out;
}

std::vector<RawStackEvent> obfuscate_flatten_noise(
    const std::vector<RawStackEvent>& trace, const ObfuscationSpec& spec,
    std::vector<std::size_t>* event_map) {
    Rng rng(derive_seed(spec.seed, "flatten"));
    static const Label ops[3] = {"and", "xor", "shr"};
    std::vector<RawStackEvent> out;
    if (event_map) event_map->assign(trace.size(), 0);
    std::size_t depth = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (depth == 0 && spec.rate > 0.0 && rng.unit() < spec.rate) {
            out.push_back({"const", 0, 1, {}});
            out.push_back({"const", 0, 1, {}});
            out.push_back({ops[rng.bounded(3)], 2, 1, {}});
            out.push_back({"drop", 1, 0, {}});
        }
        if (event_map) (*event_map)[i] = out.size();
        out.push_back(trace[i]);
        depth -= trace[i].pops;
        depth += trace[i].pushes;
    }
    return out;
}

std::vector<RawStackEvent> obfuscate_interleave(
    const std::vector<RawStackEvent>& trace, const ObfuscationSpec& spec,
    std::vector<std::size_t>* event_map) {
    if (stack_delta_checked(trace) != 0) {
        throw TraceError("cannot interleave a stack-unbalanced trace");
    }
    // Statements: maximal runs between stack-depth-zero boundaries.
    std::vector<std::pair<std::size_t, std::size_t>> stmts;  // [begin, end)
    std::size_t depth = 0, begin = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        depth -= trace[i].pops;
        depth += trace[i].pushes;
        if (depth == 0) {
            stmts.push_back({begin, i + 1});
            begin = i + 1;
        }
    }

    // Slot dependencies between statements: read-after-write,
    // write-after-read, write-after-write.
    const std::size_t n = stmts.size();
    std::vector<std::set<std::size_t>> deps(n);
    std::map<std::pair<int, std::uint32_t>, std::size_t> last_writer;
    std::map<std::pair<int, std::uint32_t>, std::set<std::size_t>> readers;
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t i = stmts[s].first; i < stmts[s].second; ++i) {
            if (!trace[i].slot) continue;
            std::pair<int, std::uint32_t> key{int(trace[i].slot->kind),
                                              trace[i].slot->index};
            if (trace[i].slot->access == SlotAccess::Read) {
                auto w = last_writer.find(key);
                if (w != last_writer.end() && w->second != s) {
                    deps[s].insert(w->second);
                }
                readers[key].insert(s);
            } else {
                auto w = last_writer.find(key);
                if (w != last_writer.end() && w->second != s) {
                    deps[s].insert(w->second);
                }
                for (std::size_t r : readers[key]) {
                    if (r != s) deps[s].insert(r);
                }
                readers[key].clear();
                last_writer[key] = s;
            }
        }
    }

    // Seeded random topological order.
    std::vector<std::size_t> remaining(n, 0);
    std::vector<std::vector<std::size_t>> dependents(n);
    for (std::size_t s = 0; s < n; ++s) {
        remaining[s] = deps[s].size();
        for (std::size_t d : deps[s]) dependents[d].push_back(s);
    }
    Rng rng(derive_seed(spec.seed, "interleave"));
    std::vector<std::size_t> ready, order;
    for (std::size_t s = 0; s < n; ++s) {
        if (remaining[s] == 0) ready.push_back(s);
    }
    while (!ready.empty()) {
        std::size_t pick = rng.bounded(ready.size());
        std::size_t s = ready[pick];
        ready.erase(ready.begin() + std::ptrdiff_t(pick));
        order.push_back(s);
        for (std::size_t d : dependents[s]) {
            if (--remaining[d] == 0) ready.push_back(d);
        }
    }
    if (order.size() != n) {
        throw TraceError("internal: statement dependencies form a cycle");
    }

    std::vector<RawStackEvent> out;
    out.reserve(trace.size());
    if (event_map) event_map->assign(trace.size(), 0);
    for (std::size_t s : order) {
        for (std::size_t i = stmts[s].first; i < stmts[s].second; ++i) {
            if (event_map) (*event_map)[i] = out.size();
            out.push_back(trace[i]);
        }
    }
    return out;
}

}  // namespace

std::vector<RawStackEvent> obfuscate_trace(
    const std::vector<RawStackEvent>& trace, const ObfuscationSpec& spec,
    std::vector<std::size_t>* event_map) {
    if (spec.rate < 0.0 || spec.rate > 1.0) {
        throw std::invalid_argument("obfuscation rate must be in [0, 1]");
    }
    std::vector<RawStackEvent> out;
    switch (spec.strategy) {
        case ObfuscationStrategy::Substitute:
            out = obfuscate_substitute(trace, event_map);
            break;
        case ObfuscationStrategy::Split:
            out = obfuscate_split(trace, spec, event_map);
            break;
        case ObfuscationStrategy::FlattenNoise:
            out = obfuscate_flatten_noise(trace, spec, event_map);
            break;
        case ObfuscationStrategy::Interleave:
            out = obfuscate_interleave(trace, spec, event_map);
            break;
    }
    // Guard against transformation bugs; a well-formed input must stay
    // executable.
    stack_delta_checked(out);
    return out;
}

const char* to_string(WorkloadKind kind) {
    switch (kind) {
        case WorkloadKind::MinerSha2Like: return "miner-sha2like";
        case WorkloadKind::MinerMixRounds: return "miner-mixrounds";
        case WorkloadKind::BenignConvolution: return "benign-convolution";
        case WorkloadKind::BenignChecksum: return "benign-checksum";
        case WorkloadKind::BenignRandom: return "benign-random";
    }
    return "unknown";
}

const char* to_string(ObfuscationStrategy strategy) {
    switch (strategy) {
        case ObfuscationStrategy::Substitute: return "substitute";
        case ObfuscationStrategy::Split: return "split";
        case ObfuscationStrategy::FlattenNoise: return "flatten-noise";
        case ObfuscationStrategy::Interleave: return "interleave";
    }
    return "unknown";
}

WorkloadKind parse_workload_kind(const std::string& name) {
    if (name == "miner-sha2like") return WorkloadKind::MinerSha2Like;
    if (name == "miner-mixrounds") return WorkloadKind::MinerMixRounds;
    if (name == "benign-convolution") return WorkloadKind::BenignConvolution;
    if (name == "benign-checksum") return WorkloadKind::BenignChecksum;
    if (name == "benign-random") return WorkloadKind::BenignRandom;
    throw std::invalid_argument("unknown workload kind: " + name);
}

ObfuscationStrategy parse_obfuscation_strategy(const std::string& name) {
    if (name == "substitute") return ObfuscationStrategy::Substitute;
    if (name == "split") return ObfuscationStrategy::Split;
    if (name == "flatten-noise") return ObfuscationStrategy::FlattenNoise;
    if (name == "interleave") return ObfuscationStrategy::Interleave;
    throw std::invalid_argument("unknown obfuscation strategy: " + name);
}

}  // namespace dfgfp
