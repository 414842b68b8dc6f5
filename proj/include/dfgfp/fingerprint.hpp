#pragma once

#include <filesystem>
#include <string>

#include "dfgfp/graph.hpp"

namespace dfgfp {

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FingerprintMeta {
    std::string name;
    std::string source;
    std::string direction = "consumer-to-operand";
    std::string params;   // how the graph was produced, free form
    std::string created;  // ISO 8601, empty allowed
};

struct FingerprintRecord {
    FingerprintMeta meta;
    DataFlowGraph graph;
};

// Text container:
//   #dfgfp v1
//   #name <...>  #source <...>  #dir <...>  #params <...>  #created <...>
//   V <id> <label> ...
//   E <src> <dst> ...
//   C <crc32 of everything above>
// Vertices and edges are written in ascending order, so identical records
// serialize to identical bytes.
std::string fingerprint_to_string(const FingerprintRecord& rec);
FingerprintRecord fingerprint_from_string(const std::string& text);

void write_fingerprint(const std::filesystem::path& path,
                       const FingerprintRecord& rec);
FingerprintRecord read_fingerprint(const std::filesystem::path& path);

// Graphviz export: and=red, xor=green, shr=blue, everything else uncolored.
std::string export_dot(const DataFlowGraph& g);

// CRC-32 (IEEE) of a byte string, lowercase hex.
std::string crc32_hex(const std::string& data);

}  // namespace dfgfp
