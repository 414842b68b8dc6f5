#include "dfgfp/fingerprint.hpp"

#include <zlib.h>

#include <fstream>
#include <sstream>

namespace dfgfp {

namespace {

const char* kVersionLine = "#dfgfp v1";

void require_single_line(const std::string& field, const std::string& value) {
    if (value.find('\n') != std::string::npos ||
        value.find('\r') != std::string::npos) {
        throw FormatError("fingerprint " + field + " must be a single line");
    }
}

void append_field(std::string& out, const char* key,
                  const std::string& value) {
    out += key;
    if (!value.empty()) {
        out += ' ';
        out += value;
    }
    out += '\n';
}

// Returns the value of a "#key value" line, empty when the line is just the
// key. Throws when the line does not carry the expected key.
std::string take_field(const std::string& line, const std::string& key) {
    if (line == key) return "";
    if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
    throw FormatError("expected " + key + " line, found: " + line);
}

}  // namespace

std::string crc32_hex(const std::string& data) {
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data()),
                uInt(data.size()));
    std::ostringstream os;
    os << std::hex << std::nouppercase;
    os.width(8);
    os.fill('0');
    os << crc;
    return os.str();
}

std::string fingerprint_to_string(const FingerprintRecord& rec) {
    require_single_line("name", rec.meta.name);
    require_single_line("source", rec.meta.source);
    require_single_line("dir", rec.meta.direction);
    require_single_line("params", rec.meta.params);
    require_single_line("created", rec.meta.created);
    for (const auto& [id, label] : rec.graph.labels()) {
        (void)id;
        if (label.empty() ||
            label.find_first_of(" \t\r\n") != std::string::npos) {
            throw FormatError("label not serializable: '" + label + "'");
        }
    }

    std::string body;
    body += kVersionLine;
    body += '\n';
    append_field(body, "#name", rec.meta.name);
    append_field(body, "#source", rec.meta.source);
    append_field(body, "#dir", rec.meta.direction);
    append_field(body, "#params", rec.meta.params);
    append_field(body, "#created", rec.meta.created);
    for (const auto& [id, label] : rec.graph.labels()) {
        body += "V " + std::to_string(id) + " " + label + "\n";
    }
    for (const auto& [src, dst] : rec.graph.edges()) {
        body += "E " + std::to_string(src) + " " + std::to_string(dst) + "\n";
    }
    return body + "C " + crc32_hex(body) + "\n";
}

FingerprintRecord fingerprint_from_string(const std::string& text) {
    std::size_t crc_pos = text.rfind("\nC ");
    if (crc_pos == std::string::npos) {
        throw FormatError("fingerprint has no checksum line");
    }
    const std::string body = text.substr(0, crc_pos + 1);
    std::string crc_line = text.substr(crc_pos + 1);
    while (!crc_line.empty() &&
           (crc_line.back() == '\n' || crc_line.back() == '\r')) {
        crc_line.pop_back();
    }
    if (crc_line.size() != 10 || crc_line.rfind("C ", 0) != 0) {
        throw FormatError("malformed checksum line: " + crc_line);
    }
    if (crc_line.substr(2) != crc32_hex(body)) {
        throw FormatError("fingerprint checksum mismatch (file corrupted?)");
    }

    std::vector<std::string> lines;
    std::istringstream is(body);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    if (lines.empty() || lines[0] != kVersionLine) {
        if (!lines.empty() && lines[0].rfind("#dfgfp", 0) == 0) {
            throw FormatError("unsupported fingerprint version: " + lines[0]);
        }
        throw FormatError("not a fingerprint file");
    }
    if (lines.size() < 6) throw FormatError("fingerprint header truncated");

    FingerprintRecord rec;
    rec.meta.name = take_field(lines[1], "#name");
    rec.meta.source = take_field(lines[2], "#source");
    rec.meta.direction = take_field(lines[3], "#dir");
    rec.meta.params = take_field(lines[4], "#params");
    rec.meta.created = take_field(lines[5], "#created");
    if (rec.meta.direction != "consumer-to-operand") {
        throw FormatError("fingerprint records a different edge direction: " +
                          rec.meta.direction);
    }

    try {
        for (std::size_t i = 6; i < lines.size(); ++i) {
            if (lines[i].empty()) continue;
            std::istringstream ls(lines[i]);
            std::string tag;
            ls >> tag;
            if (tag == "V") {
                VertexId id;
                Label label;
                if (!(ls >> id >> label)) {
                    throw FormatError("bad vertex line: " + lines[i]);
                }
                rec.graph.add_vertex(id, label);
            } else if (tag == "E") {
                VertexId src, dst;
                if (!(ls >> src >> dst)) {
                    throw FormatError("bad edge line: " + lines[i]);
                }
                rec.graph.add_edge(src, dst);
            } else {
                throw FormatError("unexpected line in fingerprint: " +
                                  lines[i]);
            }
        }
    } catch (const GraphError& e) {
        throw FormatError(std::string("invalid fingerprint graph: ") +
                          e.what());
    }
    auto issues = validate(rec.graph);
    if (!issues.empty()) {
        throw FormatError("fingerprint violates graph invariants: " +
                          issues.front());
    }
    return rec;
}

void write_fingerprint(const std::filesystem::path& path,
                       const FingerprintRecord& rec) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot write fingerprint file " + path.string());
    }
    out << fingerprint_to_string(rec);
}

FingerprintRecord read_fingerprint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open fingerprint file " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return fingerprint_from_string(os.str());
}

std::string export_dot(const DataFlowGraph& g) {
    std::ostringstream os;
    os << "digraph dfg {\n";
    for (const auto& [id, label] : g.labels()) {
        os << "  \"" << id << "\" [label=\"" << label << "\"";
        if (label == "and") {
            os << " style=filled fillcolor=red";
        } else if (label == "xor") {
            os << " style=filled fillcolor=green";
        } else if (label == "shr") {
            os << " style=filled fillcolor=blue";
        }
        os << "];\n";
    }
    for (const auto& [src, dst] : g.edges()) {
        os << "  \"" << src << "\" -> \"" << dst << "\";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace dfgfp
