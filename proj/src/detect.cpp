#include "dfgfp/detect.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dfgfp/rng.hpp"

namespace dfgfp {

namespace {

const char* kIndexName = "index.tsv";

bool db_safe_name(const std::string& name) {
    if (name.empty() || name.size() > 200) return false;
    if (name.front() == '.') return false;
    for (char c : name) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

std::string format_threshold(double value) {
    std::ostringstream os;
    os << value;
    return os.str();
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open file: " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// The checksum line is the last line of a valid fingerprint file.
std::string stored_crc(const std::string& content) {
    std::size_t pos = content.rfind("\nC ");
    if (pos == std::string::npos || content.size() < pos + 12) return "";
    return content.substr(pos + 3, 8);
}

}  // namespace

FingerprintDb::FingerprintDb(std::filesystem::path dir)
    : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    read_index();
}

void FingerprintDb::read_index() {
    entries_.clear();
    const std::filesystem::path index = dir_ / kIndexName;
    if (!std::filesystem::exists(index)) return;
    std::istringstream in(slurp(index));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            std::size_t tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() != 5) {
            throw FormatError("db index line " + std::to_string(line_no) +
                              ": expected 5 tab-separated fields, got " +
                              std::to_string(fields.size()));
        }
        DbEntry entry;
        entry.name = fields[0];
        entry.path = fields[1];
        entry.crc = fields[2];
        entry.params = fields[3];
        if (fields[4] != "-") {
            try {
                entry.threshold = std::stod(fields[4]);
            } catch (const std::exception&) {
                throw FormatError("db index line " + std::to_string(line_no) +
                                  ": bad threshold '" + fields[4] + "'");
            }
        }
        entries_.push_back(std::move(entry));
    }
    std::sort(entries_.begin(), entries_.end(),
              [](const DbEntry& a, const DbEntry& b) { return a.name < b.name; });
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        if (entries_[i - 1].name == entries_[i].name) {
            throw FormatError("db index has duplicate name '" +
                              entries_[i].name + "'");
        }
    }
}

void FingerprintDb::write_index() const {
    std::ostringstream os;
    for (const DbEntry& entry : entries_) {
        os << entry.name << '\t' << entry.path << '\t' << entry.crc << '\t'
           << entry.params << '\t'
           << (entry.threshold ? format_threshold(*entry.threshold) : "-")
           << '\n';
    }
    const std::filesystem::path index = dir_ / kIndexName;
    const std::filesystem::path tmp = dir_ / (std::string(kIndexName) + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw FormatError("cannot write db index: " + tmp.string());
        }
        out << os.str();
    }
    std::filesystem::rename(tmp, index);
}

bool FingerprintDb::contains(const std::string& name) const {
    for (const DbEntry& entry : entries_) {
        if (entry.name == name) return true;
    }
    return false;
}

void FingerprintDb::add(const FingerprintRecord& record,
                        std::optional<double> threshold) {
    const std::string& name = record.meta.name;
    if (!db_safe_name(name)) {
        throw FormatError(
            "fingerprint name '" + name +
            "' cannot be stored; use letters, digits, '.', '_' or '-'");
    }
    if (contains(name)) {
        throw FormatError("fingerprint '" + name + "' already in database");
    }
    if (threshold && (*threshold < 0.0 || *threshold > 1.0)) {
        throw std::invalid_argument("threshold must be in [0, 1]");
    }
    const std::string content = fingerprint_to_string(record);
    DbEntry entry;
    entry.name = name;
    entry.path = name + ".dfgfp";
    entry.crc = stored_crc(content);
    entry.params = record.meta.params;
    entry.threshold = threshold;

    std::ofstream out(dir_ / entry.path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError("cannot write fingerprint file: " +
                          (dir_ / entry.path).string());
    }
    out << content;
    out.close();

    entries_.push_back(std::move(entry));
    std::sort(entries_.begin(), entries_.end(),
              [](const DbEntry& a, const DbEntry& b) { return a.name < b.name; });
    write_index();
}

void FingerprintDb::remove(const std::string& name) {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const DbEntry& e) { return e.name == name; });
    if (it == entries_.end()) {
        throw FormatError("fingerprint '" + name + "' not in database");
    }
    std::error_code ec;
    std::filesystem::remove(dir_ / it->path, ec);  // index is authoritative
    entries_.erase(it);
    write_index();
}

FingerprintRecord FingerprintDb::load(const std::string& name) const {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const DbEntry& e) { return e.name == name; });
    if (it == entries_.end()) {
        throw FormatError("fingerprint '" + name + "' not in database");
    }
    const std::string content = slurp(dir_ / it->path);
    FingerprintRecord record = fingerprint_from_string(content);
    const std::string crc = stored_crc(content);
    if (crc != it->crc) {
        throw FormatError("fingerprint file for '" + name +
                          "' does not match the index (expected crc " +
                          it->crc + ", found " + crc + ")");
    }
    if (record.meta.name != name) {
        throw FormatError("fingerprint file for '" + name +
                          "' declares a different name '" + record.meta.name +
                          "'");
    }
    return record;
}

DetectionVerdict score_sample(const DataFlowGraph& sample,
                              const std::string& sample_name,
                              const FingerprintDb& db, const FisParams& params,
                              double threshold) {
    if (db.entries().empty()) {
        throw std::invalid_argument("fingerprint database is empty");
    }
    if (threshold < 0.0 || threshold > 1.0) {
        throw std::invalid_argument("threshold must be in [0, 1]");
    }
    DetectionVerdict verdict;
    verdict.sample = sample_name;
    verdict.threshold = threshold;
    for (const DbEntry& entry : db.entries()) {
        FingerprintRecord record = db.load(entry.name);
        FisParams keyed = params;
        keyed.seed = derive_seed(params.seed, "score:" + entry.name);
        ScoreEntry scored;
        scored.fingerprint = entry.name;
        scored.score = nfis(record.graph, sample, keyed);
        scored.threshold = entry.threshold.value_or(threshold);
        verdict.max_score = std::max(verdict.max_score, scored.score.value);
        if (scored.score.value >= scored.threshold) verdict.malicious = true;
        verdict.scores.push_back(std::move(scored));
    }
    return verdict;
}

MetricsReport compute_metrics(const std::vector<LabeledVerdict>& rows) {
    if (rows.empty()) {
        throw std::invalid_argument("no labeled verdicts to evaluate");
    }
    MetricsReport r;
    for (const LabeledVerdict& row : rows) {
        if (row.actual_malicious) {
            ++(row.predicted_malicious ? r.true_positives : r.false_negatives);
        } else {
            ++(row.predicted_malicious ? r.false_positives : r.true_negatives);
        }
    }
    const double total = double(rows.size());
    r.accuracy = double(r.true_positives + r.true_negatives) / total;
    if (r.true_positives + r.false_negatives > 0) {
        r.sensitivity = double(r.true_positives) /
                        double(r.true_positives + r.false_negatives);
    }
    if (r.true_negatives + r.false_positives > 0) {
        r.specificity = double(r.true_negatives) /
                        double(r.true_negatives + r.false_positives);
    }
    if (r.true_positives + r.false_positives > 0) {
        r.precision = double(r.true_positives) /
                      double(r.true_positives + r.false_positives);
    }
    if (r.precision && r.sensitivity && (*r.precision + *r.sensitivity) > 0.0) {
        r.f1 = 2.0 * *r.precision * *r.sensitivity /
               (*r.precision + *r.sensitivity);
    }
    return r;
}

}  // namespace dfgfp
