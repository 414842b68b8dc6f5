#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dfgfp/fingerprint.hpp"
#include "dfgfp/fis.hpp"
#include "dfgfp/graph.hpp"

namespace dfgfp {

struct DbEntry {
    std::string name;
    std::string path;  // relative to the database directory
    std::string crc;
    std::string params;
    // Per-fingerprint detection threshold; unset means the caller's
    // global threshold applies.
    std::optional<double> threshold;
};

// Directory of fingerprint files plus a tab-separated index
// (name, path, crc, params, threshold). Names are unique; the index is
// kept sorted by name and rewritten atomically on every mutation.
class FingerprintDb {
public:
    // Opens dir, creating it (and an empty index) if missing.
    explicit FingerprintDb(std::filesystem::path dir);

    // Stores the record under its meta name. Rejects duplicate names and
    // names unusable as file names.
    void add(const FingerprintRecord& record,
             std::optional<double> threshold = std::nullopt);
    void remove(const std::string& name);

    // Reads a stored fingerprint back, verifying it still matches the
    // indexed checksum and name.
    FingerprintRecord load(const std::string& name) const;

    const std::vector<DbEntry>& entries() const { return entries_; }
    const std::filesystem::path& directory() const { return dir_; }
    bool contains(const std::string& name) const;

private:
    void read_index();
    void write_index() const;

    std::filesystem::path dir_;
    std::vector<DbEntry> entries_;  // sorted by name
};

struct ScoreEntry {
    std::string fingerprint;
    FisScore score;
    double threshold = 0.0;  // the threshold this fingerprint was judged at
};

struct DetectionVerdict {
    std::string sample;
    std::vector<ScoreEntry> scores;  // ordered by fingerprint name
    double max_score = 0.0;
    double threshold = 0.0;  // global default
    bool malicious = false;  // any score at or above its threshold
};

// Scores a sample graph against every fingerprint in the database.
// Fragment sampling is keyed by fingerprint name, so a fingerprint's
// score for a given sample does not depend on what else the database
// holds. Throws std::invalid_argument on an empty database.
DetectionVerdict score_sample(const DataFlowGraph& sample,
                              const std::string& sample_name,
                              const FingerprintDb& db, const FisParams& params,
                              double threshold);

struct LabeledVerdict {
    std::string name;
    bool predicted_malicious = false;
    bool actual_malicious = false;
};

// Confusion-matrix metrics. Ratios with an empty denominator are unset
// and render as N/A; f1 needs both precision and sensitivity defined and
// their sum positive.
struct MetricsReport {
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t true_negatives = 0;
    std::size_t false_negatives = 0;
    double accuracy = 0.0;
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    std::optional<double> precision;
    std::optional<double> f1;
};

MetricsReport compute_metrics(const std::vector<LabeledVerdict>& rows);

}  // namespace dfgfp
