#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dfgfp/detect.hpp"
#include "dfgfp/fingerprint.hpp"
#include "dfgfp/fis.hpp"
#include "dfgfp/graph.hpp"
#include "dfgfp/quality.hpp"
#include "dfgfp/simplify.hpp"
#include "dfgfp/synth.hpp"
#include "dfgfp/trace.hpp"

using nlohmann::json;

namespace {

std::string fmt_fixed(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
    return buf;
}

// Reports never embed wall-clock time; the stamp below goes only into
// fingerprint files, and a pinned --timestamp (or SOURCE_DATE_EPOCH)
// makes those reproducible too.
std::string default_timestamp() {
    std::time_t t = 0;
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
        t = std::time_t(std::strtoll(env, nullptr, 10));
    } else {
        t = std::time(nullptr);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void emit(const json& report, const std::string& format,
          const std::string& table) {
    if (format == "json") {
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << table;
    }
}

// Aligned two-space-separated columns; rows[0] is the header.
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& row : rows) {
        if (width.size() < row.size()) width.resize(row.size(), 0);
        for (std::size_t c = 0; c < row.size(); ++c) {
            width[c] = std::max(width[c], row[c].size());
        }
    }
    std::ostringstream os;
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << "  ";
            os << row[c];
            if (c + 1 < row.size()) {
                os << std::string(width[c] - row[c].size(), ' ');
            }
        }
        os << "\n";
    }
    return os.str();
}

std::string opt_str(const std::optional<double>& v, int digits) {
    return v ? fmt_fixed(*v, digits) : "N/A";
}

json opt_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

struct CommonArgs {
    std::string format = "table";
    std::uint64_t seed = 0;
};

void add_format(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--format", args.format, "Report format")
        ->check(CLI::IsMember({"json", "table"}))
        ->capture_default_str();
}

dfgfp::DataFlowGraph load_graph_arg(const std::string& path) {
    return dfgfp::read_fingerprint(path).graph;
}

int run(int argc, char** argv) {
    CLI::App app{
        "Data-flow-graph fingerprinting: trace ingestion, graph "
        "simplification, fingerprint databases and fragment-inclusion "
        "scoring"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a key=value file");
    app.get_formatter()->column_width(30);

    // ingest
    auto* ingest = app.add_subcommand(
        "ingest", "Build a data-flow graph from an execution trace");
    std::string ingest_trace, ingest_out, ingest_name, ingest_dot;
    std::string ingest_instrument = "and,xor,shr";
    std::size_t ingest_max_edges = 2002;
    std::string ingest_stamp = default_timestamp();
    CommonArgs ingest_common;
    ingest->add_option("trace", ingest_trace, "Trace file (raw or resolved)")
        ->required();
    ingest->add_option("-o,--out", ingest_out, "Output graph file")->required();
    ingest->add_option("--name", ingest_name,
                       "Graph name (default: output file stem)");
    ingest->add_option("--instrument", ingest_instrument,
                       "Comma-separated opcodes that become graph vertices")
        ->capture_default_str();
    ingest->add_option("--max-edges", ingest_max_edges,
                       "Stop adding edges beyond this count")
        ->capture_default_str();
    ingest->add_option("--timestamp", ingest_stamp,
                       "Creation stamp recorded in the output file");
    ingest->add_option("--dot", ingest_dot, "Also write a DOT rendering");
    add_format(ingest, ingest_common);

    // simplify
    auto* simplify = app.add_subcommand(
        "simplify", "Collapse equal-role vertices of a graph file");
    std::string simp_in, simp_out, simp_name, simp_dot;
    std::string simp_stamp = default_timestamp();
    dfgfp::SimplifyParams simp_params;
    double simp_bandwidth = -1.0;
    std::uint64_t simp_walks = 0;
    bool simp_exact = false, simp_fixpoint = false;
    CommonArgs simp_common;
    simplify->add_option("graph", simp_in, "Input graph file")->required();
    simplify->add_option("-o,--out", simp_out, "Output fingerprint file")
        ->required();
    simplify->add_option("--name", simp_name,
                         "Fingerprint name (default: input graph name)");
    simplify->add_option("--walks", simp_walks,
                         "Backward walks (0 = max(10000, 100*|V|))");
    simplify->add_option("--bandwidth", simp_bandwidth,
                         "Frequency clustering bandwidth (default: auto)");
    simplify->add_flag("--exact-p", simp_exact,
                       "Use exact visit probabilities instead of walks");
    simplify->add_flag("--fixpoint", simp_fixpoint,
                       "Repeat passes until no merge happens");
    simplify->add_option("--seed", simp_common.seed, "Walk seed")
        ->capture_default_str();
    simplify->add_option("--timestamp", simp_stamp,
                         "Creation stamp recorded in the output file");
    simplify->add_option("--dot", simp_dot, "Also write a DOT rendering");
    add_format(simplify, simp_common);

    // db
    auto* db = app.add_subcommand("db", "Manage a fingerprint database");
    db->require_subcommand(1);
    std::string db_dir;
    db->add_option("--db", db_dir, "Database directory")->required();

    auto* db_add = db->add_subcommand("add", "Add a fingerprint file");
    std::string db_add_file;
    double db_add_threshold = -1.0;
    db_add->add_option("fingerprint", db_add_file, "Fingerprint file")
        ->required();
    db_add->add_option("--threshold", db_add_threshold,
                       "Per-fingerprint detection threshold");

    auto* db_list = db->add_subcommand("list", "List database contents");
    CommonArgs db_list_common;
    add_format(db_list, db_list_common);

    auto* db_remove = db->add_subcommand("remove", "Remove a fingerprint");
    std::string db_remove_name;
    db_remove->add_option("name", db_remove_name, "Fingerprint name")
        ->required();

    // score
    auto* score = app.add_subcommand(
        "score", "Score a sample graph against a fingerprint database");
    std::string score_sample_path;
    std::string score_db;
    double score_threshold = 0.65;
    dfgfp::FisParams score_params;
    CommonArgs score_common;
    score->add_option("sample", score_sample_path, "Sample graph file")
        ->required();
    score->add_option("--db", score_db, "Database directory")->required();
    score->add_option("--threshold", score_threshold, "Detection threshold")
        ->capture_default_str();
    score->add_option("--n", score_params.fragment_edges, "Fragment edge count")
        ->capture_default_str();
    score->add_option("--k", score_params.trials, "Fragment trials")
        ->capture_default_str();
    score->add_option("--seed", score_common.seed, "Fragment seed")
        ->capture_default_str();
    add_format(score, score_common);

    // matrix
    auto* matrix = app.add_subcommand(
        "matrix", "Pairwise fragment-inclusion scores between graph files");
    std::vector<std::string> matrix_files;
    dfgfp::FisParams matrix_params;
    CommonArgs matrix_common;
    matrix->add_option("graphs", matrix_files, "Graph files")
        ->required()
        ->expected(-1);
    matrix->add_option("--n", matrix_params.fragment_edges,
                       "Fragment edge count")
        ->capture_default_str();
    matrix->add_option("--k", matrix_params.trials, "Fragment trials")
        ->capture_default_str();
    matrix->add_option("--seed", matrix_common.seed, "Fragment seed")
        ->capture_default_str();
    add_format(matrix, matrix_common);

    // eval
    auto* eval = app.add_subcommand(
        "eval", "Compute detection metrics from labeled verdicts");
    std::string eval_file;
    CommonArgs eval_common;
    eval->add_option("results", eval_file,
                     "Tab-separated lines: name, predicted, actual "
                     "(malicious|benign)")
        ->required();
    add_format(eval, eval_common);

    // quality
    auto* quality = app.add_subcommand(
        "quality", "Merge-approximation quality study on random graphs");
    std::size_t quality_samples = 5000;
    CommonArgs quality_common;
    quality->add_option("--samples", quality_samples, "Sample count")
        ->capture_default_str();
    quality->add_option("--seed", quality_common.seed, "Sampler seed")
        ->capture_default_str();
    add_format(quality, quality_common);

    // synth
    auto* synth = app.add_subcommand(
        "synth", "Generate a synthetic workload trace");
    std::string synth_kind = "miner-mixrounds";
    std::string synth_out;
    std::string synth_obf;
    int synth_rounds = 10;
    double synth_noise = 0.0, synth_rate = 0.1;
    CommonArgs synth_common;
    synth->add_option("--kind", synth_kind, "Workload kind")
        ->check(CLI::IsMember({"miner-sha2like", "miner-mixrounds",
                               "benign-convolution", "benign-checksum",
                               "benign-random"}))
        ->capture_default_str();
    synth->add_option("-o,--out", synth_out, "Output trace file")->required();
    synth->add_option("--rounds", synth_rounds, "Round count")
        ->capture_default_str();
    synth->add_option("--noise", synth_noise,
                      "Probability weight of injected noise islands")
        ->capture_default_str();
    synth->add_option("--obfuscate", synth_obf,
                      "Apply an obfuscation to the generated trace")
        ->check(CLI::IsMember(
            {"substitute", "split", "flatten-noise", "interleave"}));
    synth->add_option("--rate", synth_rate, "Obfuscation rate")
        ->capture_default_str();
    synth->add_option("--seed", synth_common.seed, "Generator seed")
        ->capture_default_str();
    add_format(synth, synth_common);

    // obfuscate
    auto* obf = app.add_subcommand(
        "obfuscate", "Rewrite a raw trace with an obfuscation strategy");
    std::string obf_in, obf_out, obf_strategy;
    double obf_rate = 0.1;
    CommonArgs obf_common;
    obf->add_option("trace", obf_in, "Raw trace file")->required();
    obf->add_option("-o,--out", obf_out, "Output trace file")->required();
    obf->add_option("--strategy", obf_strategy, "Obfuscation strategy")
        ->required()
        ->check(CLI::IsMember(
            {"substitute", "split", "flatten-noise", "interleave"}));
    obf->add_option("--rate", obf_rate, "Obfuscation rate")
        ->capture_default_str();
    obf->add_option("--seed", obf_common.seed, "Obfuscation seed")
        ->capture_default_str();
    add_format(obf, obf_common);

    // reduction-report
    auto* reduction = app.add_subcommand(
        "reduction-report", "Size reduction table for before/after pairs");
    std::vector<std::string> reduction_files;
    CommonArgs reduction_common;
    reduction
        ->add_option("graphs", reduction_files,
                     "Alternating before/after graph files")
        ->required()
        ->expected(-1);
    add_format(reduction, reduction_common);

    CLI11_PARSE(app, argc, argv);

    if (ingest->parsed()) {
        dfgfp::IngestConfig config;
        config.max_edges = ingest_max_edges;
        config.instrumented.clear();
        std::stringstream ss(ingest_instrument);
        std::string op;
        while (std::getline(ss, op, ',')) {
            if (!op.empty()) config.instrumented.insert(op);
        }
        dfgfp::DataFlowGraph g;
        std::size_t events = 0;
        if (dfgfp::detect_trace_kind(ingest_trace) ==
            dfgfp::TraceKind::Resolved) {
            auto trace = dfgfp::read_resolved_trace(ingest_trace);
            events = trace.size();
            g = dfgfp::ingest_resolved(trace, config);
        } else {
            auto trace = dfgfp::read_raw_trace(ingest_trace);
            events = trace.size();
            g = dfgfp::ingest_raw(trace, config);
        }
        dfgfp::FingerprintRecord rec;
        rec.graph = g;
        rec.meta.name = ingest_name.empty()
                            ? std::filesystem::path(ingest_out).stem().string()
                            : ingest_name;
        rec.meta.source = ingest_trace;
        rec.meta.params = "ingest max-edges=" +
                          std::to_string(ingest_max_edges) +
                          " instrument=" + ingest_instrument;
        rec.meta.created = ingest_stamp;
        dfgfp::write_fingerprint(ingest_out, rec);
        if (!ingest_dot.empty()) {
            std::ofstream dot(ingest_dot, std::ios::binary);
            dot << dfgfp::export_dot(g);
        }
        json report = {{"command", "ingest"},
                       {"trace", ingest_trace},
                       {"events", events},
                       {"vertices", g.vertex_count()},
                       {"edges", g.edge_count()},
                       {"out", ingest_out}};
        std::ostringstream table;
        table << "trace: " << ingest_trace << "\n"
              << "events: " << events << "\n"
              << "vertices: " << g.vertex_count() << "\n"
              << "edges: " << g.edge_count() << "\n"
              << "out: " << ingest_out << "\n";
        emit(report, ingest_common.format, table.str());
        return 0;
    }

    if (simplify->parsed()) {
        dfgfp::FingerprintRecord in = dfgfp::read_fingerprint(simp_in);
        simp_params.walks = simp_walks;
        simp_params.use_exact_p = simp_exact;
        simp_params.fixpoint = simp_fixpoint;
        simp_params.seed = simp_common.seed;
        if (simp_bandwidth >= 0.0) simp_params.bandwidth = simp_bandwidth;
        dfgfp::DataFlowGraph simplified =
            dfgfp::approx_simplify(in.graph, simp_params);

        dfgfp::FingerprintRecord out;
        out.graph = simplified;
        out.meta.name = simp_name.empty() ? in.meta.name : simp_name;
        out.meta.source = in.meta.source;
        std::ostringstream params;
        params << "simplify walks=" << simp_params.walks << " bandwidth="
               << (simp_params.bandwidth ? fmt_fixed(*simp_params.bandwidth, 9)
                                         : std::string("auto"))
               << " exact-p=" << (simp_exact ? 1 : 0)
               << " fixpoint=" << (simp_fixpoint ? 1 : 0)
               << " seed=" << simp_common.seed;
        out.meta.params = params.str();
        out.meta.created = simp_stamp;
        dfgfp::write_fingerprint(simp_out, out);
        if (!simp_dot.empty()) {
            std::ofstream dot(simp_dot, std::ios::binary);
            dot << dfgfp::export_dot(simplified);
        }
        json report = {{"command", "simplify"},
                       {"in", simp_in},
                       {"vertices_before", in.graph.vertex_count()},
                       {"edges_before", in.graph.edge_count()},
                       {"vertices_after", simplified.vertex_count()},
                       {"edges_after", simplified.edge_count()},
                       {"out", simp_out}};
        std::ostringstream table;
        table << "in: " << simp_in << "\n"
              << "vertices: " << in.graph.vertex_count() << " -> "
              << simplified.vertex_count() << "\n"
              << "edges: " << in.graph.edge_count() << " -> "
              << simplified.edge_count() << "\n"
              << "out: " << simp_out << "\n";
        emit(report, simp_common.format, table.str());
        return 0;
    }

    if (db->parsed()) {
        dfgfp::FingerprintDb database{db_dir};
        if (db_add->parsed()) {
            dfgfp::FingerprintRecord rec = dfgfp::read_fingerprint(db_add_file);
            std::optional<double> threshold;
            if (db_add->count("--threshold")) threshold = db_add_threshold;
            database.add(rec, threshold);
            std::cout << "added " << rec.meta.name << "\n";
            return 0;
        }
        if (db_remove->parsed()) {
            database.remove(db_remove_name);
            std::cout << "removed " << db_remove_name << "\n";
            return 0;
        }
        json list = json::array();
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"name", "crc", "threshold", "params"});
        for (const auto& entry : database.entries()) {
            list.push_back({{"name", entry.name},
                            {"path", entry.path},
                            {"crc", entry.crc},
                            {"params", entry.params},
                            {"threshold", opt_json(entry.threshold)}});
            rows.push_back({entry.name, entry.crc,
                            entry.threshold ? fmt_fixed(*entry.threshold, 2)
                                            : "-",
                            entry.params});
        }
        emit({{"command", "db-list"}, {"db", db_dir}, {"fingerprints", list}},
             db_list_common.format, render_table(rows));
        return 0;
    }

    if (score->parsed()) {
        dfgfp::DataFlowGraph sample = load_graph_arg(score_sample_path);
        dfgfp::FingerprintDb database{score_db};
        score_params.seed = score_common.seed;
        std::string sample_name =
            std::filesystem::path(score_sample_path).stem().string();
        dfgfp::DetectionVerdict verdict = dfgfp::score_sample(
            sample, sample_name, database, score_params, score_threshold);

        json scores = json::array();
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"fingerprint", "score", "hits", "effective-n",
                        "threshold", "verdict"});
        for (const auto& s : verdict.scores) {
            scores.push_back({{"fingerprint", s.fingerprint},
                              {"score", s.score.value},
                              {"hits", s.score.hits},
                              {"trials", s.score.trials},
                              {"effective_n", s.score.effective_n},
                              {"threshold", s.threshold}});
            rows.push_back({s.fingerprint, fmt_fixed(s.score.value, 4),
                            std::to_string(s.score.hits) + "/" +
                                std::to_string(s.score.trials),
                            std::to_string(s.score.effective_n),
                            fmt_fixed(s.threshold, 2),
                            s.score.value >= s.threshold ? "hit" : "miss"});
        }
        json report = {{"command", "score"},
                       {"sample", verdict.sample},
                       {"threshold", verdict.threshold},
                       {"scores", scores},
                       {"max_score", verdict.max_score},
                       {"verdict",
                        verdict.malicious ? "malicious" : "benign"}};
        std::ostringstream table;
        table << "sample: " << verdict.sample << "\n"
              << render_table(rows) << "max-score: "
              << fmt_fixed(verdict.max_score, 4) << "\n"
              << "verdict: " << (verdict.malicious ? "malicious" : "benign")
              << "\n";
        emit(report, score_common.format, table.str());
        return verdict.malicious ? 2 : 0;
    }

    if (matrix->parsed()) {
        std::vector<std::string> names;
        std::vector<dfgfp::DataFlowGraph> graphs;
        for (const auto& file : matrix_files) {
            dfgfp::FingerprintRecord rec = dfgfp::read_fingerprint(file);
            names.push_back(rec.meta.name);
            graphs.push_back(rec.graph);
        }
        const std::size_t n = graphs.size();
        std::vector<std::vector<double>> cells(n, std::vector<double>(n, 0.0));
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                dfgfp::FisParams keyed = matrix_params;
                keyed.seed =
                    dfgfp::derive_seed(matrix_common.seed, "score:" + names[c]);
                cells[r][c] = dfgfp::nfis(graphs[c], graphs[r], keyed).value;
            }
        }
        json jrows = json::array();
        std::vector<std::vector<std::string>> rows;
        std::vector<std::string> header = {"sample"};
        header.insert(header.end(), names.begin(), names.end());
        rows.push_back(header);
        for (std::size_t r = 0; r < n; ++r) {
            json jrow = json::array();
            std::vector<std::string> row = {names[r]};
            for (std::size_t c = 0; c < n; ++c) {
                jrow.push_back(cells[r][c]);
                row.push_back(fmt_fixed(cells[r][c], 4));
            }
            jrows.push_back(jrow);
            rows.push_back(row);
        }
        emit({{"command", "matrix"}, {"names", names}, {"scores", jrows}},
             matrix_common.format, render_table(rows));
        return 0;
    }

    if (eval->parsed()) {
        std::ifstream in(eval_file, std::ios::binary);
        if (!in) throw dfgfp::FormatError("cannot open file: " + eval_file);
        std::vector<dfgfp::LabeledVerdict> rows;
        std::string line;
        std::size_t line_no = 0;
        auto parse_label = [&](const std::string& value) {
            if (value == "malicious") return true;
            if (value == "benign") return false;
            throw dfgfp::FormatError(
                "results line " + std::to_string(line_no) + ": label '" +
                value + "' is neither 'malicious' nor 'benign'");
        };
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            std::stringstream ss(line);
            std::string name, predicted, actual;
            if (!std::getline(ss, name, '\t') ||
                !std::getline(ss, predicted, '\t') ||
                !std::getline(ss, actual, '\t')) {
                throw dfgfp::FormatError(
                    "results line " + std::to_string(line_no) +
                    ": expected name, predicted, actual separated by tabs");
            }
            rows.push_back(
                {name, parse_label(predicted), parse_label(actual)});
        }
        dfgfp::MetricsReport m = dfgfp::compute_metrics(rows);
        json report = {{"command", "eval"},
                       {"samples", rows.size()},
                       {"true_positives", m.true_positives},
                       {"false_positives", m.false_positives},
                       {"true_negatives", m.true_negatives},
                       {"false_negatives", m.false_negatives},
                       {"accuracy", m.accuracy},
                       {"sensitivity", opt_json(m.sensitivity)},
                       {"specificity", opt_json(m.specificity)},
                       {"precision", opt_json(m.precision)},
                       {"f1", opt_json(m.f1)}};
        std::ostringstream table;
        table << "samples: " << rows.size() << "\n"
              << "tp/fp/tn/fn: " << m.true_positives << "/"
              << m.false_positives << "/" << m.true_negatives << "/"
              << m.false_negatives << "\n"
              << "accuracy: " << fmt_fixed(m.accuracy, 4) << "\n"
              << "sensitivity: " << opt_str(m.sensitivity, 4) << "\n"
              << "specificity: " << opt_str(m.specificity, 4) << "\n"
              << "precision: " << opt_str(m.precision, 4) << "\n"
              << "f1: " << opt_str(m.f1, 4) << "\n";
        emit(report, eval_common.format, table.str());
        return 0;
    }

    if (quality->parsed()) {
        dfgfp::QualityReport q =
            dfgfp::run_quality_study(quality_samples, quality_common.seed);
        json report = {
            {"command", "quality"},
            {"samples", q.samples},
            {"fixed_point_fraction", q.fixed_point_fraction},
            {"mean_iso_pairs", q.mean_iso_pairs},
            {"resimplified_fixed_point_fraction",
             q.resimplified_fixed_point_fraction},
            {"seed", q.seed},
            {"sampler", q.sampler}};
        std::ostringstream table;
        table << "samples: " << q.samples << "\n"
              << "fixed-point-fraction: " << fmt_fixed(q.fixed_point_fraction, 4)
              << "\n"
              << "mean-iso-pairs: " << fmt_fixed(q.mean_iso_pairs, 4) << "\n"
              << "resimplified-fixed-point-fraction: "
              << fmt_fixed(q.resimplified_fixed_point_fraction, 4) << "\n"
              << "seed: " << q.seed << "\n"
              << "sampler: " << q.sampler << "\n";
        emit(report, quality_common.format, table.str());
        return 0;
    }

    if (synth->parsed()) {
        dfgfp::WorkloadSpec spec;
        spec.kind = dfgfp::parse_workload_kind(synth_kind);
        spec.rounds = synth_rounds;
        spec.seed = synth_common.seed;
        spec.noise_rate = synth_noise;
        dfgfp::SynthTrace trace = dfgfp::gen_trace(spec);
        std::vector<dfgfp::RawStackEvent> events = std::move(trace.events);
        if (!synth_obf.empty()) {
            dfgfp::ObfuscationSpec ospec;
            ospec.strategy = dfgfp::parse_obfuscation_strategy(synth_obf);
            ospec.seed = synth_common.seed;
            ospec.rate = synth_rate;
            events = dfgfp::obfuscate_trace(events, ospec);
        }
        dfgfp::write_raw_trace(synth_out, events);
        json report = {{"command", "synth"},
                       {"kind", synth_kind},
                       {"rounds", synth_rounds},
                       {"noise", synth_noise},
                       {"obfuscation", synth_obf.empty() ? "none" : synth_obf},
                       {"events", events.size()},
                       {"ground_truth_vertices",
                        trace.ground_truth.vertex_count()},
                       {"ground_truth_edges", trace.ground_truth.edge_count()},
                       {"out", synth_out}};
        std::ostringstream table;
        table << "kind: " << synth_kind << "\n"
              << "rounds: " << synth_rounds << "\n"
              << "events: " << events.size() << "\n"
              << "obfuscation: " << (synth_obf.empty() ? "none" : synth_obf)
              << "\n"
              << "out: " << synth_out << "\n";
        emit(report, synth_common.format, table.str());
        return 0;
    }

    if (obf->parsed()) {
        std::vector<dfgfp::RawStackEvent> events =
            dfgfp::read_raw_trace(obf_in);
        dfgfp::ObfuscationSpec ospec;
        ospec.strategy = dfgfp::parse_obfuscation_strategy(obf_strategy);
        ospec.seed = obf_common.seed;
        ospec.rate = obf_rate;
        std::vector<dfgfp::RawStackEvent> out = dfgfp::obfuscate_trace(
            events, ospec);
        dfgfp::write_raw_trace(obf_out, out);
        json report = {{"command", "obfuscate"},
                       {"strategy", obf_strategy},
                       {"rate", obf_rate},
                       {"events_before", events.size()},
                       {"events_after", out.size()},
                       {"out", obf_out}};
        std::ostringstream table;
        table << "strategy: " << obf_strategy << "\n"
              << "events: " << events.size() << " -> " << out.size() << "\n"
              << "out: " << obf_out << "\n";
        emit(report, obf_common.format, table.str());
        return 0;
    }

    if (reduction->parsed()) {
        if (reduction_files.size() % 2 != 0) {
            throw dfgfp::FormatError(
                "reduction-report needs an even number of files "
                "(before/after pairs)");
        }
        json jrows = json::array();
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"name", "V", "E", "V'", "E'", "dV%", "dE%"});
        for (std::size_t i = 0; i < reduction_files.size(); i += 2) {
            dfgfp::FingerprintRecord before =
                dfgfp::read_fingerprint(reduction_files[i]);
            dfgfp::FingerprintRecord after =
                dfgfp::read_fingerprint(reduction_files[i + 1]);
            const double v0 = double(before.graph.vertex_count());
            const double e0 = double(before.graph.edge_count());
            const double v1 = double(after.graph.vertex_count());
            const double e1 = double(after.graph.edge_count());
            const double dv = v0 > 0 ? (1.0 - v1 / v0) * 100.0 : 0.0;
            const double de = e0 > 0 ? (1.0 - e1 / e0) * 100.0 : 0.0;
            jrows.push_back({{"name", before.meta.name},
                             {"vertices_before", before.graph.vertex_count()},
                             {"edges_before", before.graph.edge_count()},
                             {"vertices_after", after.graph.vertex_count()},
                             {"edges_after", after.graph.edge_count()},
                             {"vertex_reduction_pct", dv},
                             {"edge_reduction_pct", de}});
            rows.push_back({before.meta.name, std::to_string(std::size_t(v0)),
                            std::to_string(std::size_t(e0)),
                            std::to_string(std::size_t(v1)),
                            std::to_string(std::size_t(e1)), fmt_fixed(dv, 1),
                            fmt_fixed(de, 1)});
        }
        emit({{"command", "reduction-report"}, {"rows", jrows}},
             reduction_common.format, render_table(rows));
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
