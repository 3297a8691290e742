#pragma once

// Post-hoc analytics: rescoring exported datasets, motif gain/loss counting
// and tidy TSV/JSON output for plotting.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqforge/archive.hpp"
#include "seqforge/config.hpp"
#include "seqforge/engine.hpp"
#include "seqforge/error.hpp"
#include "seqforge/oracle.hpp"
#include "seqforge/seqdiff.hpp"
#include "seqforge/stats.hpp"

namespace seqforge {

// ---------------------------------------------------------------------------
// Dataset scoring

struct DatasetScore {
    std::size_t rows = 0;        // records read
    std::size_t duplicates = 0;  // rows dropped as repeated sequences
    ArchiveMetrics metrics;
    std::vector<std::size_t> bin_counts;
};

/// Rebuilds an archive from `records` (deduplicating, no capacity checks)
/// and computes every quality component.
inline DatasetScore score_records(const std::vector<ArchiveRecord>& records, const ArchiveParams& params) {
    Archive a(params);
    DatasetScore s;
    s.rows = records.size();
    for (const ArchiveRecord& r : records)
        if (!a.insert_unchecked(r)) ++s.duplicates;
    s.metrics = a.metrics();
    s.bin_counts.assign(a.bin_counts().begin(), a.bin_counts().end());
    return s;
}

inline DatasetScore score_dataset(std::istream& is, const ArchiveParams& params) {
    return score_records(read_dataset_tsv(is, params.bin_count), params);
}

inline DatasetScore score_dataset(const std::string& path, const ArchiveParams& params) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return score_dataset(in, params);
}

// ---------------------------------------------------------------------------
// Motif disruption

class MotifSet {
public:
    MotifSet() = default;
    explicit MotifSet(std::vector<std::string> motifs) : motifs_(std::move(motifs)) {
        std::set<std::string> seen;
        for (const std::string& m : motifs_) {
            if (m.size() < 3) throw ConfigError("motif '" + m + "' shorter than 3");
            require_alphabet(m);
            if (!seen.insert(m).second) throw ConfigError("duplicate motif '" + m + "'");
        }
    }

    const std::vector<std::string>& motifs() const noexcept { return motifs_; }
    std::size_t size() const noexcept { return motifs_.size(); }

private:
    std::vector<std::string> motifs_;
};

/// The toy oracle's motif keys.
inline MotifSet default_motif_set(const ToyOracleConfig& toy = {}) {
    std::vector<std::string> m;
    for (const auto& [motif, w] : toy.motifs) m.push_back(motif);
    return MotifSet(std::move(m));
}

/// One motif per line; blank lines and lines starting with '#' are skipped.
inline MotifSet read_motifs(std::istream& is) {
    std::vector<std::string> out;
    std::string line;
    while (std::getline(is, line)) {
        std::string m;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c)))
                m.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        if (m.empty() || m.front() == '#') continue;
        out.push_back(std::move(m));
    }
    return MotifSet(std::move(out));
}

inline MotifSet load_motifs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return read_motifs(in);
}

struct MotifEvents {
    std::string motif;
    std::size_t gained = 0;
    std::size_t lost = 0;
};

struct DisruptionReport {
    std::vector<MotifEvents> per_motif;
    std::size_t total_events = 0;
    std::size_t dataset_size = 0;
    double frequency = 0.0;  // total_events / dataset_size
};

/// Per sequence and motif, |count(seq) - count(reference)| events, split into
/// gains and losses. Counts include overlapping occurrences.
inline DisruptionReport motif_disruption(std::span<const std::string> sequences, const std::string& reference,
                                         const MotifSet& motifs) {
    if (sequences.empty()) throw Error("motif_disruption needs a non-empty dataset");
    DisruptionReport r;
    r.dataset_size = sequences.size();
    for (const std::string& m : motifs.motifs()) {
        MotifEvents ev{m, 0, 0};
        const std::size_t ref = count_occurrences(m, reference);
        for (const std::string& s : sequences) {
            const std::size_t c = count_occurrences(m, s);
            if (c > ref) ev.gained += c - ref;
            else ev.lost += ref - c;
        }
        r.total_events += ev.gained + ev.lost;
        r.per_motif.push_back(std::move(ev));
    }
    r.frequency = static_cast<double>(r.total_events) / static_cast<double>(r.dataset_size);
    return r;
}

inline DisruptionReport motif_disruption(const std::vector<ArchiveRecord>& records, const std::string& reference,
                                         const MotifSet& motifs) {
    std::vector<std::string> seqs;
    seqs.reserve(records.size());
    for (const ArchiveRecord& r : records) seqs.push_back(r.sequence);
    return motif_disruption(std::span<const std::string>(seqs), reference, motifs);
}

// ---------------------------------------------------------------------------
// Reports

inline nlohmann::json to_json(const ArchiveMetrics& m) {
    return {{"size", m.size},
            {"size_fraction", m.size_fraction},
            {"diversity", m.diversity},
            {"intra_bin_diversity", m.intra_bin_diversity},
            {"low_count_fraction", m.low_count_fraction},
            {"quality", m.quality}};
}

inline nlohmann::json to_json(const stats::Summary& s) {
    return {{"n", s.n}, {"mean", s.mean}, {"median", s.median}, {"q1", s.q1}, {"q3", s.q3}, {"iqr", s.iqr()}};
}

inline nlohmann::json to_json(const DisruptionReport& r) {
    nlohmann::json motifs = nlohmann::json::array();
    for (const MotifEvents& e : r.per_motif)
        motifs.push_back({{"motif", e.motif}, {"gained", e.gained}, {"lost", e.lost}});
    return {{"motifs", motifs},
            {"total_events", r.total_events},
            {"dataset_size", r.dataset_size},
            {"frequency", r.frequency}};
}

inline nlohmann::json to_json(const DatasetScore& s) {
    return {{"rows", s.rows}, {"duplicates", s.duplicates}, {"metrics", to_json(s.metrics)},
            {"bin_counts", s.bin_counts}};
}

/// Diff weights (edit-distance proxy) of the archived genotypes.
inline stats::Summary edit_distance_summary(const Archive& archive) {
    std::vector<double> w;
    w.reserve(archive.size());
    for (const ArchiveRecord& r : archive.records()) {
        const bool none = r.genotype.empty() || r.genotype == "-";
        w.push_back(none ? 0.0 : static_cast<double>(diff_weight(parse_genotype(r.genotype))));
    }
    return stats::summarize(w);
}

/// One row per generation.
inline void write_trace_tsv(const RunTrace& trace, std::ostream& os) {
    os << "generation\telapsed_seconds\tquality\tarchive_size\tadmitted\tmean_fitness\tmedian_fitness"
          "\tmean_diff_weight\toracle_calls\n";
    for (const GenerationStats& g : trace.generations) {
        os << g.generation << '\t' << format_double(g.elapsed_seconds) << '\t' << format_double(g.quality) << '\t'
           << g.archive_size << '\t' << g.admitted << '\t' << format_double(g.mean_fitness) << '\t'
           << format_double(g.median_fitness) << '\t' << format_double(g.mean_diff_weight) << '\t'
           << g.oracle_calls << '\n';
    }
}

/// Unique sequences per prediction bin; counts sum to the archive size.
inline void write_bins_tsv(const Archive& archive, std::ostream& os) {
    const std::size_t n = archive.params().bin_count;
    os << "bin\tlower\tupper\tcount\n";
    for (std::size_t b = 0; b < n; ++b) {
        os << b << '\t' << format_double(static_cast<double>(b) / static_cast<double>(n)) << '\t'
           << format_double(static_cast<double>(b + 1) / static_cast<double>(n)) << '\t'
           << archive.count_in_bin(b) << '\n';
    }
}

/// Metadata sidecar. Everything outside "timing" is a pure function of the
/// config, seed, reference and oracle.
inline nlohmann::json run_metadata(const RunConfig& config, const ReferenceContext& ctx, const RunResult& result,
                                   const std::string& oracle_identity) {
    nlohmann::json restricted = nlohmann::json::array();
    for (const Interval& iv : ctx.restricted_regions()) restricted.push_back({iv.first, iv.last});
    return {{"config", to_json(config)},
            {"reference",
             {{"sequence", ctx.sequence()},
              {"length", ctx.sequence().size()},
              {"acceptors", ctx.acceptors()},
              {"donors", ctx.donors()},
              {"restricted_regions", restricted}}},
            {"oracle", oracle_identity},
            {"metrics", to_json(result.archive.metrics())},
            {"edit_distance", to_json(edit_distance_summary(result.archive))},
            {"generations", result.trace.generations.size()},
            {"stop_reason", to_string(result.trace.stop_reason)},
            {"oracle_calls", result.oracle_calls},
            {"operators",
             {{"selections", result.counters.selections},
              {"crossovers", result.counters.crossovers},
              {"standard_mutations", result.counters.standard_mutations},
              {"proximity_mutations", result.counters.proximity_mutations}}},
            {"timing", {{"elapsed_seconds", result.elapsed_seconds}}}};
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw Error("cannot write " + p.string());
    return out;
}

}  // namespace detail

/// Writes dataset.tsv, metadata.json, trace.tsv and bins.tsv into `dir`.
inline void emit_run(const std::filesystem::path& dir, const RunConfig& config, const ReferenceContext& ctx,
                     const RunResult& result, const std::string& oracle_identity) {
    std::filesystem::create_directories(dir);
    {
        auto out = detail::open_out(dir / "dataset.tsv");
        write_dataset_tsv(result.archive, out);
    }
    {
        auto out = detail::open_out(dir / "metadata.json");
        out << run_metadata(config, ctx, result, oracle_identity).dump(2) << '\n';
    }
    {
        auto out = detail::open_out(dir / "trace.tsv");
        write_trace_tsv(result.trace, out);
    }
    {
        auto out = detail::open_out(dir / "bins.tsv");
        write_bins_tsv(result.archive, out);
    }
}

inline void write_comparison_runs_tsv(const ComparisonReport& rep, std::ostream& os) {
    os << "name\tseed\tok\tfinal_quality\tarchive_size\tstop_reason\tgenerations\telapsed_seconds\terror\n";
    for (const RunSummary& r : rep.runs) {
        os << r.name << '\t' << r.seed << '\t' << (r.ok ? 1 : 0) << '\t' << format_double(r.final_quality) << '\t'
           << r.archive_size << '\t' << (r.ok ? to_string(r.stop_reason) : "-") << '\t'
           << r.trace.generations.size() << '\t' << format_double(r.elapsed_seconds) << '\t'
           << (r.error.empty() ? "-" : r.error) << '\n';
    }
}

/// Long format: quality against time for every run.
inline void write_comparison_traces_tsv(const ComparisonReport& rep, std::ostream& os) {
    os << "name\tseed\tgeneration\telapsed_seconds\tquality\tarchive_size\n";
    for (const RunSummary& r : rep.runs) {
        for (const GenerationStats& g : r.trace.generations) {
            os << r.name << '\t' << r.seed << '\t' << g.generation << '\t' << format_double(g.elapsed_seconds)
               << '\t' << format_double(g.quality) << '\t' << g.archive_size << '\n';
        }
    }
}

/// Median and IQR of final quality per config.
inline void write_comparison_summary_tsv(const ComparisonReport& rep, std::ostream& os) {
    os << "name\truns\tfailures\tmedian\tq1\tq3\tiqr\tmean\n";
    for (const StrategySummary& s : rep.summary) {
        os << s.name << '\t' << s.quality.n << '\t' << s.failures << '\t' << format_double(s.quality.median) << '\t'
           << format_double(s.quality.q1) << '\t' << format_double(s.quality.q3) << '\t'
           << format_double(s.quality.iqr()) << '\t' << format_double(s.quality.mean) << '\n';
    }
}

inline nlohmann::json to_json(const ComparisonReport& rep) {
    nlohmann::json summary = nlohmann::json::array();
    for (const StrategySummary& s : rep.summary)
        summary.push_back({{"name", s.name}, {"failures", s.failures}, {"final_quality", to_json(s.quality)}});
    nlohmann::json runs = nlohmann::json::array();
    for (const RunSummary& r : rep.runs) {
        nlohmann::json j{{"name", r.name}, {"seed", r.seed}, {"ok", r.ok}};
        if (r.ok) {
            j["final_quality"] = r.final_quality;
            j["archive_size"] = r.archive_size;
            j["stop_reason"] = to_string(r.stop_reason);
            j["generations"] = r.trace.generations.size();
        } else {
            j["error"] = r.error;
        }
        runs.push_back(std::move(j));
    }
    return {{"time_budget_seconds", rep.time_budget_seconds}, {"summary", summary}, {"runs", runs}};
}

/// Writes summary.json, summary.tsv, runs.tsv and traces.tsv into `dir`.
inline void emit_comparison(const std::filesystem::path& dir, const ComparisonReport& rep) {
    std::filesystem::create_directories(dir);
    {
        auto out = detail::open_out(dir / "summary.json");
        out << to_json(rep).dump(2) << '\n';
    }
    {
        auto out = detail::open_out(dir / "summary.tsv");
        write_comparison_summary_tsv(rep, out);
    }
    {
        auto out = detail::open_out(dir / "runs.tsv");
        write_comparison_runs_tsv(rep, out);
    }
    {
        auto out = detail::open_out(dir / "traces.tsv");
        write_comparison_traces_tsv(rep, out);
    }
}

}  // namespace seqforge
