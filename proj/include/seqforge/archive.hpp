#pragma once

// Binned archive of admitted sequences and its quality metrics.
//
// The prediction range [0,1] is split into N equal bins; each bin is further
// split into equal sub-bins for the intra-bin diversity term. Quality is
//
//   Q = w_size * min(size / S, 1) + w_div * Dn + w_intra * Dn_per_bin + w_low * F_low
//
// where Dn is the Shannon diversity of bin counts normalized by ln N,
// Dn_per_bin the mean over all N bins of the normalized sub-bin diversity and
// F_low the fraction of bins holding at least `low_count_threshold` records.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "seqforge/error.hpp"
#include "seqforge/seqdiff.hpp"

namespace seqforge {

struct QualityWeights {
    double size = 0.3;
    double diversity = 0.3;
    double intra_bin = 0.2;
    double low_count = 0.2;
    friend bool operator==(const QualityWeights&, const QualityWeights&) = default;
};

struct ArchiveParams {
    std::size_t capacity = 5000;  // S
    std::size_t bin_count = 40;   // N
    std::size_t low_count_threshold = 10;
    std::size_t sub_bins_per_bin = 10;
    QualityWeights weights;

    double bin_width() const noexcept { return 1.0 / static_cast<double>(bin_count); }
    /// Target records per bin, T = S / N.
    double bin_target() const noexcept {
        return static_cast<double>(capacity) / static_cast<double>(bin_count);
    }

    void check() const {
        if (capacity < 1) throw ConfigError("archive capacity must be >= 1");
        if (bin_count < 1) throw ConfigError("bin count must be >= 1");
        if (sub_bins_per_bin < 1) throw ConfigError("sub_bins_per_bin must be >= 1");
    }
    friend bool operator==(const ArchiveParams&, const ArchiveParams&) = default;
};

inline void require_prediction(double prediction) {
    if (!(prediction >= 0.0 && prediction <= 1.0)) {
        throw OutOfRange("prediction " + std::to_string(prediction) + " outside [0,1]");
    }
}

/// floor(prediction * N), with 1.0 folded into the top bin.
inline std::size_t bin_index(double prediction, std::size_t bin_count) {
    require_prediction(prediction);
    const auto b = static_cast<std::size_t>(std::floor(prediction * static_cast<double>(bin_count)));
    return std::min(b, bin_count - 1);
}

/// Sub-bin of a prediction inside its bin, in [0, sub_bins).
inline std::size_t sub_bin_index(double prediction, std::size_t bin_count, std::size_t sub_bins) {
    const std::size_t b = bin_index(prediction, bin_count);
    const double fine = std::floor(prediction * static_cast<double>(bin_count * sub_bins));
    const double offset = fine - static_cast<double>(b * sub_bins);
    if (offset <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(offset), sub_bins - 1);
}

/// Shannon diversity of `counts` normalized by ln(counts.size()).
/// Empty input, all-zero counts and a single category give 0.
inline double shannon_diversity(std::span<const std::size_t> counts) {
    if (counts.size() < 2) return 0.0;
    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    if (total == 0) return 0.0;
    const double t = static_cast<double>(total);
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / t;
        h -= p * std::log(p);
    }
    return h / std::log(static_cast<double>(counts.size()));
}

struct ArchiveRecord {
    std::string sequence;
    std::string genotype;  // text form
    double prediction = 0.0;
    std::size_t bin = 0;
    std::size_t generation = 0;
    std::uint64_t seed = 0;
    friend bool operator==(const ArchiveRecord&, const ArchiveRecord&) = default;
};

enum class Admission { Admitted, NonPositiveFitness, Duplicate, BinFull, ArchiveFull };

constexpr std::string_view to_string(Admission a) noexcept {
    switch (a) {
        case Admission::Admitted: return "admitted";
        case Admission::NonPositiveFitness: return "non-positive-fitness";
        case Admission::Duplicate: return "duplicate";
        case Admission::BinFull: return "bin-full";
        case Admission::ArchiveFull: return "archive-full";
    }
    return "?";
}

struct ArchiveMetrics {
    std::size_t size = 0;
    double size_fraction = 0.0;
    double diversity = 0.0;
    double intra_bin_diversity = 0.0;
    double low_count_fraction = 0.0;
    double quality = 0.0;
    friend bool operator==(const ArchiveMetrics&, const ArchiveMetrics&) = default;
};

class Archive {
public:
    explicit Archive(ArchiveParams params = {}) : params_(params) {
        params_.check();
        bin_counts_.assign(params_.bin_count, 0);
        sub_counts_.assign(params_.bin_count * params_.sub_bins_per_bin, 0);
    }

    const ArchiveParams& params() const noexcept { return params_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    bool full() const noexcept { return records_.size() >= params_.capacity; }

    const std::vector<ArchiveRecord>& records() const noexcept { return records_; }
    std::span<const std::size_t> bin_counts() const noexcept { return bin_counts_; }
    std::span<const std::size_t> sub_bin_counts(std::size_t bin) const noexcept {
        return std::span<const std::size_t>(sub_counts_).subspan(bin * params_.sub_bins_per_bin,
                                                                  params_.sub_bins_per_bin);
    }
    std::size_t bin_of(double prediction) const { return bin_index(prediction, params_.bin_count); }
    std::size_t count_in_bin(std::size_t bin) const { return bin_counts_.at(bin); }
    bool contains(const std::string& sequence) const { return seen_.contains(sequence); }

    /// Admits iff fitness > 0, the sequence is new, its bin holds fewer than
    /// T = S/N records and the archive holds fewer than S. The record's bin is
    /// recomputed from its prediction.
    Admission try_admit(ArchiveRecord record, double fitness) {
        require_prediction(record.prediction);
        if (!(fitness > 0.0)) return Admission::NonPositiveFitness;
        if (seen_.contains(record.sequence)) return Admission::Duplicate;
        const std::size_t b = bin_of(record.prediction);
        if (static_cast<double>(bin_counts_[b]) >= params_.bin_target()) return Admission::BinFull;
        if (full()) return Admission::ArchiveFull;
        insert(std::move(record), b);
        return Admission::Admitted;
    }

    /// Inserts without fitness or capacity checks, only deduplicating.
    /// Used when rescoring externally produced datasets.
    bool insert_unchecked(ArchiveRecord record) {
        require_prediction(record.prediction);
        if (seen_.contains(record.sequence)) return false;
        const std::size_t b = bin_of(record.prediction);
        insert(std::move(record), b);
        return true;
    }

    double low_count_fraction() const noexcept {
        const auto ok = std::count_if(bin_counts_.begin(), bin_counts_.end(), [&](std::size_t c) {
            return c >= params_.low_count_threshold;
        });
        return static_cast<double>(ok) / static_cast<double>(params_.bin_count);
    }

    double diversity() const { return shannon_diversity(bin_counts_); }

    double intra_bin_diversity() const {
        double sum = 0.0;
        for (std::size_t b = 0; b < params_.bin_count; ++b) sum += shannon_diversity(sub_bin_counts(b));
        return sum / static_cast<double>(params_.bin_count);
    }

    double size_fraction() const noexcept {
        return std::min(1.0, static_cast<double>(size()) / static_cast<double>(params_.capacity));
    }

    ArchiveMetrics metrics() const {
        ArchiveMetrics m;
        m.size = size();
        m.size_fraction = size_fraction();
        m.diversity = diversity();
        m.intra_bin_diversity = intra_bin_diversity();
        m.low_count_fraction = low_count_fraction();
        const QualityWeights& w = params_.weights;
        m.quality = w.size * m.size_fraction + w.diversity * m.diversity +
                    w.intra_bin * m.intra_bin_diversity + w.low_count * m.low_count_fraction;
        return m;
    }

    double quality() const { return metrics().quality; }

private:
    void insert(ArchiveRecord record, std::size_t b) {
        record.bin = b;
        const std::size_t sb =
            sub_bin_index(record.prediction, params_.bin_count, params_.sub_bins_per_bin);
        ++bin_counts_[b];
        ++sub_counts_[b * params_.sub_bins_per_bin + sb];
        seen_.insert(record.sequence);
        records_.push_back(std::move(record));
    }

    ArchiveParams params_;
    std::vector<ArchiveRecord> records_;
    std::vector<std::size_t> bin_counts_;
    std::vector<std::size_t> sub_counts_;
    std::unordered_set<std::string> seen_;
};

inline double shannon_diversity(const Archive& a) { return a.diversity(); }
inline double intra_bin_diversity(const Archive& a) { return a.intra_bin_diversity(); }
inline double low_count_fraction(const Archive& a) { return a.low_count_fraction(); }
inline double quality(const Archive& a) { return a.quality(); }

// ---------------------------------------------------------------------------
// Dataset TSV

inline constexpr std::string_view kDatasetHeader = "id\tgenotype\tsequence\tprediction\tbin\tgeneration\tseed";

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// Writes records in admission order; `id` is the admission index.
inline void write_dataset_tsv(const Archive& archive, std::ostream& os) {
    os << kDatasetHeader << '\n';
    std::size_t id = 0;
    for (const ArchiveRecord& r : archive.records()) {
        os << id++ << '\t' << r.genotype << '\t' << r.sequence << '\t' << format_double(r.prediction)
           << '\t' << r.bin << '\t' << r.generation << '\t' << r.seed << '\n';
    }
}

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        out.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return out;
}

template <class T>
T parse_field(std::string_view s, std::size_t line, std::string_view name) {
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw SchemaError(line, "bad " + std::string(name) + " '" + std::string(s) + "'");
    }
    return value;
}

}  // namespace detail

/// Reads a dataset TSV. Checks the header, field count, alphabet, genotype
/// syntax, prediction range and bin consistency for `bin_count` bins.
inline std::vector<ArchiveRecord> read_dataset_tsv(std::istream& is, std::size_t bin_count) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(is, line)) throw SchemaError(1, "missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kDatasetHeader) throw SchemaError(1, "unexpected header");
    std::vector<ArchiveRecord> out;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = detail::split_tabs(line);
        if (f.size() != 7) throw SchemaError(lineno, "expected 7 fields, got " + std::to_string(f.size()));
        ArchiveRecord r;
        detail::parse_field<std::size_t>(f[0], lineno, "id");
        r.genotype = std::string(f[1]);
        r.sequence = std::string(f[2]);
        r.prediction = detail::parse_field<double>(f[3], lineno, "prediction");
        r.bin = detail::parse_field<std::size_t>(f[4], lineno, "bin");
        r.generation = detail::parse_field<std::size_t>(f[5], lineno, "generation");
        r.seed = detail::parse_field<std::uint64_t>(f[6], lineno, "seed");
        if (!(r.prediction >= 0.0 && r.prediction <= 1.0))
            throw SchemaError(lineno, "prediction " + std::string(f[3]) + " outside [0,1]");
        if (r.bin != bin_index(r.prediction, bin_count))
            throw SchemaError(lineno, "bin does not match prediction");
        try {
            require_alphabet(r.sequence);
            if (r.sequence.empty()) throw BadAlphabet("empty sequence");
            if (!r.genotype.empty() && r.genotype != "-") parse_genotype(r.genotype);
        } catch (const Error& e) {
            throw SchemaError(lineno, e.what());
        }
        out.push_back(std::move(r));
    }
    return out;
}

/// Rebuilds an archive from exported records, enforcing the archive
/// invariants (no duplicates, per-bin and total capacity).
inline Archive import_archive(const std::vector<ArchiveRecord>& records, const ArchiveParams& params) {
    Archive a(params);
    std::size_t lineno = 1;
    for (const ArchiveRecord& r : records) {
        ++lineno;
        const Admission res = a.try_admit(r, 1.0);
        if (res != Admission::Admitted) {
            throw SchemaError(lineno, "record violates archive invariant: " + std::string(to_string(res)));
        }
    }
    return a;
}

}  // namespace seqforge
