#pragma once

// Diff-based genotype representation: a short list of non-overlapping
// perturbations (SNV, insertion, deletion) expressed in the coordinates of a
// fixed reference sequence, and its application to that reference.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "seqforge/error.hpp"

namespace seqforge {

enum class Nucleotide : std::uint8_t { A, C, G, T };

inline constexpr Nucleotide kNucleotides[] = {Nucleotide::A, Nucleotide::C, Nucleotide::G,
                                              Nucleotide::T};

constexpr char to_char(Nucleotide n) noexcept { return "ACGT"[static_cast<int>(n)]; }

constexpr bool is_nucleotide(char c) noexcept {
    return c == 'A' || c == 'C' || c == 'G' || c == 'T';
}

inline Nucleotide nucleotide_from_char(char c) {
    switch (c) {
        case 'A': return Nucleotide::A;
        case 'C': return Nucleotide::C;
        case 'G': return Nucleotide::G;
        case 'T': return Nucleotide::T;
        default: break;
    }
    throw BadAlphabet(std::string("not a nucleotide: '") + c + "'");
}

inline void require_alphabet(std::string_view seq) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (!is_nucleotide(seq[i])) {
            throw BadAlphabet("invalid symbol '" + std::string(1, seq[i]) + "' at index " +
                              std::to_string(i));
        }
    }
}

/// Inclusive index interval [first, last].
struct Interval {
    std::size_t first = 0;
    std::size_t last = 0;

    constexpr std::size_t length() const noexcept { return last - first + 1; }
    constexpr bool contains(std::size_t i) const noexcept { return first <= i && i <= last; }
    constexpr bool overlaps(const Interval& o) const noexcept {
        return first <= o.last && o.first <= last;
    }
    friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

// ---------------------------------------------------------------------------
// Diff units

struct Snv {
    std::size_t pos = 0;
    Nucleotide nuc = Nucleotide::A;
    friend bool operator==(const Snv&, const Snv&) = default;
};

/// Nucleotides are placed immediately before reference index `pos`;
/// pos == len(reference) appends.
struct Insertion {
    std::size_t pos = 0;
    std::vector<Nucleotide> nucs;
    friend bool operator==(const Insertion&, const Insertion&) = default;
};

struct Deletion {
    std::size_t pos = 0;
    std::size_t size = 1;
    friend bool operator==(const Deletion&, const Deletion&) = default;
};

using DiffUnit = std::variant<Snv, Insertion, Deletion>;

enum class UnitKind : std::uint8_t { Snv = 0, Insertion = 1, Deletion = 2 };

inline constexpr UnitKind kUnitKinds[] = {UnitKind::Snv, UnitKind::Insertion, UnitKind::Deletion};

constexpr std::string_view kind_name(UnitKind k) noexcept {
    switch (k) {
        case UnitKind::Snv: return "SNV";
        case UnitKind::Insertion: return "Ins";
        case UnitKind::Deletion: return "Del";
    }
    return "?";
}

inline UnitKind kind(const DiffUnit& u) noexcept { return static_cast<UnitKind>(u.index()); }

inline std::size_t position(const DiffUnit& u) noexcept {
    return std::visit([](const auto& v) { return v.pos; }, u);
}

inline void set_position(DiffUnit& u, std::size_t pos) noexcept {
    std::visit([pos](auto& v) { v.pos = pos; }, u);
}

/// Reference interval a unit occupies for overlap and restriction checks.
/// Insertions occupy the single index they are placed before.
inline Interval affected_interval(const DiffUnit& u) noexcept {
    if (const auto* d = std::get_if<Deletion>(&u)) return {d->pos, d->pos + d->size - 1};
    const std::size_t p = position(u);
    return {p, p};
}

/// Number of nucleotides the unit edits.
inline std::size_t unit_weight(const DiffUnit& u) noexcept {
    return std::visit(
        [](const auto& v) -> std::size_t {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Snv>) return 1;
            else if constexpr (std::is_same_v<T, Insertion>) return v.nucs.size();
            else return v.size;
        },
        u);
}

inline bool units_overlap(const DiffUnit& a, const DiffUnit& b) noexcept {
    return affected_interval(a).overlaps(affected_interval(b));
}

// ---------------------------------------------------------------------------
// Reference context

/// Offsets (relative to the splice site) of the region where no unit may land.
struct RestrictionOffsets {
    std::size_t acceptor_upstream = 10;
    std::size_t acceptor_downstream = 2;
    std::size_t donor_upstream = 3;
    std::size_t donor_downstream = 6;
    friend bool operator==(const RestrictionOffsets&, const RestrictionOffsets&) = default;
};

class ReferenceContext {
public:
    ReferenceContext(std::string sequence, std::vector<std::size_t> acceptors,
                     std::vector<std::size_t> donors, RestrictionOffsets offsets = {})
        : sequence_(std::move(sequence)),
          acceptors_(std::move(acceptors)),
          donors_(std::move(donors)),
          offsets_(offsets) {
        require_alphabet(sequence_);
        if (sequence_.empty()) throw InvalidGenotype("reference sequence is empty");
        const std::size_t n = sequence_.size();
        std::vector<Interval> raw;
        for (std::size_t a : acceptors_) {
            if (a >= n) throw CoordinateOutOfBounds("acceptor " + std::to_string(a) + " outside sequence");
            raw.push_back(clip(a, offsets_.acceptor_upstream, offsets_.acceptor_downstream));
        }
        for (std::size_t d : donors_) {
            if (d >= n) throw CoordinateOutOfBounds("donor " + std::to_string(d) + " outside sequence");
            raw.push_back(clip(d, offsets_.donor_upstream, offsets_.donor_downstream));
        }
        std::sort(raw.begin(), raw.end(),
                  [](const Interval& x, const Interval& y) { return x.first < y.first; });
        for (const Interval& iv : raw) {
            if (!restricted_.empty() && iv.first <= restricted_.back().last + 1) {
                restricted_.back().last = std::max(restricted_.back().last, iv.last);
            } else {
                restricted_.push_back(iv);
            }
        }
        prefix_.assign(n + 1, 0);
        std::vector<std::uint8_t> mask(n, 0);
        for (const Interval& iv : restricted_)
            for (std::size_t i = iv.first; i <= iv.last; ++i) mask[i] = 1;
        for (std::size_t i = 0; i < n; ++i) prefix_[i + 1] = prefix_[i] + mask[i];
    }

    const std::string& sequence() const noexcept { return sequence_; }
    std::size_t length() const noexcept { return sequence_.size(); }
    const std::vector<std::size_t>& acceptors() const noexcept { return acceptors_; }
    const std::vector<std::size_t>& donors() const noexcept { return donors_; }
    const RestrictionOffsets& offsets() const noexcept { return offsets_; }

    /// Merged, sorted, non-adjacent restricted intervals.
    const std::vector<Interval>& restricted_regions() const noexcept { return restricted_; }

    bool is_restricted(std::size_t i) const noexcept {
        return i < length() && prefix_[i + 1] != prefix_[i];
    }

    /// True when any index of `iv` inside the sequence is restricted.
    bool touches_restricted(Interval iv) const noexcept {
        if (iv.first >= length()) return false;
        const std::size_t last = std::min(iv.last, length() - 1);
        return prefix_[last + 1] != prefix_[iv.first];
    }

private:
    Interval clip(std::size_t site, std::size_t up, std::size_t down) const noexcept {
        const std::size_t first = site >= up ? site - up : 0;
        const std::size_t last = std::min(site + down, sequence_.size() - 1);
        return {first, last};
    }

    std::string sequence_;
    std::vector<std::size_t> acceptors_;
    std::vector<std::size_t> donors_;
    RestrictionOffsets offsets_;
    std::vector<Interval> restricted_;
    std::vector<std::size_t> prefix_;
};

// ---------------------------------------------------------------------------
// Genotype

/// Ordered list of diff units, kept sorted by reference position.
/// Validity against a reference is checked by validate(), not here.
class Genotype {
public:
    Genotype() = default;
    explicit Genotype(std::vector<DiffUnit> units) : units_(std::move(units)) {
        std::stable_sort(units_.begin(), units_.end(), [](const DiffUnit& a, const DiffUnit& b) {
            return position(a) < position(b);
        });
    }

    const std::vector<DiffUnit>& units() const noexcept { return units_; }
    std::size_t size() const noexcept { return units_.size(); }
    bool empty() const noexcept { return units_.empty(); }
    const DiffUnit& operator[](std::size_t i) const { return units_[i]; }

    friend bool operator==(const Genotype&, const Genotype&) = default;

private:
    std::vector<DiffUnit> units_;
};

struct Phenotype {
    std::string sequence;
    std::size_t genotype_weight = 0;
};

inline std::size_t diff_weight(const Genotype& g) noexcept {
    std::size_t w = 0;
    for (const DiffUnit& u : g.units()) w += unit_weight(u);
    return w;
}

// ---------------------------------------------------------------------------
// Validation

struct ValidationLimits {
    std::size_t max_diff_units = 6;
    std::size_t max_insertion_size = 5;
    std::size_t max_deletion_size = 5;
};

enum class ViolationKind {
    UnitCount,
    OutOfRange,
    BadPayload,
    Unsorted,
    Overlap,
    RestrictedRegion,
};

struct Violation {
    ViolationKind kind;
    std::size_t unit = 0;  // index of the offending unit
    std::string message;
};

inline std::vector<Violation> validate(const Genotype& g, const ReferenceContext& ctx,
                                       const ValidationLimits& limits = {}) {
    std::vector<Violation> out;
    const std::size_t n = ctx.length();
    if (g.empty() || g.size() > limits.max_diff_units) {
        out.push_back({ViolationKind::UnitCount, 0,
                       "max_diff_units: genotype has " + std::to_string(g.size()) +
                           " units, allowed 1.." + std::to_string(limits.max_diff_units)});
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        const DiffUnit& u = g[i];
        bool in_range = true;
        if (const auto* s = std::get_if<Snv>(&u)) {
            in_range = s->pos < n;
        } else if (const auto* ins = std::get_if<Insertion>(&u)) {
            in_range = ins->pos <= n;
            if (ins->nucs.empty() || ins->nucs.size() > limits.max_insertion_size)
                out.push_back({ViolationKind::BadPayload, i, "insertion length out of bounds"});
        } else {
            const auto& d = std::get<Deletion>(u);
            in_range = d.size >= 1 && d.pos < n && d.pos + d.size <= n;
            if (d.size == 0 || d.size > limits.max_deletion_size)
                out.push_back({ViolationKind::BadPayload, i, "deletion size out of bounds"});
        }
        if (!in_range) {
            out.push_back({ViolationKind::OutOfRange, i, "position out of range"});
            continue;
        }
        if (ctx.touches_restricted(affected_interval(u)))
            out.push_back({ViolationKind::RestrictedRegion, i, "restricted region"});
        if (i > 0) {
            if (position(g[i - 1]) > position(u))
                out.push_back({ViolationKind::Unsorted, i, "units not sorted by position"});
            if (units_overlap(g[i - 1], u))
                out.push_back({ViolationKind::Overlap, i, "overlaps previous unit"});
        }
    }
    return out;
}

inline bool is_valid(const Genotype& g, const ReferenceContext& ctx,
                     const ValidationLimits& limits = {}) {
    return validate(g, ctx, limits).empty();
}

// ---------------------------------------------------------------------------
// Application

/// Materializes the genotype against the reference. Unit positions always
/// refer to the original reference; units are applied in ascending position.
inline Phenotype apply(const Genotype& g, const ReferenceContext& ctx,
                       const ValidationLimits& limits = {}) {
    if (auto v = validate(g, ctx, limits); !v.empty()) {
        throw InvalidGenotype("unit " + std::to_string(v.front().unit) + ": " + v.front().message);
    }
    const std::string& ref = ctx.sequence();
    Phenotype out;
    out.genotype_weight = diff_weight(g);
    out.sequence.reserve(ref.size() + out.genotype_weight);
    std::size_t cursor = 0;
    for (const DiffUnit& u : g.units()) {
        const std::size_t p = position(u);
        out.sequence.append(ref, cursor, p - cursor);
        if (const auto* s = std::get_if<Snv>(&u)) {
            out.sequence.push_back(to_char(s->nuc));
            cursor = p + 1;
        } else if (const auto* ins = std::get_if<Insertion>(&u)) {
            for (Nucleotide nuc : ins->nucs) out.sequence.push_back(to_char(nuc));
            cursor = p;
        } else {
            cursor = p + std::get<Deletion>(u).size;
        }
    }
    out.sequence.append(ref, cursor, std::string::npos);
    return out;
}

// ---------------------------------------------------------------------------
// Overlap resolution

namespace detail {

// Larger perturbation first, then indels over SNVs.
inline bool higher_priority(const DiffUnit& a, const DiffUnit& b) noexcept {
    const std::size_t wa = unit_weight(a), wb = unit_weight(b);
    if (wa != wb) return wa > wb;
    const bool indel_a = kind(a) != UnitKind::Snv, indel_b = kind(b) != UnitKind::Snv;
    return indel_a && !indel_b;
}

}  // namespace detail

/// Indices of the units that survive overlap resolution, sorted by position.
/// Among overlapping units the larger edit wins, then insertion/deletion over
/// SNV, then the earlier list index.
inline std::vector<std::size_t> resolve_overlap_indices(const std::vector<DiffUnit>& units) {
    std::vector<std::size_t> order(units.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return detail::higher_priority(units[i], units[j]);
    });
    std::vector<std::size_t> kept;
    kept.reserve(units.size());
    for (std::size_t i : order) {
        const bool clash = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
            return units_overlap(units[k], units[i]);
        });
        if (!clash) kept.push_back(i);
    }
    std::stable_sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) {
        return position(units[a]) < position(units[b]);
    });
    return kept;
}

inline std::vector<DiffUnit> resolve_overlaps(const std::vector<DiffUnit>& units) {
    std::vector<DiffUnit> out;
    for (std::size_t i : resolve_overlap_indices(units)) out.push_back(units[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Text form: "SNV(1,A);Ins(2,CG);Del(7,2)"

inline std::string to_string(const DiffUnit& u) {
    return std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            std::string s;
            if constexpr (std::is_same_v<T, Snv>) {
                s = "SNV(" + std::to_string(v.pos) + "," + to_char(v.nuc) + ")";
            } else if constexpr (std::is_same_v<T, Insertion>) {
                s = "Ins(" + std::to_string(v.pos) + ",";
                for (Nucleotide n : v.nucs) s.push_back(to_char(n));
                s += ")";
            } else {
                s = "Del(" + std::to_string(v.pos) + "," + std::to_string(v.size) + ")";
            }
            return s;
        },
        u);
}

inline std::string to_string(const Genotype& g) {
    std::string out;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i) out.push_back(';');
        out += to_string(g[i]);
    }
    return out;
}

namespace detail {

inline std::size_t parse_index(std::string_view s, std::string_view whole) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw InvalidGenotype("bad integer in unit '" + std::string(whole) + "'");
    return value;
}

}  // namespace detail

inline DiffUnit parse_unit(std::string_view text) {
    const auto open = text.find('(');
    const auto comma = text.find(',');
    if (open == std::string_view::npos || comma == std::string_view::npos || comma < open ||
        text.size() < 2 || text.back() != ')') {
        throw InvalidGenotype("malformed unit '" + std::string(text) + "'");
    }
    const std::string_view name = text.substr(0, open);
    const std::string_view first = text.substr(open + 1, comma - open - 1);
    const std::string_view second = text.substr(comma + 1, text.size() - comma - 2);
    const std::size_t pos = detail::parse_index(first, text);
    try {
        if (name == "SNV") {
            if (second.size() != 1) throw InvalidGenotype("SNV takes one nucleotide");
            return Snv{pos, nucleotide_from_char(second[0])};
        }
        if (name == "Ins") {
            if (second.empty()) throw InvalidGenotype("empty insertion");
            Insertion ins{pos, {}};
            for (char c : second) ins.nucs.push_back(nucleotide_from_char(c));
            return ins;
        }
        if (name == "Del") {
            const std::size_t size = detail::parse_index(second, text);
            if (size == 0) throw InvalidGenotype("empty deletion");
            return Deletion{pos, size};
        }
    } catch (const BadAlphabet& e) {
        throw InvalidGenotype("unit '" + std::string(text) + "': " + e.what());
    }
    throw InvalidGenotype("unknown unit kind '" + std::string(name) + "'");
}

/// Parses the semicolon-joined text form. Units are re-sorted by position.
inline Genotype parse_genotype(std::string_view text) {
    std::vector<DiffUnit> units;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find(';', start);
        const auto piece = text.substr(start, end == std::string_view::npos ? end : end - start);
        units.push_back(parse_unit(piece));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return Genotype(std::move(units));
}

}  // namespace seqforge
