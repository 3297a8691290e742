#pragma once

// Random sampling of diff units and genotypes under the perturbation grammar:
// 1..max_diff_units units, each an SNV, insertion or deletion, never touching
// a restricted region and never overlapping each other.

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "seqforge/error.hpp"
#include "seqforge/seqdiff.hpp"

namespace seqforge {

struct GrammarConfig {
    std::size_t max_diff_units = 6;
    std::size_t max_insertion_size = 5;
    std::size_t max_deletion_size = 5;
    double snv_weight = 0.05;
    double insertion_weight = 0.75;
    double deletion_weight = 0.3;
    std::array<bool, 3> excluded{false, false, false};  // indexed by UnitKind

    double weight(UnitKind k) const noexcept {
        switch (k) {
            case UnitKind::Snv: return snv_weight;
            case UnitKind::Insertion: return insertion_weight;
            case UnitKind::Deletion: return deletion_weight;
        }
        return 0.0;
    }
    bool is_excluded(UnitKind k) const noexcept { return excluded[static_cast<std::size_t>(k)]; }
    void exclude(UnitKind k) noexcept { excluded[static_cast<std::size_t>(k)] = true; }
    bool enabled(UnitKind k) const noexcept { return !is_excluded(k) && weight(k) > 0.0; }

    ValidationLimits limits() const noexcept {
        return {max_diff_units, max_insertion_size, max_deletion_size};
    }

    void check() const {
        if (max_diff_units < 1) throw ConfigError("max_diff_units must be >= 1");
        if (max_insertion_size < 1) throw ConfigError("max_insertion_size must be >= 1");
        if (max_deletion_size < 1) throw ConfigError("max_deletion_size must be >= 1");
        for (UnitKind k : kUnitKinds) {
            if (!(weight(k) >= 0.0)) throw ConfigError("grammar weights must be non-negative");
        }
        if (std::none_of(std::begin(kUnitKinds), std::end(kUnitKinds),
                         [this](UnitKind k) { return enabled(k); })) {
            throw ConfigError("grammar has no enabled node kind");
        }
    }
};

/// Valid positions per unit kind for one reference context.
class PositionDomain {
public:
    PositionDomain(const ReferenceContext& ctx, std::size_t max_deletion_size)
        : ctx_(&ctx), max_deletion_size_(max_deletion_size) {
        const std::size_t n = ctx.length();
        free_run_.assign(n + 1, 0);
        for (std::size_t i = n; i-- > 0;) {
            free_run_[i] = ctx.is_restricted(i) ? 0 : free_run_[i + 1] + 1;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!ctx.is_restricted(i)) snv_.push_back(i);
        }
        insertion_ = snv_;
        insertion_.push_back(n);
    }

    const ReferenceContext& context() const noexcept { return *ctx_; }
    std::size_t max_deletion_size() const noexcept { return max_deletion_size_; }

    /// Sorted candidate positions for a kind (deletions: valid start of a size-1 deletion).
    const std::vector<std::size_t>& positions(UnitKind k) const noexcept {
        return k == UnitKind::Insertion ? insertion_ : snv_;
    }

    bool empty(UnitKind k) const noexcept { return positions(k).empty(); }

    /// Number of consecutive unrestricted indices starting at `pos`.
    std::size_t free_run(std::size_t pos) const noexcept {
        return pos < free_run_.size() ? free_run_[pos] : 0;
    }

    /// Largest deletion that fits at `pos` (0 when none).
    std::size_t max_deletion_at(std::size_t pos) const noexcept {
        return std::min(free_run(pos), max_deletion_size_);
    }

    /// Whether the unit's own span is in range and unrestricted.
    bool admits(const DiffUnit& u) const noexcept {
        const std::size_t p = position(u);
        switch (kind(u)) {
            case UnitKind::Snv: return p < ctx_->length() && !ctx_->is_restricted(p);
            case UnitKind::Insertion: return p <= ctx_->length() && !ctx_->is_restricted(p);
            case UnitKind::Deletion: {
                const std::size_t size = std::get<Deletion>(u).size;
                return size >= 1 && free_run(p) >= size;
            }
        }
        return false;
    }

private:
    const ReferenceContext* ctx_;
    std::size_t max_deletion_size_;
    std::vector<std::size_t> free_run_;
    std::vector<std::size_t> snv_;
    std::vector<std::size_t> insertion_;
};

namespace detail {

template <class Rng>
std::size_t uniform_index(std::size_t n, Rng& rng) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

template <class Rng>
Nucleotide random_nucleotide(Rng& rng) {
    return kNucleotides[uniform_index(4, rng)];
}

}  // namespace detail

/// Samples one unit of `k` at a uniformly chosen valid position.
template <class Rng>
DiffUnit sample_unit(UnitKind k, const GrammarConfig& cfg, const PositionDomain& domain, Rng& rng) {
    const auto& candidates = domain.positions(k);
    if (candidates.empty()) {
        throw EmptySearchSpace(std::string("no valid position for ") + std::string(kind_name(k)));
    }
    const std::size_t pos = candidates[detail::uniform_index(candidates.size(), rng)];
    switch (k) {
        case UnitKind::Snv: return Snv{pos, detail::random_nucleotide(rng)};
        case UnitKind::Insertion: {
            Insertion ins{pos, {}};
            const std::size_t len =
                std::uniform_int_distribution<std::size_t>(1, cfg.max_insertion_size)(rng);
            for (std::size_t i = 0; i < len; ++i) ins.nucs.push_back(detail::random_nucleotide(rng));
            return ins;
        }
        case UnitKind::Deletion: {
            const std::size_t cap = std::min(domain.max_deletion_at(pos), cfg.max_deletion_size);
            const std::size_t size = std::uniform_int_distribution<std::size_t>(1, cap)(rng);
            return Deletion{pos, size};
        }
    }
    throw EmptySearchSpace("unknown unit kind");
}

/// Draws a kind proportionally to the normalized weights of the enabled kinds
/// that have at least one valid position.
template <class Rng>
UnitKind sample_kind(const GrammarConfig& cfg, const PositionDomain& domain, Rng& rng) {
    std::array<double, 3> w{};
    double total = 0.0;
    for (UnitKind k : kUnitKinds) {
        const auto i = static_cast<std::size_t>(k);
        w[i] = cfg.enabled(k) && !domain.empty(k) ? cfg.weight(k) : 0.0;
        total += w[i];
    }
    if (total <= 0.0) throw EmptySearchSpace("no enabled unit kind has a valid position");
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    return static_cast<UnitKind>(pick(rng));
}

template <class Rng>
DiffUnit sample_unit(const GrammarConfig& cfg, const PositionDomain& domain, Rng& rng) {
    return sample_unit(sample_kind(cfg, domain, rng), cfg, domain, rng);
}

inline constexpr int kMaxResampleAttempts = 100;

/// Samples a unit that does not overlap any of `others`; gives up after
/// kMaxResampleAttempts draws.
template <class Rng>
std::optional<DiffUnit> sample_free_unit(const GrammarConfig& cfg, const PositionDomain& domain,
                                         const std::vector<DiffUnit>& others, Rng& rng) {
    for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
        DiffUnit u = sample_unit(cfg, domain, rng);
        const bool clash = std::any_of(others.begin(), others.end(),
                                       [&](const DiffUnit& o) { return units_overlap(o, u); });
        if (!clash) return u;
    }
    return std::nullopt;
}

/// Random genotype: unit count uniform in [1, max_diff_units], overlaps
/// resolved, then topped up with non-overlapping draws.
template <class Rng>
Genotype sample_genotype(const GrammarConfig& cfg, const PositionDomain& domain, Rng& rng) {
    const std::size_t target =
        std::uniform_int_distribution<std::size_t>(1, cfg.max_diff_units)(rng);
    std::vector<DiffUnit> units;
    units.reserve(target);
    for (std::size_t i = 0; i < target; ++i) units.push_back(sample_unit(cfg, domain, rng));
    units = resolve_overlaps(units);
    for (int attempt = 0; units.size() < target && attempt < kMaxResampleAttempts; ++attempt) {
        DiffUnit u = sample_unit(cfg, domain, rng);
        const bool clash = std::any_of(units.begin(), units.end(),
                                       [&](const DiffUnit& o) { return units_overlap(o, u); });
        if (!clash) units.push_back(std::move(u));
    }
    return Genotype(std::move(units));
}

template <class Rng>
Genotype sample_genotype(const GrammarConfig& cfg, const ReferenceContext& ctx, Rng& rng) {
    const PositionDomain domain(ctx, cfg.max_deletion_size);
    return sample_genotype(cfg, domain, rng);
}

}  // namespace seqforge
