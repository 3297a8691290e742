#pragma once

// Archive-relative fitness functions. Both are pure reads of the archive.

#include <algorithm>
#include <string_view>
#include <vector>

#include "seqforge/archive.hpp"
#include "seqforge/error.hpp"

namespace seqforge {

enum class FitnessKind { BinFiller, Iad };

constexpr std::string_view to_string(FitnessKind k) noexcept {
    return k == FitnessKind::BinFiller ? "bin-filler" : "iad";
}

inline FitnessKind parse_fitness_kind(std::string_view s) {
    if (s == "bin-filler" || s == "bin_filler" || s == "bf") return FitnessKind::BinFiller;
    if (s == "iad") return FitnessKind::Iad;
    throw ConfigError("unknown fitness function '" + std::string(s) + "'");
}

struct FitnessValue {
    double value = 0.0;
    FitnessKind function = FitnessKind::BinFiller;
};

/// 1 - count(bin) / T, floored at 0. Remaining capacity share of the bin.
inline FitnessValue bin_filler(double prediction, const Archive& archive) {
    const std::size_t b = archive.bin_of(prediction);
    const double v = 1.0 - static_cast<double>(archive.count_in_bin(b)) / archive.params().bin_target();
    return {std::max(0.0, v), FitnessKind::BinFiller};
}

/// Change in normalized bin diversity if the candidate were admitted.
inline FitnessValue iad(double prediction, const Archive& archive) {
    const std::size_t b = archive.bin_of(prediction);
    std::vector<std::size_t> counts(archive.bin_counts().begin(), archive.bin_counts().end());
    const double before = shannon_diversity(counts);
    ++counts[b];
    return {shannon_diversity(counts) - before, FitnessKind::Iad};
}

inline FitnessValue evaluate_fitness(FitnessKind kind, double prediction, const Archive& archive) {
    return kind == FitnessKind::BinFiller ? bin_filler(prediction, archive) : iad(prediction, archive);
}

}  // namespace seqforge
