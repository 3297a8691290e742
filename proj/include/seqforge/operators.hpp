#pragma once

// Selection (tournament, lexicase) and variation (list crossover, standard
// add/remove/replace mutation, proximity mutation) over genotypes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "seqforge/error.hpp"
#include "seqforge/grammar.hpp"
#include "seqforge/seqdiff.hpp"

namespace seqforge {

enum class SelectionMethod { Tournament, Lexicase };

struct OperatorConfig {
    SelectionMethod selection_method = SelectionMethod::Tournament;
    std::size_t tournament_size = 5;
    double crossover_probability = 0.25;
    double mutation_probability = 0.7;
    bool use_custom_mutation = true;
    double custom_mutation_weight = 0.8;  // share of mutations that are proximity mutations
    double proximity_sigma = 4.0;         // standard deviation, in nucleotides

    double effective_custom_weight() const noexcept {
        return use_custom_mutation ? custom_mutation_weight : 0.0;
    }

    void check() const {
        auto unit = [](double p) { return p >= 0.0 && p <= 1.0; };
        if (tournament_size < 1) throw ConfigError("tournament_size must be >= 1");
        if (!unit(crossover_probability)) throw ConfigError("crossover_probability not in [0,1]");
        if (!unit(mutation_probability)) throw ConfigError("mutation_probability not in [0,1]");
        if (!unit(custom_mutation_weight)) throw ConfigError("custom_mutation_weight not in [0,1]");
        if (!(proximity_sigma > 0.0)) throw ConfigError("proximity_sigma must be positive");
    }
};

/// What selection sees of an individual.
struct Candidate {
    double fitness = 0.0;
    std::size_t diff_weight = 0;
};

// ---------------------------------------------------------------------------
// Selection

namespace detail {

// Strict "a beats b": higher fitness, then lower diff weight, then lower index.
inline bool beats(std::span<const Candidate> pop, std::size_t a, std::size_t b) noexcept {
    if (pop[a].fitness != pop[b].fitness) return pop[a].fitness > pop[b].fitness;
    if (pop[a].diff_weight != pop[b].diff_weight) return pop[a].diff_weight < pop[b].diff_weight;
    return a < b;
}

}  // namespace detail

/// k draws with replacement; returns the index of the best drawn individual.
template <class Rng>
std::size_t tournament_select(std::span<const Candidate> pop, std::size_t k, Rng& rng) {
    if (pop.empty()) throw Error("tournament_select on empty population");
    std::uniform_int_distribution<std::size_t> draw(0, pop.size() - 1);
    std::size_t best = draw(rng);
    for (std::size_t i = 1; i < k; ++i) {
        const std::size_t cur = draw(rng);
        if (detail::beats(pop, cur, best)) best = cur;
    }
    return best;
}

/// Lexicase over two objectives (maximize fitness, minimize diff weight) in a
/// random order, exact-equality filtering, uniform pick among survivors.
template <class Rng>
std::size_t lexicase_select(std::span<const Candidate> pop, Rng& rng) {
    if (pop.empty()) throw Error("lexicase_select on empty population");
    std::vector<std::size_t> pool(pop.size());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::array<int, 2> objectives{0, 1};
    std::shuffle(objectives.begin(), objectives.end(), rng);
    for (int obj : objectives) {
        if (pool.size() == 1) break;
        if (obj == 0) {
            double best = pop[pool.front()].fitness;
            for (std::size_t i : pool) best = std::max(best, pop[i].fitness);
            std::erase_if(pool, [&](std::size_t i) { return pop[i].fitness != best; });
        } else {
            std::size_t best = pop[pool.front()].diff_weight;
            for (std::size_t i : pool) best = std::min(best, pop[i].diff_weight);
            std::erase_if(pool, [&](std::size_t i) { return pop[i].diff_weight != best; });
        }
    }
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
}

template <class Rng>
std::size_t select(const OperatorConfig& cfg, std::span<const Candidate> pop, Rng& rng) {
    return cfg.selection_method == SelectionMethod::Lexicase
               ? lexicase_select(pop, rng)
               : tournament_select(pop, cfg.tournament_size, rng);
}

// ---------------------------------------------------------------------------
// Crossover

namespace detail {

// head(own)[0, split_own) + other[split_other, end), overlaps resolved and
// trimmed to max_units by dropping swapped-in tail units from the end.
inline Genotype splice_child(const Genotype& own, std::size_t split_own, const Genotype& other,
                             std::size_t split_other, std::size_t max_units) {
    std::vector<DiffUnit> units;
    std::vector<bool> from_tail;
    for (std::size_t i = 0; i < split_own; ++i) {
        units.push_back(own[i]);
        from_tail.push_back(false);
    }
    for (std::size_t i = split_other; i < other.size(); ++i) {
        units.push_back(other[i]);
        from_tail.push_back(true);
    }
    std::vector<std::size_t> kept = resolve_overlap_indices(units);
    while (kept.size() > max_units) {
        auto it = std::find_if(kept.rbegin(), kept.rend(), [&](std::size_t i) { return from_tail[i]; });
        if (it == kept.rend()) {
            kept.pop_back();
        } else {
            kept.erase(std::next(it).base());
        }
    }
    std::vector<DiffUnit> out;
    out.reserve(kept.size());
    for (std::size_t i : kept) out.push_back(units[i]);
    return Genotype(std::move(out));
}

}  // namespace detail

/// Deterministic tail swap at the given split indices. Children may be empty.
inline std::pair<Genotype, Genotype> crossover_at(const Genotype& a, const Genotype& b,
                                                  std::size_t split_a, std::size_t split_b,
                                                  std::size_t max_units) {
    split_a = std::min(split_a, a.size());
    split_b = std::min(split_b, b.size());
    return {detail::splice_child(a, split_a, b, split_b, max_units),
            detail::splice_child(b, split_b, a, split_a, max_units)};
}

/// List crossover with random split points. An emptied child inherits one
/// uniformly chosen unit from either parent.
template <class Rng>
std::pair<Genotype, Genotype> crossover(const Genotype& a, const Genotype& b,
                                        const GrammarConfig& cfg, Rng& rng) {
    const std::size_t split_a = std::uniform_int_distribution<std::size_t>(0, a.size())(rng);
    const std::size_t split_b = std::uniform_int_distribution<std::size_t>(0, b.size())(rng);
    auto children = crossover_at(a, b, split_a, split_b, cfg.max_diff_units);
    auto refill = [&](Genotype& child) {
        if (!child.empty()) return;
        const std::size_t pick =
            std::uniform_int_distribution<std::size_t>(0, a.size() + b.size() - 1)(rng);
        child = Genotype({pick < a.size() ? a[pick] : b[pick - a.size()]});
    };
    refill(children.first);
    refill(children.second);
    return children;
}

// ---------------------------------------------------------------------------
// Mutation

enum class MutationMove { Add, Remove, Replace };

/// Adds, removes or replaces exactly one unit, choosing uniformly among the
/// moves applicable to the genotype's size.
template <class Rng>
Genotype mutate_standard(const Genotype& g, const GrammarConfig& cfg, const PositionDomain& domain,
                         Rng& rng) {
    std::vector<MutationMove> moves;
    if (g.size() < cfg.max_diff_units) moves.push_back(MutationMove::Add);
    if (g.size() > 1) moves.push_back(MutationMove::Remove);
    moves.push_back(MutationMove::Replace);
    const MutationMove move = moves[detail::uniform_index(moves.size(), rng)];

    std::vector<DiffUnit> units = g.units();
    switch (move) {
        case MutationMove::Add: {
            if (auto u = sample_free_unit(cfg, domain, units, rng)) units.push_back(std::move(*u));
            break;
        }
        case MutationMove::Remove:
            units.erase(units.begin() + static_cast<std::ptrdiff_t>(detail::uniform_index(units.size(), rng)));
            break;
        case MutationMove::Replace: {
            const std::size_t idx = detail::uniform_index(units.size(), rng);
            std::vector<DiffUnit> others = units;
            others.erase(others.begin() + static_cast<std::ptrdiff_t>(idx));
            if (auto u = sample_free_unit(cfg, domain, others, rng)) {
                others.push_back(std::move(*u));
                units = std::move(others);
            }
            break;
        }
    }
    return Genotype(std::move(units));
}

/// Moves one uniformly chosen unit to round(Normal(old position, sigma)),
/// keeping its kind and payload. Falls back to a uniform valid position after
/// kMaxResampleAttempts rejected draws; unchanged if no position is free.
template <class Rng>
Genotype mutate_proximity(const Genotype& g, const PositionDomain& domain, double sigma, Rng& rng) {
    if (g.empty()) return g;
    const std::size_t idx = detail::uniform_index(g.size(), rng);
    std::vector<DiffUnit> others = g.units();
    DiffUnit unit = others[idx];
    others.erase(others.begin() + static_cast<std::ptrdiff_t>(idx));
    const auto old_pos = static_cast<double>(position(unit));

    auto fits = [&](const DiffUnit& u) {
        return domain.admits(u) && std::none_of(others.begin(), others.end(), [&](const DiffUnit& o) {
                   return units_overlap(o, u);
               });
    };
    auto finish = [&](DiffUnit u) {
        others.push_back(std::move(u));
        return Genotype(std::move(others));
    };

    std::normal_distribution<double> step(old_pos, sigma > 0.0 ? sigma : 1.0);
    for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
        const double v = sigma > 0.0 ? std::round(step(rng)) : old_pos;
        if (v < 0.0) continue;
        DiffUnit moved = unit;
        set_position(moved, static_cast<std::size_t>(v));
        if (fits(moved)) return finish(std::move(moved));
    }

    std::vector<std::size_t> free_positions;
    for (std::size_t p : domain.positions(kind(unit))) {
        DiffUnit moved = unit;
        set_position(moved, p);
        if (fits(moved)) free_positions.push_back(p);
    }
    if (free_positions.empty()) return g;
    set_position(unit, free_positions[detail::uniform_index(free_positions.size(), rng)]);
    return finish(std::move(unit));
}

}  // namespace seqforge
