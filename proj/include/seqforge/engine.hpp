#pragma once

// Search drivers: the grammar-guided GP generational loop and the Random
// Search baseline, which shares the genotype encoding but replaces the whole
// population with fresh grammar samples every generation.
//
// One generation:
//   1. materialize every genotype against the reference
//   2. score the uncached sequences as one oracle batch
//   3. in population order, compute fitness against the live archive and try
//      to admit the record
//   4. stop on capacity / time / generation / evaluation limits
//   5. next population = elites + offspring of selection and variation +
//      fresh grammar samples, in that order

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "seqforge/archive.hpp"
#include "seqforge/error.hpp"
#include "seqforge/fitness.hpp"
#include "seqforge/grammar.hpp"
#include "seqforge/operators.hpp"
#include "seqforge/oracle.hpp"
#include "seqforge/seqdiff.hpp"
#include "seqforge/stats.hpp"

namespace seqforge {

enum class Strategy { Gggp, RandomSearch };

constexpr std::string_view to_string(Strategy s) noexcept {
    return s == Strategy::Gggp ? "gggp" : "rs";
}

inline Strategy parse_strategy(std::string_view s) {
    if (s == "gggp" || s == "gp") return Strategy::Gggp;
    if (s == "rs" || s == "random" || s == "random-search") return Strategy::RandomSearch;
    throw ConfigError("unknown strategy '" + std::string(s) + "'");
}

struct StoppingConfig {
    bool stop_at_capacity = true;
    double time_budget_seconds = 300.0;
    std::optional<std::size_t> max_generations;
    std::optional<std::size_t> max_evaluations;
};

struct EvolutionConfig {
    Strategy strategy = Strategy::Gggp;
    std::size_t population_size = 500;
    double genetic_operators_weight = 0.8;
    double elitism_weight = 0.0;
    double novelty_weight = 0.1;
    GrammarConfig grammar;
    OperatorConfig operators;
    ArchiveParams archive;
    FitnessKind fitness = FitnessKind::BinFiller;
    StoppingConfig stopping;
    std::uint64_t seed = 0;

    void check() const {
        if (population_size < 1) throw ConfigError("population_size must be >= 1");
        for (double w : {genetic_operators_weight, elitism_weight, novelty_weight}) {
            if (!(w >= 0.0)) throw ConfigError("replacement weights must be non-negative");
        }
        if (!(stopping.time_budget_seconds > 0.0)) throw ConfigError("time budget must be positive");
        grammar.check();
        operators.check();
        archive.check();
    }
};

struct ReplacementWeights {
    double operators = 1.0;
    double elitism = 0.0;
    double novelty = 0.0;
};

/// Weights as used by a run: Random Search is pure novelty; otherwise the
/// three weights are scaled to sum to 1 (all-zero means operators only).
inline ReplacementWeights normalized_weights(const EvolutionConfig& cfg) {
    if (cfg.strategy == Strategy::RandomSearch) return {0.0, 0.0, 1.0};
    const double sum = cfg.genetic_operators_weight + cfg.elitism_weight + cfg.novelty_weight;
    if (sum <= 0.0) return {1.0, 0.0, 0.0};
    return {cfg.genetic_operators_weight / sum, cfg.elitism_weight / sum, cfg.novelty_weight / sum};
}

struct ReplacementCounts {
    std::size_t elite = 0;
    std::size_t novelty = 0;
    std::size_t operators = 0;
    friend bool operator==(const ReplacementCounts&, const ReplacementCounts&) = default;
};

/// Rounded elite and novelty shares; the operator pool absorbs rounding.
inline ReplacementCounts replacement_counts(std::size_t population_size, const ReplacementWeights& w) {
    const auto p = static_cast<double>(population_size);
    ReplacementCounts c;
    c.elite = std::min(population_size, static_cast<std::size_t>(std::llround(w.elitism * p)));
    c.novelty = std::min(population_size - c.elite, static_cast<std::size_t>(std::llround(w.novelty * p)));
    c.operators = population_size - c.elite - c.novelty;
    return c;
}

enum class StopReason { Capacity, TimeBudget, MaxGenerations, MaxEvaluations };

constexpr std::string_view to_string(StopReason r) noexcept {
    switch (r) {
        case StopReason::Capacity: return "capacity";
        case StopReason::TimeBudget: return "time";
        case StopReason::MaxGenerations: return "max-generations";
        case StopReason::MaxEvaluations: return "max-evaluations";
    }
    return "?";
}

struct GenerationStats {
    std::size_t generation = 0;
    double quality = 0.0;
    std::size_t archive_size = 0;
    std::size_t admitted = 0;
    double mean_fitness = 0.0;
    double median_fitness = 0.0;
    double mean_diff_weight = 0.0;
    double elapsed_seconds = 0.0;
    std::size_t oracle_calls = 0;  // cumulative
};

struct RunTrace {
    std::vector<GenerationStats> generations;
    StopReason stop_reason = StopReason::MaxGenerations;
};

struct OperatorCounters {
    std::size_t selections = 0;
    std::size_t crossovers = 0;
    std::size_t standard_mutations = 0;
    std::size_t proximity_mutations = 0;

    std::size_t total() const noexcept {
        return selections + crossovers + standard_mutations + proximity_mutations;
    }
};

struct RunResult {
    Archive archive;
    RunTrace trace;
    OperatorCounters counters;
    std::size_t oracle_calls = 0;
    double elapsed_seconds = 0.0;
};

/// Optional observation points; all are called synchronously from run().
struct RunHooks {
    /// Every population right before it is evaluated.
    std::function<void(std::size_t generation, const std::vector<Genotype>&)> on_population;
    /// Every admission turn, in population order.
    std::function<void(std::size_t generation, std::size_t index, const Genotype&, double prediction,
                       double fitness, Admission)>
        on_admission;
};

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// Indices sorted best-first: fitness desc, diff weight asc, index asc.
inline std::vector<std::size_t> rank_population(std::span<const Candidate> pop) {
    std::vector<std::size_t> idx(pop.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return beats(pop, a, b); });
    return idx;
}

}  // namespace detail

inline RunResult run(const ReferenceContext& ctx, const EvolutionConfig& cfg, Oracle& oracle,
                     const RunHooks& hooks = {}) {
    cfg.check();
    const detail::Stopwatch clock;
    const ReplacementCounts counts = replacement_counts(cfg.population_size, normalized_weights(cfg));
    const PositionDomain domain(ctx, cfg.grammar.max_deletion_size);
    const ValidationLimits limits = cfg.grammar.limits();
    const OperatorConfig& ops = cfg.operators;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    CachedScorer scorer(oracle);

    RunResult result{Archive(cfg.archive), {}, {}, 0, 0.0};
    Archive& archive = result.archive;
    OperatorCounters& counters = result.counters;

    std::vector<Genotype> population;
    population.reserve(cfg.population_size);
    for (std::size_t i = 0; i < cfg.population_size; ++i)
        population.push_back(sample_genotype(cfg.grammar, domain, rng));

    const double budget = cfg.stopping.time_budget_seconds;
    std::optional<StopReason> stop;
    for (std::size_t gen = 0;; ++gen) {
        if (gen > 0 && clock.seconds() >= budget) {
            stop = StopReason::TimeBudget;
            break;
        }
        if (hooks.on_population) hooks.on_population(gen, population);

        std::vector<std::string> sequences;
        std::vector<std::size_t> weights;
        sequences.reserve(population.size());
        for (const Genotype& g : population) {
            Phenotype ph = apply(g, ctx, limits);
            weights.push_back(ph.genotype_weight);
            sequences.push_back(std::move(ph.sequence));
        }
        const std::vector<double> predictions = scorer.evaluate(sequences);

        std::vector<Candidate> candidates(population.size());
        std::size_t evaluated = 0, admitted = 0;
        for (std::size_t i = 0; i < population.size(); ++i) {
            const double f = evaluate_fitness(cfg.fitness, predictions[i], archive).value;
            candidates[i] = {f, weights[i]};
            ++evaluated;
            // Empty archive: IAD is 0 for everyone, admit the first record anyway.
            const double admit_score = (cfg.fitness == FitnessKind::Iad && archive.empty()) ? 1.0 : f;
            const Admission res = archive.try_admit(
                {sequences[i], to_string(population[i]), predictions[i], 0, gen, cfg.seed}, admit_score);
            if (res == Admission::Admitted) ++admitted;
            if (hooks.on_admission) hooks.on_admission(gen, i, population[i], predictions[i], f, res);
            if (clock.seconds() >= budget) {
                stop = StopReason::TimeBudget;
                break;
            }
        }

        GenerationStats st;
        st.generation = gen;
        st.quality = archive.quality();
        st.archive_size = archive.size();
        st.admitted = admitted;
        {
            std::vector<double> fit;
            double wsum = 0.0;
            for (std::size_t i = 0; i < evaluated; ++i) {
                fit.push_back(candidates[i].fitness);
                wsum += static_cast<double>(candidates[i].diff_weight);
            }
            st.mean_fitness = stats::mean(fit);
            st.median_fitness = fit.empty() ? 0.0 : stats::median(fit);
            st.mean_diff_weight = evaluated ? wsum / static_cast<double>(evaluated) : 0.0;
        }
        st.elapsed_seconds = clock.seconds();
        st.oracle_calls = scorer.oracle_calls();
        result.trace.generations.push_back(st);

        if (stop) break;
        if (cfg.stopping.stop_at_capacity && archive.full()) {
            stop = StopReason::Capacity;
            break;
        }
        if (st.elapsed_seconds >= budget) {
            stop = StopReason::TimeBudget;
            break;
        }
        if (cfg.stopping.max_generations && gen + 1 >= *cfg.stopping.max_generations) {
            stop = StopReason::MaxGenerations;
            break;
        }
        if (cfg.stopping.max_evaluations && scorer.oracle_calls() >= *cfg.stopping.max_evaluations) {
            stop = StopReason::MaxEvaluations;
            break;
        }

        std::vector<Genotype> next;
        next.reserve(cfg.population_size);
        if (counts.elite > 0) {
            const auto ranked = detail::rank_population(candidates);
            for (std::size_t i = 0; i < counts.elite; ++i) next.push_back(population[ranked[i]]);
        }
        std::size_t produced = 0;
        while (produced < counts.operators) {
            const std::size_t first = select(ops, std::span<const Candidate>(candidates), rng);
            ++counters.selections;
            std::vector<Genotype> children;
            if (coin(rng) < ops.crossover_probability) {
                const std::size_t second = select(ops, std::span<const Candidate>(candidates), rng);
                ++counters.selections;
                auto [a, b] = crossover(population[first], population[second], cfg.grammar, rng);
                ++counters.crossovers;
                children.push_back(std::move(a));
                children.push_back(std::move(b));
            } else {
                children.push_back(population[first]);
            }
            for (Genotype& child : children) {
                if (produced == counts.operators) break;
                if (coin(rng) < ops.mutation_probability) {
                    if (coin(rng) < ops.effective_custom_weight()) {
                        child = mutate_proximity(child, domain, ops.proximity_sigma, rng);
                        ++counters.proximity_mutations;
                    } else {
                        child = mutate_standard(child, cfg.grammar, domain, rng);
                        ++counters.standard_mutations;
                    }
                }
                next.push_back(std::move(child));
                ++produced;
            }
        }
        for (std::size_t i = 0; i < counts.novelty; ++i)
            next.push_back(sample_genotype(cfg.grammar, domain, rng));
        population = std::move(next);
    }

    result.trace.stop_reason = *stop;
    result.oracle_calls = scorer.oracle_calls();
    result.elapsed_seconds = clock.seconds();
    return result;
}

// ---------------------------------------------------------------------------
// Strategy comparison

struct NamedConfig {
    std::string name;
    EvolutionConfig config;
};

struct RunSummary {
    std::string name;
    std::uint64_t seed = 0;
    bool ok = true;
    std::string error;
    double final_quality = 0.0;
    std::size_t archive_size = 0;
    StopReason stop_reason = StopReason::MaxGenerations;
    double elapsed_seconds = 0.0;
    RunTrace trace;
};

struct StrategySummary {
    std::string name;
    stats::Summary quality;
    std::size_t failures = 0;
};

struct ComparisonReport {
    std::vector<RunSummary> runs;
    std::vector<StrategySummary> summary;
    double time_budget_seconds = 0.0;
};

/// Runs every config for every seed under one shared time budget (the
/// explicit one, else the first config's). Failed runs are recorded and
/// skipped. `on_run` sees each finished run's full result.
inline ComparisonReport compare_strategies(
    const ReferenceContext& ctx, const std::vector<NamedConfig>& configs,
    const std::vector<std::uint64_t>& seeds, Oracle& oracle,
    std::optional<double> time_budget_seconds = std::nullopt,
    const std::function<void(const NamedConfig&, std::uint64_t, const RunResult&)>& on_run = {}) {
    if (seeds.empty()) throw ConfigError("compare needs at least one seed");
    if (configs.empty()) throw ConfigError("compare needs at least one config");
    ComparisonReport report;
    report.time_budget_seconds = time_budget_seconds.value_or(configs.front().config.stopping.time_budget_seconds);
    for (const NamedConfig& nc : configs) {
        std::vector<double> finals;
        StrategySummary sum;
        sum.name = nc.name;
        for (std::uint64_t seed : seeds) {
            EvolutionConfig cfg = nc.config;
            cfg.seed = seed;
            cfg.stopping.time_budget_seconds = report.time_budget_seconds;
            RunSummary rs;
            rs.name = nc.name;
            rs.seed = seed;
            try {
                RunResult r = run(ctx, cfg, oracle);
                rs.final_quality = r.archive.quality();
                rs.archive_size = r.archive.size();
                rs.stop_reason = r.trace.stop_reason;
                rs.elapsed_seconds = r.elapsed_seconds;
                rs.trace = r.trace;
                finals.push_back(rs.final_quality);
                if (on_run) on_run(nc, seed, r);
            } catch (const std::exception& e) {
                rs.ok = false;
                rs.error = e.what();
                ++sum.failures;
            }
            report.runs.push_back(std::move(rs));
        }
        sum.quality = stats::summarize(finals);
        report.summary.push_back(std::move(sum));
    }
    return report;
}

}  // namespace seqforge
