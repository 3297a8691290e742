// seqforge command-line driver.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqforge/seqforge.hpp"

namespace fs = std::filesystem;
using namespace seqforge;

namespace {

struct ReferenceArgs {
    std::string sequence;
    std::string acceptors;
    std::string donors;
    std::optional<std::size_t> window;
    char pad = 'A';
};

void add_reference_options(CLI::App& app, ReferenceArgs& r, bool required) {
    auto* seq = app.add_option("--sequence", r.sequence, "Reference sequence: FASTA/plain file or inline string");
    if (required) seq->required();
    app.add_option("--acceptors", r.acceptors, "Comma-separated acceptor indices (0-based)");
    app.add_option("--donors", r.donors, "Comma-separated donor indices (0-based)");
    app.add_option("--window", r.window, "Oracle input length; pads or trims the reference");
    app.add_option("--pad", r.pad, "Padding nucleotide")->default_val('A');
}

ReferenceContext make_context(const std::string& source, std::vector<std::size_t> acceptors,
                              std::vector<std::size_t> donors, std::optional<std::size_t> window, char pad,
                              const RestrictionOffsets& offsets) {
    InputSpec spec;
    spec.sequence = load_sequence(source);
    spec.acceptors = std::move(acceptors);
    spec.donors = std::move(donors);
    spec.window = window;
    spec.pad_symbol = pad;
    spec.offsets = offsets;
    return build_context(spec);
}

struct GenerateArgs {
    ReferenceArgs ref;
    std::string config;
    std::string out;
    std::string oracle = "toy";
    std::optional<std::string> strategy;
    std::optional<std::string> fitness;
    std::optional<std::uint64_t> seed;
    std::optional<double> custom_mutation_rate;
    std::optional<std::size_t> max_diff_units;
    std::optional<std::size_t> max_insertion_size;
    std::optional<std::size_t> max_deletion_size;
    std::vector<std::string> exclude;
    std::optional<std::size_t> population_size;
    std::optional<std::size_t> archive_size;
    std::optional<std::size_t> bins;
    std::optional<double> time_budget;
    std::optional<std::size_t> max_generations;
    std::optional<std::size_t> max_evaluations;
};

int do_generate(const GenerateArgs& a) {
    RunConfig rc = a.config.empty() ? RunConfig{} : load_config(a.config);
    EvolutionConfig& ev = rc.evolution;
    if (a.strategy) ev.strategy = parse_strategy(*a.strategy);
    if (a.fitness) ev.fitness = parse_fitness_kind(*a.fitness);
    if (a.seed) ev.seed = *a.seed;
    if (a.custom_mutation_rate) {
        ev.operators.use_custom_mutation = true;
        ev.operators.custom_mutation_weight = *a.custom_mutation_rate;
    }
    if (a.max_diff_units) ev.grammar.max_diff_units = *a.max_diff_units;
    if (a.max_insertion_size) ev.grammar.max_insertion_size = *a.max_insertion_size;
    if (a.max_deletion_size) ev.grammar.max_deletion_size = *a.max_deletion_size;
    for (const std::string& k : a.exclude) ev.grammar.exclude(parse_unit_kind(k));
    if (a.population_size) ev.population_size = *a.population_size;
    if (a.archive_size) ev.archive.capacity = *a.archive_size;
    if (a.bins) ev.archive.bin_count = *a.bins;
    if (a.time_budget) ev.stopping.time_budget_seconds = *a.time_budget;
    if (a.max_generations) ev.stopping.max_generations = *a.max_generations;
    if (a.max_evaluations) ev.stopping.max_evaluations = *a.max_evaluations;
    ev.check();

    const ReferenceContext ctx = make_context(a.ref.sequence, parse_coordinates(a.ref.acceptors),
                                              parse_coordinates(a.ref.donors), a.ref.window, a.ref.pad, rc.offsets);
    auto oracle = make_oracle(a.oracle, rc.toy_oracle);
    const RunResult result = run(ctx, ev, *oracle);
    emit_run(a.out, rc, ctx, result, oracle->identity());

    const ArchiveMetrics m = result.archive.metrics();
    std::cout << "quality " << format_double(m.quality) << "  size " << m.size << "  generations "
              << result.trace.generations.size() << "  stop " << to_string(result.trace.stop_reason) << "\n"
              << "wrote " << (fs::path(a.out) / "dataset.tsv").string() << '\n';
    return 0;
}

struct CompareArgs {
    ReferenceArgs ref;
    std::string configs;
    std::string seeds = "1..30";
    std::string out;
    std::optional<std::string> oracle;
    std::optional<double> time_budget;
};

int do_compare(const CompareArgs& a) {
    ComparisonPlan plan = load_comparison_plan(a.configs);
    const std::string source = !a.ref.sequence.empty() ? a.ref.sequence : plan.sequence.value_or("");
    if (source.empty()) throw ConfigError("no reference sequence: pass --sequence or set reference.sequence");
    const auto acceptors = !a.ref.acceptors.empty() ? parse_coordinates(a.ref.acceptors) : plan.acceptors;
    const auto donors = !a.ref.donors.empty() ? parse_coordinates(a.ref.donors) : plan.donors;
    const auto window = a.ref.window ? a.ref.window : plan.window;
    const ReferenceContext ctx = make_context(source, acceptors, donors, window, a.ref.pad, plan.base.offsets);
    auto oracle = make_oracle(a.oracle.value_or(plan.oracle), plan.base.toy_oracle);
    const auto seeds = parse_seeds(a.seeds);
    const auto budget = a.time_budget ? a.time_budget : plan.time_budget_seconds;

    const ComparisonReport rep = compare_strategies(
        ctx, plan.configs, seeds, *oracle, budget, [](const NamedConfig& nc, std::uint64_t seed, const RunResult& r) {
            std::cerr << nc.name << " seed " << seed << ": quality " << format_double(r.archive.quality())
                      << " size " << r.archive.size() << '\n';
        });
    emit_comparison(a.out, rep);
    for (const StrategySummary& s : rep.summary) {
        std::cout << s.name << "  median " << format_double(s.quality.median) << "  iqr "
                  << format_double(s.quality.iqr()) << "  runs " << s.quality.n << "  failures " << s.failures
                  << '\n';
    }
    return 0;
}

int do_score(const std::string& dataset, const std::string& config) {
    const RunConfig rc = config.empty() ? RunConfig{} : load_config(config);
    std::cout << to_json(score_dataset(dataset, rc.evolution.archive)).dump(2) << '\n';
    return 0;
}

int do_motif_diff(const std::string& dataset, const std::string& reference, const std::string& motifs,
                  const std::string& config) {
    const RunConfig rc = config.empty() ? RunConfig{} : load_config(config);
    std::ifstream in(dataset);
    if (!in) throw Error("cannot open " + dataset);
    const auto records = read_dataset_tsv(in, rc.evolution.archive.bin_count);
    const MotifSet set = motifs.empty() ? default_motif_set(rc.toy_oracle) : load_motifs(motifs);
    std::cout << to_json(motif_disruption(records, load_sequence(reference), set)).dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"seqforge: grammar-guided GP for uniformly covering synthetic DNA datasets"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Evolve one dataset around a reference");
    add_reference_options(*g, gen.ref, true);
    g->add_option("--config", gen.config, "JSON config file")->check(CLI::ExistingFile);
    g->add_option("--out", gen.out, "Output directory")->required();
    g->add_option("--oracle", gen.oracle, "toy | subprocess:<command>")->default_val("toy");
    g->add_option("--strategy", gen.strategy, "gggp | rs");
    g->add_option("--fitness", gen.fitness, "bin-filler | iad");
    g->add_option("--seed", gen.seed, "RNG seed");
    g->add_option("--custom-mutation-rate", gen.custom_mutation_rate, "Share of proximity mutations")
        ->check(CLI::Range(0.0, 1.0));
    g->add_option("--max-diff-units", gen.max_diff_units);
    g->add_option("--max-insertion-size", gen.max_insertion_size);
    g->add_option("--max-deletion-size", gen.max_deletion_size);
    g->add_option("--exclude", gen.exclude, "Node kinds to drop from the grammar: snv, insertion, deletion")
        ->delimiter(',');
    g->add_option("--population-size", gen.population_size);
    g->add_option("--archive-size", gen.archive_size);
    g->add_option("--bins", gen.bins, "Number of prediction bins");
    g->add_option("--time-budget", gen.time_budget, "Seconds");
    g->add_option("--max-generations", gen.max_generations);
    g->add_option("--max-evaluations", gen.max_evaluations);

    CompareArgs cmp;
    auto* c = app.add_subcommand("compare", "Run several configs over a seed sweep");
    add_reference_options(*c, cmp.ref, false);
    c->add_option("--configs", cmp.configs, "Compare file (JSON)")->required()->check(CLI::ExistingFile);
    c->add_option("--seeds", cmp.seeds, "Seed range a..b or list a,b,c")->default_val("1..30");
    c->add_option("--out", cmp.out, "Output directory")->required();
    c->add_option("--oracle", cmp.oracle, "toy | subprocess:<command>");
    c->add_option("--time-budget", cmp.time_budget, "Seconds per run, shared by all configs");

    std::string dataset, score_config, reference, motifs;
    auto* s = app.add_subcommand("score", "Recompute archive metrics of a dataset TSV");
    s->add_option("--dataset", dataset)->required()->check(CLI::ExistingFile);
    s->add_option("--config", score_config, "JSON config (archive section)")->check(CLI::ExistingFile);

    auto* md = app.add_subcommand("motif-diff", "Count motif gains and losses against the reference");
    md->add_option("--dataset", dataset)->required()->check(CLI::ExistingFile);
    md->add_option("--reference", reference, "Reference file or inline sequence")->required();
    md->add_option("--motifs", motifs, "Motif file, one per line (default: toy oracle motifs)")
        ->check(CLI::ExistingFile);
    md->add_option("--config", score_config, "JSON config (bin count, default motifs)")->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*g) return do_generate(gen);
        if (*c) return do_compare(cmp);
        if (*s) return do_score(dataset, score_config);
        if (*md) return do_motif_diff(dataset, reference, motifs, score_config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
