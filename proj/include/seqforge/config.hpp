#pragma once

// JSON configuration: one section per component, hyperparameters under their
// usual snake_case names. Missing keys keep their defaults; unknown keys in a
// known section are rejected.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqforge/archive.hpp"
#include "seqforge/engine.hpp"
#include "seqforge/error.hpp"
#include "seqforge/grammar.hpp"
#include "seqforge/operators.hpp"
#include "seqforge/oracle.hpp"
#include "seqforge/reference.hpp"
#include "seqforge/seqdiff.hpp"

namespace seqforge {

using json = nlohmann::json;

/// Everything a config file can set.
struct RunConfig {
    EvolutionConfig evolution;
    ToyOracleConfig toy_oracle;
    RestrictionOffsets offsets;
};

inline UnitKind parse_unit_kind(std::string_view s) {
    if (s == "snv" || s == "SNV") return UnitKind::Snv;
    if (s == "ins" || s == "Ins" || s == "insertion") return UnitKind::Insertion;
    if (s == "del" || s == "Del" || s == "deletion") return UnitKind::Deletion;
    throw ConfigError("unknown node kind '" + std::string(s) + "'");
}

constexpr std::string_view config_name(UnitKind k) noexcept {
    switch (k) {
        case UnitKind::Snv: return "snv";
        case UnitKind::Insertion: return "insertion";
        case UnitKind::Deletion: return "deletion";
    }
    return "?";
}

inline SelectionMethod parse_selection_method(std::string_view s) {
    if (s == "tournament") return SelectionMethod::Tournament;
    if (s == "lexicase") return SelectionMethod::Lexicase;
    throw ConfigError("unknown selection method '" + std::string(s) + "'");
}

constexpr std::string_view to_string(SelectionMethod m) noexcept {
    return m == SelectionMethod::Tournament ? "tournament" : "lexicase";
}

namespace detail {

class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw ConfigError("config section '" + name_ + "' must be an object");
    }

    template <class T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return;
        try {
            out = it->get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(name_ + "." + key + ": " + e.what());
        }
    }

    template <class T>
    void read(const char* key, std::optional<T>& out) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        if (it->is_null()) {
            out.reset();
            return;
        }
        try {
            out = it->get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(name_ + "." + key + ": " + e.what());
        }
    }

    const json* child(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() || it->is_null() ? nullptr : &*it;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.contains(it.key())) throw ConfigError("unknown key '" + name_ + "." + it.key() + "'");
        }
    }

private:
    const json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

}  // namespace detail

/// Applies the settings in `j` on top of `base`.
inline RunConfig config_from_json(const json& j, RunConfig base = {}) {
    detail::Section root(j, "config");
    EvolutionConfig& ev = base.evolution;

    if (const json* s = root.child("evolution")) {
        detail::Section sec(*s, "evolution");
        std::string strategy(to_string(ev.strategy)), fitness(to_string(ev.fitness));
        sec.read("strategy", strategy);
        sec.read("population_size", ev.population_size);
        sec.read("genetic_operators_weight", ev.genetic_operators_weight);
        sec.read("elitism_weight", ev.elitism_weight);
        sec.read("novelty_weight", ev.novelty_weight);
        sec.read("fitness_function", fitness);
        sec.read("seed", ev.seed);
        sec.finish();
        ev.strategy = parse_strategy(strategy);
        ev.fitness = parse_fitness_kind(fitness);
    }
    if (const json* s = root.child("grammar")) {
        detail::Section sec(*s, "grammar");
        GrammarConfig& g = ev.grammar;
        sec.read("max_diff_units", g.max_diff_units);
        sec.read("max_insertion_size", g.max_insertion_size);
        sec.read("max_deletion_size", g.max_deletion_size);
        sec.read("snv_grammar_weight", g.snv_weight);
        sec.read("insertion_grammar_weight", g.insertion_weight);
        sec.read("deletion_grammar_weight", g.deletion_weight);
        if (const json* ex = sec.child("excluded_node_kinds")) {
            if (!ex->is_array()) throw ConfigError("grammar.excluded_node_kinds must be an array");
            g.excluded = {false, false, false};
            for (const auto& k : *ex) g.exclude(parse_unit_kind(k.get<std::string>()));
        }
        sec.finish();
    }
    if (const json* s = root.child("operators")) {
        detail::Section sec(*s, "operators");
        OperatorConfig& o = ev.operators;
        std::string method(to_string(o.selection_method));
        sec.read("selection_method", method);
        sec.read("tournament_size", o.tournament_size);
        sec.read("crossover_probability", o.crossover_probability);
        sec.read("mutation_probability", o.mutation_probability);
        sec.read("use_custom_mutation_operator", o.use_custom_mutation);
        sec.read("custom_mutation_operator_weight", o.custom_mutation_weight);
        sec.read("proximity_sigma", o.proximity_sigma);
        sec.finish();
        o.selection_method = parse_selection_method(method);
    }
    if (const json* s = root.child("archive")) {
        detail::Section sec(*s, "archive");
        ArchiveParams& a = ev.archive;
        sec.read("archive_size", a.capacity);
        sec.read("number_of_bins", a.bin_count);
        sec.read("low_count_threshold", a.low_count_threshold);
        sec.read("sub_bins_per_bin", a.sub_bins_per_bin);
        if (const json* w = sec.child("quality_weights")) {
            detail::Section ws(*w, "archive.quality_weights");
            ws.read("size", a.weights.size);
            ws.read("diversity", a.weights.diversity);
            ws.read("intra_bin", a.weights.intra_bin);
            ws.read("low_count", a.weights.low_count);
            ws.finish();
        }
        sec.finish();
    }
    if (const json* s = root.child("stopping")) {
        detail::Section sec(*s, "stopping");
        StoppingConfig& st = ev.stopping;
        sec.read("stop_at_capacity", st.stop_at_capacity);
        sec.read("time_budget_seconds", st.time_budget_seconds);
        sec.read("max_generations", st.max_generations);
        sec.read("max_evaluations", st.max_evaluations);
        sec.finish();
    }
    if (const json* s = root.child("oracle")) {
        detail::Section sec(*s, "oracle");
        if (const json* t = sec.child("toy")) {
            detail::Section ts(*t, "oracle.toy");
            ts.read("bias", base.toy_oracle.bias);
            if (const json* m = ts.child("motifs")) {
                if (!m->is_object()) throw ConfigError("oracle.toy.motifs must be an object");
                base.toy_oracle.motifs.clear();
                for (auto it = m->begin(); it != m->end(); ++it) base.toy_oracle.motifs[it.key()] = it->get<double>();
            }
            ts.finish();
        }
        sec.finish();
    }
    if (const json* s = root.child("reference")) {
        detail::Section sec(*s, "reference");
        if (const json* r = sec.child("restriction_offsets")) {
            detail::Section rs(*r, "reference.restriction_offsets");
            rs.read("acceptor_upstream", base.offsets.acceptor_upstream);
            rs.read("acceptor_downstream", base.offsets.acceptor_downstream);
            rs.read("donor_upstream", base.offsets.donor_upstream);
            rs.read("donor_downstream", base.offsets.donor_downstream);
            rs.finish();
        }
        sec.finish();
    }
    root.finish();
    return base;
}

inline json to_json(const RunConfig& c) {
    const EvolutionConfig& ev = c.evolution;
    json excluded = json::array();
    for (UnitKind k : kUnitKinds)
        if (ev.grammar.is_excluded(k)) excluded.push_back(config_name(k));
    json motifs = json::object();
    for (const auto& [m, w] : c.toy_oracle.motifs) motifs[m] = w;
    auto opt = [](const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); };
    return json{
        {"evolution",
         {{"strategy", to_string(ev.strategy)},
          {"population_size", ev.population_size},
          {"genetic_operators_weight", ev.genetic_operators_weight},
          {"elitism_weight", ev.elitism_weight},
          {"novelty_weight", ev.novelty_weight},
          {"fitness_function", to_string(ev.fitness)},
          {"seed", ev.seed}}},
        {"grammar",
         {{"max_diff_units", ev.grammar.max_diff_units},
          {"max_insertion_size", ev.grammar.max_insertion_size},
          {"max_deletion_size", ev.grammar.max_deletion_size},
          {"snv_grammar_weight", ev.grammar.snv_weight},
          {"insertion_grammar_weight", ev.grammar.insertion_weight},
          {"deletion_grammar_weight", ev.grammar.deletion_weight},
          {"excluded_node_kinds", excluded}}},
        {"operators",
         {{"selection_method", to_string(ev.operators.selection_method)},
          {"tournament_size", ev.operators.tournament_size},
          {"crossover_probability", ev.operators.crossover_probability},
          {"mutation_probability", ev.operators.mutation_probability},
          {"use_custom_mutation_operator", ev.operators.use_custom_mutation},
          {"custom_mutation_operator_weight", ev.operators.custom_mutation_weight},
          {"proximity_sigma", ev.operators.proximity_sigma}}},
        {"archive",
         {{"archive_size", ev.archive.capacity},
          {"number_of_bins", ev.archive.bin_count},
          {"low_count_threshold", ev.archive.low_count_threshold},
          {"sub_bins_per_bin", ev.archive.sub_bins_per_bin},
          {"quality_weights",
           {{"size", ev.archive.weights.size},
            {"diversity", ev.archive.weights.diversity},
            {"intra_bin", ev.archive.weights.intra_bin},
            {"low_count", ev.archive.weights.low_count}}}}},
        {"stopping",
         {{"stop_at_capacity", ev.stopping.stop_at_capacity},
          {"time_budget_seconds", ev.stopping.time_budget_seconds},
          {"max_generations", opt(ev.stopping.max_generations)},
          {"max_evaluations", opt(ev.stopping.max_evaluations)}}},
        {"oracle", {{"toy", {{"bias", c.toy_oracle.bias}, {"motifs", motifs}}}}},
        {"reference",
         {{"restriction_offsets",
           {{"acceptor_upstream", c.offsets.acceptor_upstream},
            {"acceptor_downstream", c.offsets.acceptor_downstream},
            {"donor_upstream", c.offsets.donor_upstream},
            {"donor_downstream", c.offsets.donor_downstream}}}}}};
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
    return config_from_json(read_json_file(path), std::move(base));
}

/// "1..30" (inclusive range) or "3,5,8".
inline std::vector<std::uint64_t> parse_seeds(std::string_view text) {
    std::vector<std::uint64_t> out;
    auto number = [&](std::string_view s) {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
            throw ConfigError("bad seed list '" + std::string(text) + "'");
        return v;
    };
    if (const auto dots = text.find(".."); dots != std::string_view::npos) {
        const std::uint64_t lo = number(text.substr(0, dots)), hi = number(text.substr(dots + 2));
        if (hi < lo) throw ConfigError("empty seed range '" + std::string(text) + "'");
        for (std::uint64_t s = lo;; ++s) {
            out.push_back(s);
            if (s == hi) break;
        }
        return out;
    }
    for (std::uint64_t v : parse_coordinates(text)) out.push_back(v);
    if (out.empty()) throw ConfigError("empty seed list");
    return out;
}

/// A compare file: shared reference and oracle, a base config, and named
/// override sets applied on top of it.
///
///   {"reference": {"sequence": "ref.fa", "acceptors": [100], "donors": [200]},
///    "oracle": "toy", "time_budget_seconds": 30, "base": {...},
///    "runs": [{"name": "gggp", "config": {...}}, ...]}
struct ComparisonPlan {
    RunConfig base;
    std::vector<NamedConfig> configs;
    std::optional<double> time_budget_seconds;
    std::string oracle = "toy";
    std::optional<std::string> sequence;  // path (relative to the file) or inline
    std::vector<std::size_t> acceptors;
    std::vector<std::size_t> donors;
    std::optional<std::size_t> window;
};

inline ComparisonPlan comparison_plan_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
    detail::Section root(j, "compare");
    ComparisonPlan plan;
    if (const json* b = root.child("base")) plan.base = config_from_json(*b);
    root.read("oracle", plan.oracle);
    root.read("time_budget_seconds", plan.time_budget_seconds);
    if (const json* r = root.child("reference")) {
        detail::Section rs(*r, "reference");
        rs.read("sequence", plan.sequence);
        rs.read("acceptors", plan.acceptors);
        rs.read("donors", plan.donors);
        rs.read("window", plan.window);
        rs.finish();
        if (plan.sequence && !base_dir.empty()) {
            const auto candidate = base_dir / *plan.sequence;
            std::error_code ec;
            if (std::filesystem::is_regular_file(candidate, ec)) plan.sequence = candidate.string();
        }
    }
    const json* runs = root.child("runs");
    if (!runs || !runs->is_array() || runs->empty()) throw ConfigError("compare file needs a non-empty 'runs' array");
    root.finish();
    for (const json& r : *runs) {
        detail::Section rs(r, "runs[]");
        std::string name;
        rs.read("name", name);
        if (name.empty()) throw ConfigError("every run needs a name");
        RunConfig rc = plan.base;
        if (const json* c = rs.child("config")) rc = config_from_json(*c, plan.base);
        rs.finish();
        plan.configs.push_back({name, rc.evolution});
    }
    return plan;
}

inline ComparisonPlan load_comparison_plan(const std::string& path) {
    return comparison_plan_from_json(read_json_file(path), std::filesystem::path(path).parent_path());
}

}  // namespace seqforge
