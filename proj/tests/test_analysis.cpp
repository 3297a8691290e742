#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "seqforge/analysis.hpp"
#include "support/oracles.hpp"

using namespace seqforge;
namespace fs = std::filesystem;

namespace {

ArchiveRecord rec(std::string seq, double p) { return {std::move(seq), "SNV(0,C)", p, 0, 0, 1}; }

std::size_t naive_events(const std::vector<std::string>& seqs, const std::string& ref,
                         const std::vector<std::string>& motifs) {
    std::size_t total = 0;
    for (const auto& s : seqs)
        for (const auto& m : motifs) {
            const auto a = oracle::naive_count(m, s), b = oracle::naive_count(m, ref);
            total += a > b ? a - b : b - a;
        }
    return total;
}

RunResult small_result(std::uint64_t seed, const ReferenceContext& ctx) {
    EvolutionConfig cfg;
    cfg.population_size = 50;
    cfg.archive.capacity = 300;
    cfg.stopping.max_generations = 8;
    cfg.seed = seed;
    ToyOracle toy;
    return run(ctx, cfg, toy);
}

fs::path temp_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("seqforge_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST(ScoreDataset, RoundTripMatchesRun) {
    std::mt19937_64 r(1);
    const ReferenceContext ctx(oracle::random_dna(300, r), {100}, {200});
    const RunResult res = small_result(3, ctx);
    std::stringstream ss;
    write_dataset_tsv(res.archive, ss);
    const DatasetScore s = score_dataset(ss, res.archive.params());
    EXPECT_EQ(s.metrics, res.archive.metrics());
    EXPECT_EQ(s.metrics.quality, res.trace.generations.back().quality);
    EXPECT_EQ(s.rows, res.archive.size());
    EXPECT_EQ(s.duplicates, 0u);
}

TEST(ScoreDataset, SingleRecord) {
    ArchiveParams p;
    const DatasetScore s = score_records({rec("ACGT", 0.3)}, p);
    EXPECT_NEAR(s.metrics.quality, 0.3 / 5000.0, 1e-15);
    EXPECT_EQ(s.metrics.diversity, 0.0);
    EXPECT_EQ(s.metrics.intra_bin_diversity, 0.0);
    EXPECT_EQ(s.metrics.low_count_fraction, 0.0);
}

TEST(ScoreDataset, DeduplicatesWithoutCapacityChecks) {
    ArchiveParams p;
    p.capacity = 2;
    p.bin_count = 2;
    const DatasetScore s = score_records({rec("A", 0.1), rec("C", 0.1), rec("G", 0.1), rec("A", 0.9)}, p);
    EXPECT_EQ(s.rows, 4u);
    EXPECT_EQ(s.duplicates, 1u);
    EXPECT_EQ(s.metrics.size, 3u);
    EXPECT_EQ(s.bin_counts, (std::vector<std::size_t>{3, 0}));
}

TEST(ScoreDataset, MalformedPrediction) {
    std::istringstream is("id\tgenotype\tsequence\tprediction\tbin\tgeneration\tseed\n0\t-\tACGT\t1.2\t39\t0\t1\n");
    EXPECT_THROW(score_dataset(is, ArchiveParams{}), SchemaError);
    EXPECT_THROW(score_dataset("/nonexistent/d.tsv", ArchiveParams{}), Error);
}

TEST(MotifSet, Validation) {
    EXPECT_NO_THROW(MotifSet({"GCATG", "TTT"}));
    EXPECT_THROW(MotifSet({"GC"}), ConfigError);
    EXPECT_THROW(MotifSet({"GCATG", "GCATG"}), ConfigError);
    EXPECT_THROW(MotifSet({"GCNTG"}), BadAlphabet);
    std::istringstream is("# motifs\ngcatg\n\n  TTTCT \n");
    EXPECT_EQ(read_motifs(is).motifs(), (std::vector<std::string>{"GCATG", "TTTCT"}));
    EXPECT_EQ(default_motif_set().size(), 4u);
    EXPECT_EQ(load_motifs(std::string(SEQFORGE_SAMPLES_DIR) + "/motifs.txt").size() > 0, true);
}

TEST(MotifDisruption, Examples) {
    const MotifSet gcatg({"GCATG"});
    const std::vector<std::string> copies(5, "ACGTACGTGCATG");
    EXPECT_EQ(motif_disruption(copies, "ACGTACGTGCATG", gcatg).frequency, 0.0);

    const std::vector<std::string> one{"GCATGAAAA"};
    const auto r = motif_disruption(one, "AAAA", gcatg);
    EXPECT_EQ(r.total_events, 1u);
    EXPECT_EQ(r.dataset_size, 1u);
    EXPECT_DOUBLE_EQ(r.frequency, 1.0);
    EXPECT_EQ(r.per_motif[0].gained, 1u);

    const std::vector<std::string> deleted{"AAGCATGAA"};
    const auto d = motif_disruption(deleted, "AAGCATGAAGCATGAA", gcatg);
    EXPECT_EQ(d.per_motif[0].lost, 1u);
    EXPECT_EQ(d.per_motif[0].gained, 0u);
    EXPECT_EQ(d.total_events, 1u);

    EXPECT_THROW(motif_disruption(std::vector<std::string>{}, "AAAA", gcatg), Error);
}

TEST(MotifDisruption, MatchesNaiveCountAndIsSymmetric) {
    std::mt19937_64 rng(2);
    const std::vector<std::string> motifs{"GCATG", "TTTCT", "GAAGAA", "CTCTCT", "ACG"};
    const MotifSet set(motifs);
    for (int trial = 0; trial < 300; ++trial) {
        std::string ref = oracle::random_dna(80, rng);
        std::vector<std::string> seqs;
        for (int k = 0; k < 5; ++k) {
            std::string s = ref;
            s.insert(std::uniform_int_distribution<std::size_t>(0, s.size())(rng), motifs[k % motifs.size()]);
            s.erase(std::uniform_int_distribution<std::size_t>(0, s.size() - 4)(rng), 3);
            seqs.push_back(s);
        }
        const auto rep = motif_disruption(seqs, ref, set);
        EXPECT_EQ(rep.total_events, naive_events(seqs, ref, motifs));
        std::size_t sum = 0;
        for (const auto& e : rep.per_motif) sum += e.gained + e.lost;
        EXPECT_EQ(sum, rep.total_events);
        EXPECT_DOUBLE_EQ(rep.frequency, rep.total_events / 5.0);

        const std::vector<std::string> single{seqs[0]};
        const std::vector<std::string> back{ref};
        const auto fwd = motif_disruption(single, ref, set);
        const auto rev = motif_disruption(back, seqs[0], set);
        EXPECT_EQ(fwd.total_events, rev.total_events);
        for (std::size_t m = 0; m < motifs.size(); ++m) {
            EXPECT_EQ(fwd.per_motif[m].gained, rev.per_motif[m].lost);
            EXPECT_EQ(fwd.per_motif[m].lost, rev.per_motif[m].gained);
        }
    }
}

TEST(Reports, TraceAndBins) {
    std::mt19937_64 r(3);
    const ReferenceContext ctx(oracle::random_dna(300, r), {100}, {200});
    const RunResult res = small_result(5, ctx);
    std::ostringstream trace;
    write_trace_tsv(res.trace, trace);
    const std::string t = trace.str();
    EXPECT_EQ(static_cast<std::size_t>(std::count(t.begin(), t.end(), '\n')), res.trace.generations.size() + 1);
    std::ostringstream bins;
    write_bins_tsv(res.archive, bins);
    std::istringstream in(bins.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "bin\tlower\tupper\tcount");
    std::size_t total = 0, rows = 0;
    while (std::getline(in, line)) {
        total += std::stoul(line.substr(line.rfind('\t') + 1));
        ++rows;
    }
    EXPECT_EQ(rows, 40u);
    EXPECT_EQ(total, res.archive.size());
}

TEST(Reports, EmitRunWritesAllFiles) {
    std::mt19937_64 r(4);
    const ReferenceContext ctx(oracle::random_dna(300, r), {100}, {200});
    const RunResult res = small_result(6, ctx);
    const fs::path dir = temp_dir("emit");
    RunConfig rc;
    emit_run(dir, rc, ctx, res, "toy");
    for (const char* f : {"dataset.tsv", "metadata.json", "trace.tsv", "bins.tsv"}) EXPECT_TRUE(fs::exists(dir / f));
    const json meta = read_json_file((dir / "metadata.json").string());
    EXPECT_EQ(meta["oracle"], "toy");
    EXPECT_EQ(meta["metrics"]["size"], res.archive.size());
    EXPECT_EQ(meta["reference"]["length"], 300u);
    EXPECT_TRUE(meta.contains("timing"));
    EXPECT_EQ(meta["config"], to_json(rc));
    EXPECT_EQ(score_dataset((dir / "dataset.tsv").string(), res.archive.params()).metrics, res.archive.metrics());
    fs::remove_all(dir);
}

TEST(Reports, ComparisonTables) {
    std::mt19937_64 r(5);
    const ReferenceContext ctx(oracle::random_dna(300, r), {100}, {200});
    EvolutionConfig cfg;
    cfg.population_size = 30;
    cfg.stopping.max_generations = 3;
    ToyOracle toy;
    const auto rep = compare_strategies(ctx, {{"a", cfg}, {"b", cfg}}, {1, 2, 3}, toy);
    const fs::path dir = temp_dir("cmp");
    emit_comparison(dir, rep);
    const json summary = read_json_file((dir / "summary.json").string());
    ASSERT_EQ(summary["summary"].size(), 2u);
    EXPECT_EQ(summary["summary"][0]["final_quality"], summary["summary"][1]["final_quality"]);
    EXPECT_EQ(summary["runs"].size(), 6u);
    std::ifstream tsv(dir / "summary.tsv");
    std::string header;
    std::getline(tsv, header);
    EXPECT_EQ(header, "name\truns\tfailures\tmedian\tq1\tq3\tiqr\tmean");
    fs::remove_all(dir);
}

TEST(Reports, EditDistanceSummary) {
    Archive a;
    a.insert_unchecked({"AAAA", "SNV(0,C);Ins(2,GG)", 0.1, 0, 0, 0});
    a.insert_unchecked({"CCCC", "Del(1,3)", 0.2, 0, 0, 0});
    const auto s = edit_distance_summary(a);
    EXPECT_EQ(s.n, 2u);
    EXPECT_DOUBLE_EQ(s.mean, 3.0);
}
