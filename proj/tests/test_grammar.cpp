#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "seqforge/grammar.hpp"
#include "support/oracles.hpp"

using namespace seqforge;

namespace {

std::size_t count_kind(const Genotype& g, UnitKind k) {
    return static_cast<std::size_t>(
        std::count_if(g.units().begin(), g.units().end(), [&](const DiffUnit& u) { return kind(u) == k; }));
}

}  // namespace

TEST(GrammarConfig, Validation) {
    GrammarConfig cfg;
    EXPECT_NO_THROW(cfg.check());
    cfg.max_diff_units = 0;
    EXPECT_THROW(cfg.check(), ConfigError);
    cfg = {};
    cfg.snv_weight = cfg.insertion_weight = cfg.deletion_weight = 0.0;
    EXPECT_THROW(cfg.check(), ConfigError);
    cfg = {};
    cfg.exclude(UnitKind::Snv);
    cfg.exclude(UnitKind::Insertion);
    cfg.exclude(UnitKind::Deletion);
    EXPECT_THROW(cfg.check(), ConfigError);
    cfg = {};
    cfg.insertion_weight = -1.0;
    EXPECT_THROW(cfg.check(), ConfigError);
}

TEST(SampleGenotype, SnvOnlyWhenDeletionWeightZeroAndInsertionsExcluded) {
    GrammarConfig cfg;
    cfg.deletion_weight = 0.0;
    cfg.exclude(UnitKind::Insertion);
    std::mt19937_64 rng(1);
    const ReferenceContext ctx(oracle::random_dna(200, rng), {50}, {150});
    for (int i = 0; i < 2000; ++i) {
        const Genotype g = sample_genotype(cfg, ctx, rng);
        EXPECT_EQ(count_kind(g, UnitKind::Snv), g.size());
    }
}

TEST(SampleGenotype, SingleUnitCap) {
    GrammarConfig cfg;
    cfg.max_diff_units = 1;
    std::mt19937_64 rng(2);
    const ReferenceContext ctx(oracle::random_dna(100, rng), {}, {});
    for (int i = 0; i < 2000; ++i) EXPECT_EQ(sample_genotype(cfg, ctx, rng).size(), 1u);
}

TEST(SampleGenotype, UnitCountCoversWholeRange) {
    const GrammarConfig cfg;
    std::mt19937_64 rng(3);
    const ReferenceContext ctx(oracle::random_dna(2000, rng), {}, {});
    std::map<std::size_t, int> hist;
    for (int i = 0; i < 6000; ++i) ++hist[sample_genotype(cfg, ctx, rng).size()];
    // Long reference: collisions are rare, so counts stay close to uniform.
    for (std::size_t k = 1; k <= 6; ++k) EXPECT_NEAR(hist[k] / 6000.0, 1.0 / 6.0, 0.03) << k;
}

TEST(SampleKind, FrequenciesFollowNormalizedWeights) {
    const GrammarConfig cfg;  // 0.05 / 0.75 / 0.3
    std::mt19937_64 rng(4);
    const ReferenceContext ctx(oracle::random_dna(300, rng), {100}, {200});
    const PositionDomain domain(ctx, cfg.max_deletion_size);
    std::array<int, 3> hist{};
    const int n = 10000;
    for (int i = 0; i < n; ++i) ++hist[static_cast<std::size_t>(sample_kind(cfg, domain, rng))];
    EXPECT_NEAR(hist[0] / double(n), 0.05 / 1.10, 0.02);
    EXPECT_NEAR(hist[1] / double(n), 0.75 / 1.10, 0.02);
    EXPECT_NEAR(hist[2] / double(n), 0.30 / 1.10, 0.02);
}

TEST(SampleUnit, SnvOnShortUnrestrictedSequence) {
    const GrammarConfig cfg;
    const ReferenceContext ctx("ACGT", {}, {});
    const PositionDomain domain(ctx, cfg.max_deletion_size);
    std::mt19937_64 rng(5);
    std::set<std::size_t> seen;
    std::set<Nucleotide> nucs;
    for (int i = 0; i < 500; ++i) {
        const DiffUnit u = sample_unit(UnitKind::Snv, cfg, domain, rng);
        ASSERT_EQ(kind(u), UnitKind::Snv);
        EXPECT_LT(position(u), 4u);
        seen.insert(position(u));
        nucs.insert(std::get<Snv>(u).nuc);
    }
    EXPECT_EQ(seen.size(), 4u);
    EXPECT_EQ(nucs.size(), 4u);
}

TEST(SampleUnit, DeletionNextToRestrictedRegionMatchesBruteForce) {
    const GrammarConfig cfg;
    const ReferenceContext ctx(std::string(40, 'A'), {20}, {});  // restricted [10,22]
    const PositionDomain domain(ctx, cfg.max_deletion_size);
    // Brute force: every (pos,size) whose span is in range and unrestricted.
    const auto mask = oracle::restricted_mask(40, {20}, {});
    std::set<std::pair<std::size_t, std::size_t>> valid;
    for (std::size_t p = 0; p < 40; ++p)
        for (std::size_t s = 1; s <= 5 && p + s <= 40; ++s) {
            bool ok = true;
            for (std::size_t i = p; i < p + s; ++i) ok = ok && !mask[i];
            if (ok) valid.insert({p, s});
        }
    std::mt19937_64 rng(6);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (int i = 0; i < 20000; ++i) {
        const auto d = std::get<Deletion>(sample_unit(UnitKind::Deletion, cfg, domain, rng));
        EXPECT_TRUE(valid.contains({d.pos, d.size})) << d.pos << "," << d.size;
        seen.insert({d.pos, d.size});
        if (d.pos == 8) {
            EXPECT_LE(d.size, 2u);
        }
    }
    EXPECT_EQ(seen, valid);
    EXPECT_EQ(domain.max_deletion_at(8), 2u);
}

TEST(SampleUnit, InsertionMayAppend) {
    const GrammarConfig cfg;
    const ReferenceContext ctx("ACGTACGT", {}, {});
    const PositionDomain domain(ctx, cfg.max_deletion_size);
    std::mt19937_64 rng(7);
    bool appended = false;
    std::set<std::size_t> lengths;
    for (int i = 0; i < 2000; ++i) {
        const auto ins = std::get<Insertion>(sample_unit(UnitKind::Insertion, cfg, domain, rng));
        EXPECT_LE(ins.pos, 8u);
        appended = appended || ins.pos == 8;
        lengths.insert(ins.nucs.size());
    }
    EXPECT_TRUE(appended);
    EXPECT_EQ(lengths, (std::set<std::size_t>{1, 2, 3, 4, 5}));
    EXPECT_EQ(apply(parse_genotype("Ins(8,TT)"), ctx).sequence, "ACGTACGTTT");
}

TEST(SampleUnit, EmptySearchSpace) {
    GrammarConfig cfg;
    cfg.exclude(UnitKind::Insertion);
    const ReferenceContext ctx("ACGTA", {2}, {});  // every index restricted
    const PositionDomain domain(ctx, cfg.max_deletion_size);
    std::mt19937_64 rng(8);
    EXPECT_THROW(sample_unit(UnitKind::Snv, cfg, domain, rng), EmptySearchSpace);
    EXPECT_THROW(sample_genotype(cfg, domain, rng), EmptySearchSpace);
    // Appending after the last base stays possible when insertions are on.
    const GrammarConfig all;
    const Genotype g = sample_genotype(all, domain, rng);
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(position(g[0]), 5u);
}

TEST(SampleGenotype, AlwaysValidAndNeverRestricted) {
    std::mt19937_64 rng(9);
    const GrammarConfig cfg;
    std::size_t total = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t len = std::uniform_int_distribution<std::size_t>(30, 400)(rng);
        std::uniform_int_distribution<std::size_t> site(0, len - 1);
        std::vector<std::size_t> acc{site(rng), site(rng)}, don{site(rng)};
        if (std::find(acc.begin(), acc.end(), don[0]) != acc.end()) don.clear();
        const ReferenceContext ctx(oracle::random_dna(len, rng), acc, don);
        const auto mask = oracle::restricted_mask(len, acc, don);
        for (int i = 0; i < 100; ++i) {
            const Genotype g = sample_genotype(cfg, ctx, rng);
            EXPECT_TRUE(is_valid(g, ctx, cfg.limits())) << to_string(g);
            for (const DiffUnit& u : g.units()) EXPECT_FALSE(oracle::touches(mask, u)) << to_string(u);
            ++total;
        }
    }
    EXPECT_EQ(total, 10000u);
}

TEST(SampleGenotype, ExclusionModesProduceNoExcludedKinds) {
    std::mt19937_64 rng(10);
    const ReferenceContext ctx(oracle::random_dna(300, rng), {100}, {200});
    const std::vector<std::vector<UnitKind>> modes{
        {UnitKind::Deletion}, {UnitKind::Insertion}, {UnitKind::Deletion, UnitKind::Insertion}};
    for (const auto& excluded : modes) {
        GrammarConfig cfg;
        for (UnitKind k : excluded) cfg.exclude(k);
        for (int i = 0; i < 2000; ++i) {
            const Genotype g = sample_genotype(cfg, ctx, rng);
            for (UnitKind k : excluded) EXPECT_EQ(count_kind(g, k), 0u);
        }
    }
}

TEST(SampleGenotype, DeterministicGivenSeed) {
    std::mt19937_64 a(42), b(42), r(0);
    const ReferenceContext ctx(oracle::random_dna(300, r), {100}, {200});
    const GrammarConfig cfg;
    for (int i = 0; i < 200; ++i) EXPECT_EQ(sample_genotype(cfg, ctx, a), sample_genotype(cfg, ctx, b));
}
