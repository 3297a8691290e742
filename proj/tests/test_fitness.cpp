#include <gtest/gtest.h>

#include <random>

#include "seqforge/fitness.hpp"
#include "support/oracles.hpp"

using namespace seqforge;

namespace {

std::string code(std::size_t i) {
    std::string s(8, 'A');
    for (std::size_t k = 0; k < 8; ++k, i /= 4) s[7 - k] = "ACGT"[i % 4];
    return s;
}

// Fills bins to the given counts with predictions at bin centres.
Archive with_counts(const std::vector<std::size_t>& counts, std::size_t capacity = 5000) {
    ArchiveParams p;
    p.bin_count = counts.size();
    p.capacity = capacity;
    Archive a(p);
    std::size_t id = 0;
    for (std::size_t b = 0; b < counts.size(); ++b)
        for (std::size_t k = 0; k < counts[b]; ++k)
            a.insert_unchecked({code(id++), "", (b + 0.5) / static_cast<double>(counts.size()), 0, 0, 0});
    return a;
}

double centre(std::size_t b, std::size_t n) { return (b + 0.5) / static_cast<double>(n); }

}  // namespace

TEST(BinFiller, Examples) {
    EXPECT_EQ(bin_filler(0.3, Archive{}).value, 1.0);
    std::vector<std::size_t> c(40, 0);
    c[10] = 125;
    c[11] = 50;
    const Archive a = with_counts(c);
    EXPECT_EQ(bin_filler(centre(10, 40), a).value, 0.0);
    EXPECT_NEAR(bin_filler(centre(11, 40), a).value, 0.6, 1e-15);
    EXPECT_EQ(bin_filler(centre(12, 40), a).function, FitnessKind::BinFiller);
}

TEST(BinFiller, FlooredAtZeroAndMonotone) {
    ArchiveParams p;
    p.capacity = 40;
    p.bin_count = 4;  // T = 10
    Archive a(p);
    double prev = 2.0;
    for (std::size_t k = 0; k < 15; ++k) {
        const double v = bin_filler(0.1, a).value;
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        EXPECT_LE(v, prev);
        EXPECT_NEAR(v, std::max(0.0, 1.0 - k / 10.0), 1e-15);
        prev = v;
        a.insert_unchecked({code(k), "", 0.1, 0, 0, 0});
    }
}

TEST(Iad, Examples) {
    EXPECT_EQ(iad(0.4, Archive{}).value, 0.0);
    const Archive a = with_counts({3, 1});
    EXPECT_NEAR(iad(0.75, a).value, 0.1596724, 1e-6);
    EXPECT_NEAR(iad(0.25, a).value, -0.0893501, 1e-6);
    EXPECT_NEAR(iad(0.75, a).value,
                oracle::normalized_entropy({3, 2}) - oracle::normalized_entropy({3, 1}), 1e-14);
    EXPECT_EQ(iad(0.75, a).function, FitnessKind::Iad);
}

TEST(Iad, UniformArchiveStalls) {
    for (std::size_t n : {2u, 5u, 40u}) {
        const Archive a = with_counts(std::vector<std::size_t>(n, 3));
        for (std::size_t b = 0; b < n; ++b) EXPECT_LT(iad(centre(b, n), a).value, 0.0);
    }
}

TEST(Iad, MinimumBinBeatsMaximumBin) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::size_t> c(0, 12);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<std::size_t> counts(2 + trial % 39);
        for (auto& x : counts) x = c(rng);
        const Archive a = with_counts(counts, 100000);
        const auto lo = static_cast<std::size_t>(std::min_element(counts.begin(), counts.end()) - counts.begin());
        const auto hi = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        const double v_lo = iad(centre(lo, counts.size()), a).value;
        const double v_hi = iad(centre(hi, counts.size()), a).value;
        EXPECT_GE(v_lo, v_hi - 1e-15);
        EXPECT_GE(v_lo, -1.0);
        EXPECT_LE(v_lo, 1.0);
    }
}

TEST(Fitness, PureReads) {
    const Archive a = with_counts({5, 0, 2, 9, 1});
    const ArchiveMetrics before = a.metrics();
    const std::size_t size = a.size();
    for (double p : {0.0, 0.1, 0.3, 0.5, 0.77, 1.0}) {
        bin_filler(p, a);
        iad(p, a);
        evaluate_fitness(FitnessKind::Iad, p, a);
    }
    EXPECT_EQ(a.metrics(), before);
    EXPECT_EQ(a.size(), size);
}

TEST(Fitness, Dispatch) {
    const Archive a = with_counts({3, 1});
    EXPECT_EQ(evaluate_fitness(FitnessKind::BinFiller, 0.75, a).value, bin_filler(0.75, a).value);
    EXPECT_EQ(evaluate_fitness(FitnessKind::Iad, 0.75, a).value, iad(0.75, a).value);
    EXPECT_EQ(parse_fitness_kind("bin-filler"), FitnessKind::BinFiller);
    EXPECT_EQ(parse_fitness_kind("iad"), FitnessKind::Iad);
    EXPECT_THROW(parse_fitness_kind("novelty"), ConfigError);
}
