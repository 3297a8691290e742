#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "seqforge/reference.hpp"
#include "support/oracles.hpp"

using namespace seqforge;

namespace {

InputSpec spec(std::string seq, std::vector<std::size_t> acc, std::vector<std::size_t> don,
               std::optional<std::size_t> window = std::nullopt) {
    InputSpec s;
    s.sequence = std::move(seq);
    s.acceptors = std::move(acc);
    s.donors = std::move(don);
    s.window = window;
    return s;
}

}  // namespace

TEST(BuildContext, NoWindowIsVerbatim) {
    std::mt19937_64 rng(1);
    const std::string seq = oracle::random_dna(300, rng);
    const ReferenceContext ctx = build_context(spec(seq, {100}, {200}));
    EXPECT_EQ(ctx.sequence(), seq);
    EXPECT_EQ(ctx.acceptors(), std::vector<std::size_t>{100});
    EXPECT_EQ(ctx.donors(), std::vector<std::size_t>{200});
    EXPECT_EQ(ctx.restricted_regions().size(), 2u);
    EXPECT_EQ(build_context(spec(seq, {}, {}, 300)).sequence(), seq);
}

TEST(BuildContext, AcceptorNearStartIsClipped) {
    const ReferenceContext ctx = build_context(spec(std::string(50, 'C'), {5}, {}));
    ASSERT_EQ(ctx.restricted_regions().size(), 1u);
    EXPECT_EQ(ctx.restricted_regions()[0].first, 0u);
    EXPECT_EQ(ctx.restricted_regions()[0].last, 7u);
}

TEST(BuildContext, PadsToWindow) {
    std::mt19937_64 rng(2);
    const std::string seq = oracle::random_dna(1743, rng);
    const ReferenceContext ctx = build_context(spec(seq, {600, 1300}, {700, 1400}, 10001));
    EXPECT_EQ(ctx.length(), 10001u);
    const std::size_t left = (10001 - 1743) / 2;
    EXPECT_EQ(left, 4129u);
    EXPECT_EQ(ctx.sequence().substr(left, 1743), seq);
    EXPECT_EQ(ctx.sequence().substr(0, left), std::string(left, 'A'));
    EXPECT_EQ(ctx.sequence().substr(left + 1743), std::string(10001 - 1743 - left, 'A'));
    EXPECT_EQ(ctx.acceptors(), (std::vector<std::size_t>{600 + left, 1300 + left}));
    EXPECT_EQ(ctx.donors(), (std::vector<std::size_t>{700 + left, 1400 + left}));
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(ctx.sequence()[ctx.acceptors()[i]], seq[i ? 1300 : 600]);
        EXPECT_EQ(ctx.sequence()[ctx.donors()[i]], seq[i ? 1400 : 700]);
    }
}

TEST(BuildContext, PadSymbol) {
    InputSpec s = spec("ACGT", {}, {}, 9);
    s.pad_symbol = 'G';
    EXPECT_EQ(build_context(s).sequence(), "GGACGTGGG");
    s.pad_symbol = 'N';
    EXPECT_THROW(build_context(s), ConfigError);
}

TEST(BuildContext, TrimKeepsSitesAndContent) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t len = std::uniform_int_distribution<std::size_t>(50, 600)(rng);
        const std::size_t w = std::uniform_int_distribution<std::size_t>(20, len - 1)(rng);
        const std::string seq = oracle::random_dna(len, rng);
        const std::size_t a = std::uniform_int_distribution<std::size_t>(0, len - 1)(rng);
        const std::size_t span = std::uniform_int_distribution<std::size_t>(1, w - 1)(rng);
        const std::size_t d = std::min(len - 1, a + span);
        if (d == a) continue;
        const ReferenceContext ctx = build_context(spec(seq, {a}, {d}, w));
        ASSERT_EQ(ctx.length(), w);
        const std::size_t start = seq.find(ctx.sequence());
        ASSERT_NE(start, std::string::npos);
        ASSERT_EQ(ctx.acceptors().size(), 1u);
        EXPECT_EQ(ctx.sequence()[ctx.acceptors()[0]], seq[a]);
        EXPECT_EQ(ctx.sequence()[ctx.donors()[0]], seq[d]);
        EXPECT_EQ(seq.substr(a, d - a + 1), ctx.sequence().substr(ctx.acceptors()[0], d - a + 1));
    }
}

TEST(BuildContext, TrimIsCentredOnSiteSpan) {
    const std::string seq = std::string(100, 'A') + "C" + std::string(99, 'A');
    const ReferenceContext ctx = build_context(spec(seq, {90}, {110}, 41));
    // Centre 100 sits at offset 20 of a 41-nt window.
    EXPECT_EQ(ctx.acceptors()[0], 10u);
    EXPECT_EQ(ctx.donors()[0], 30u);
    EXPECT_EQ(ctx.sequence()[20], 'C');
}

TEST(BuildContext, Errors) {
    EXPECT_THROW(build_context(spec("ACGT", {4}, {})), CoordinateOutOfBounds);
    EXPECT_THROW(build_context(spec("ACGT", {}, {9})), CoordinateOutOfBounds);
    EXPECT_THROW(build_context(spec("ACGT", {1}, {1})), CoordinateOutOfBounds);
    EXPECT_THROW(build_context(spec(std::string(100, 'A'), {10}, {60}, 50)), CassetteDoesNotFit);
    EXPECT_NO_THROW(build_context(spec(std::string(100, 'A'), {10}, {59}, 50)));
    EXPECT_THROW(build_context(spec("", {}, {})), Error);
    EXPECT_THROW(build_context(spec("ACGU", {}, {})), BadAlphabet);
    EXPECT_THROW(build_context(spec("ACGT", {}, {}, 0)), ConfigError);
}

TEST(BuildContext, RestrictedRegionsDisjointAndMatchMask) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t len = std::uniform_int_distribution<std::size_t>(10, 200)(rng);
        std::uniform_int_distribution<std::size_t> site(0, len - 1);
        std::vector<std::size_t> acc{site(rng), site(rng)}, don{site(rng), site(rng)};
        std::erase_if(don, [&](std::size_t x) { return std::find(acc.begin(), acc.end(), x) != acc.end(); });
        const ReferenceContext ctx = build_context(spec(oracle::random_dna(len, rng), acc, don));
        const auto mask = oracle::restricted_mask(len, acc, don);
        const auto& regions = ctx.restricted_regions();
        std::size_t covered = 0;
        for (std::size_t i = 0; i < regions.size(); ++i) {
            if (i > 0) {
                EXPECT_GT(regions[i].first, regions[i - 1].last + 1);
            }
            covered += regions[i].length();
        }
        EXPECT_EQ(covered, static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true)));
        for (std::size_t i = 0; i < len; ++i) EXPECT_EQ(ctx.is_restricted(i), mask[i]);
    }
}

TEST(ReadSequence, FastaAndPlain) {
    std::istringstream fa(">chr test\nacgt\nAC GT\n>second\nTTTT\n");
    EXPECT_EQ(read_sequence(fa), "ACGTACGT");
    std::istringstream plain("AC\nGT\n");
    EXPECT_EQ(read_sequence(plain), "ACGT");
    std::istringstream bad(">x\nACNT\n");
    EXPECT_THROW(read_sequence(bad), BadAlphabet);
}

TEST(LoadSequence, FileOrInline) {
    const auto path = std::filesystem::temp_directory_path() / "seqforge_ref_test.fa";
    {
        std::ofstream out(path);
        out << ">r\nGGCC\nAATT\n";
    }
    EXPECT_EQ(load_sequence(path.string()), "GGCCAATT");
    EXPECT_EQ(load_sequence("acgt"), "ACGT");
    std::filesystem::remove(path);
    const std::string sample = load_sequence(std::string(SEQFORGE_SAMPLES_DIR) + "/reference.fa");
    EXPECT_EQ(sample.size(), 300u);
}

TEST(ParseCoordinates, Forms) {
    EXPECT_EQ(parse_coordinates(""), std::vector<std::size_t>{});
    EXPECT_EQ(parse_coordinates("12,40,77"), (std::vector<std::size_t>{12, 40, 77}));
    EXPECT_THROW(parse_coordinates("1,,2"), ConfigError);
    EXPECT_THROW(parse_coordinates("-1"), ConfigError);
    EXPECT_THROW(parse_coordinates("3x"), ConfigError);
}
