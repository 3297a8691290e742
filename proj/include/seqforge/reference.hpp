#pragma once

// Reference input preparation: sequence loading, optional fitting to a fixed
// oracle window, and construction of the ReferenceContext.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "seqforge/error.hpp"
#include "seqforge/seqdiff.hpp"

namespace seqforge {

struct InputSpec {
    std::string sequence;
    std::vector<std::size_t> acceptors;
    std::vector<std::size_t> donors;
    std::optional<std::size_t> window;  // oracle input length
    char pad_symbol = 'A';
    RestrictionOffsets offsets;
};

/// Reads plain text or a single FASTA record (header ignored, stops at a
/// second header). Whitespace is dropped and letters upper-cased.
inline std::string read_sequence(std::istream& is) {
    std::string out, line;
    bool seen_header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.front() == '>') {
            if (seen_header || !out.empty()) break;
            seen_header = true;
            continue;
        }
        for (char c : line) {
            if (!std::isspace(static_cast<unsigned char>(c)))
                out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        }
    }
    require_alphabet(out);
    return out;
}

/// `source` is a path when such a file exists, otherwise an inline sequence.
inline std::string load_sequence(const std::string& source) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(source, ec)) {
        std::ifstream in(source);
        if (!in) throw Error("cannot open " + source);
        return read_sequence(in);
    }
    std::istringstream in(source);
    return read_sequence(in);
}

/// Parses "12,40,77" (empty string gives an empty list).
inline std::vector<std::size_t> parse_coordinates(std::string_view text) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find(',', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string piece(text.substr(start, end - start));
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(piece, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (piece.empty() || used != piece.size() || piece.front() == '-')
            throw ConfigError("bad coordinate '" + piece + "'");
        out.push_back(static_cast<std::size_t>(v));
        start = end + 1;
    }
    return out;
}

/// Builds the context, fitting the sequence to `window` when set: shorter
/// sequences are padded symmetrically (extra symbol on the right), longer ones
/// trimmed around the centre of the splice-site span.
inline ReferenceContext build_context(const InputSpec& spec) {
    require_alphabet(spec.sequence);
    const std::size_t len = spec.sequence.size();
    if (len == 0) throw Error("empty reference sequence");
    for (std::size_t a : spec.acceptors)
        if (a >= len) throw CoordinateOutOfBounds("acceptor " + std::to_string(a) + " outside sequence of length " + std::to_string(len));
    for (std::size_t d : spec.donors)
        if (d >= len) throw CoordinateOutOfBounds("donor " + std::to_string(d) + " outside sequence of length " + std::to_string(len));
    for (std::size_t a : spec.acceptors)
        if (std::find(spec.donors.begin(), spec.donors.end(), a) != spec.donors.end())
            throw CoordinateOutOfBounds("index " + std::to_string(a) + " is both acceptor and donor");

    if (!spec.window || *spec.window == len) {
        return ReferenceContext(spec.sequence, spec.acceptors, spec.donors, spec.offsets);
    }
    const std::size_t w = *spec.window;
    if (w == 0) throw ConfigError("window must be positive");

    std::string seq;
    auto shift = [](const std::vector<std::size_t>& v, std::ptrdiff_t by) {
        std::vector<std::size_t> out;
        for (std::size_t x : v) out.push_back(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(x) + by));
        return out;
    };
    if (len < w) {
        if (!is_nucleotide(spec.pad_symbol))
            throw ConfigError(std::string("pad symbol '") + spec.pad_symbol + "' is not a nucleotide");
        const std::size_t left = (w - len) / 2;
        seq.assign(left, spec.pad_symbol);
        seq += spec.sequence;
        seq.append(w - len - left, spec.pad_symbol);
        const auto by = static_cast<std::ptrdiff_t>(left);
        return ReferenceContext(std::move(seq), shift(spec.acceptors, by), shift(spec.donors, by), spec.offsets);
    }

    std::vector<std::size_t> sites = spec.acceptors;
    sites.insert(sites.end(), spec.donors.begin(), spec.donors.end());
    std::size_t start = (len - w) / 2;
    if (!sites.empty()) {
        const auto [lo, hi] = std::minmax_element(sites.begin(), sites.end());
        if (*hi - *lo + 1 > w)
            throw CassetteDoesNotFit("splice-site span of " + std::to_string(*hi - *lo + 1) +
                                     " nt does not fit window " + std::to_string(w));
        const std::size_t centre = (*lo + *hi) / 2;
        start = centre >= w / 2 ? centre - w / 2 : 0;
        start = std::min(start, len - w);
        start = std::min(start, *lo);
        start = std::max(start, *hi + 1 >= w ? *hi + 1 - w : 0);
    }
    seq = spec.sequence.substr(start, w);
    const auto by = -static_cast<std::ptrdiff_t>(start);
    return ReferenceContext(std::move(seq), shift(spec.acceptors, by), shift(spec.donors, by), spec.offsets);
}

}  // namespace seqforge
