#pragma once

// Common-pattern extraction between packet pairs: all maximal byte strings
// shared by both payloads, at or above a minimum length, found by sliding a
// Bloom-filtered gram probe over one payload against an index of the other.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sift/bloom.hpp"
#include "sift/packet.hpp"

namespace sift {

// A byte string found common to a packet pair, with its hash under the
// active parameters.
struct Pattern {
    Bytes bytes;
    std::uint64_t hash = 0;

    std::size_t length() const { return bytes.size(); }
    bool operator==(const Pattern&) const = default;
};

Pattern make_pattern(Bytes bytes, const HashParams& params);

enum class Pairing {
    adjacent_disjoint, // (0,1), (2,3), ...; odd trailing packet unpaired
    all_pairs,         // all C(N,2) pairs in lexicographic index order
};

struct ExtractionConfig {
    std::size_t min_len = 20;
    std::optional<std::size_t> max_len; // when set, long runs are windowed
    Pairing pairing = Pairing::adjacent_disjoint;

    void validate() const;
};

using IndexPair = std::pair<std::uint32_t, std::uint32_t>;

// Index pairs to analyze for a set of `count` packets. Fewer than two
// packets yields an empty list.
std::vector<IndexPair> pair_packets(std::size_t count, Pairing strategy);

// All maximal common substrings of the two payloads with length >= min_len,
// sorted by bytes ascending. "Maximal" means not a substring of any other
// common substring; when max_len is set, longer runs are split into
// consecutive max_len windows (a final shorter remainder is kept only if it
// still reaches min_len). The Bloom filter only pre-screens gram probes;
// every result is verified byte-for-byte, so the output is exact.
std::vector<Pattern> extract_common_patterns(const Packet& first, const Packet& second,
                                             const ExtractionConfig& config,
                                             const HashParams& hash_params,
                                             const BloomParams& bloom_params);

struct PatternOccurrence {
    Pattern pattern;
    std::uint32_t pair_index; // index into pair_packets(...) for the owning set

    bool operator==(const PatternOccurrence&) const = default;
};

enum class ExecMode {
    serial,   // reference implementation
    parallel, // OpenMP over packet pairs; identical output by construction
};

// Runs pair_packets + extract_common_patterns over a whole set. Each
// (pattern, pair) appears at most once. Output is ordered by pair index,
// then pattern bytes, regardless of execution mode.
std::vector<PatternOccurrence> extract_set_patterns(const PacketSet& set,
                                                    const ExtractionConfig& config,
                                                    const HashParams& hash_params,
                                                    const BloomParams& bloom_params,
                                                    ExecMode mode = ExecMode::parallel);

} // namespace sift
