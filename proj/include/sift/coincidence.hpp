#pragma once

// Per-packet-set coincidence counting: how often each discovered pattern
// recurs across analyzed pairs, the sqrt(S/N) occurrence fraction, and the
// two-stage filter (absolute threshold, then a population outlier test) that
// turns counts into suspects.

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "sift/extract.hpp"

namespace sift {

struct CoincidenceEntry {
    Pattern pattern;
    std::uint64_t count = 0;  // S: pairs in which the pattern was discovered
    double fraction = 0.0;    // sqrt(count / N)

    bool operator==(const CoincidenceEntry&) const = default;
};

// sqrt(count / packets). Throws ArgError when packets == 0.
double coincidence_fraction(std::uint64_t count, std::uint64_t packets);

// One table per packet set. Entries are keyed by exact pattern bytes; the
// stored hash only accelerates lookups, so colliding patterns stay distinct.
class CoincidenceTable {
public:
    explicit CoincidenceTable(std::uint32_t packets_in_set);

    // Inserts with count 1 or increments; the fraction is kept current.
    void record(const Pattern& pattern);

    std::uint32_t packet_count() const { return packet_count_; }
    std::size_t distinct_patterns() const { return entries_.size(); }
    const CoincidenceEntry* find(ByteView pattern_bytes) const;

    // Unordered snapshot of all entries.
    std::vector<CoincidenceEntry> entries() const;

private:
    std::uint32_t packet_count_;
    std::unordered_map<Bytes, CoincidenceEntry> entries_;
};

struct FilterPolicy {
    double threshold = 0.3;          // stage 1: keep entries with fraction >= threshold
    double deviation_multiplier = 3.0; // stage 2: keep fraction > mean + c * stddev
    std::size_t min_population = 10; // stage 2 engages only at this many distinct patterns

    void validate() const;
};

// Stage 1 selects entries with fraction >= threshold. Stage 2, applied only
// when the table holds at least min_population distinct patterns, computes
// the population mean and standard deviation of the fraction over ALL
// entries and keeps candidates strictly above mean + multiplier * stddev.
// Output is sorted by fraction descending, ties by pattern bytes ascending.
std::vector<CoincidenceEntry> flag_suspects(const CoincidenceTable& table,
                                            const FilterPolicy& policy);

// Union of flag_suspects over the corpus's tables, deduplicated by pattern
// bytes keeping the maximum fraction; same ordering as flag_suspects.
// Throws ArgError on an empty table list.
std::vector<CoincidenceEntry> aggregate_corpus_suspects(std::span<const CoincidenceTable> tables,
                                                        const FilterPolicy& policy);

} // namespace sift
