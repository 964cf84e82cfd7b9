#include "sift/extract.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sift {

Pattern make_pattern(Bytes bytes, const HashParams& params) {
    if (bytes.size() < params.min_pattern_len)
        throw ArgError("pattern shorter than minimum pattern length");
    std::uint64_t h = hash_pattern(bytes, params);
    return Pattern{std::move(bytes), h};
}

void ExtractionConfig::validate() const {
    if (min_len < 1)
        throw ArgError("minimum pattern length must be >= 1");
    if (max_len && *max_len < min_len)
        throw ArgError("maximum pattern length must be >= minimum");
}

std::vector<IndexPair> pair_packets(std::size_t count, Pairing strategy) {
    std::vector<IndexPair> pairs;
    if (count < 2)
        return pairs;
    if (strategy == Pairing::adjacent_disjoint) {
        pairs.reserve(count / 2);
        for (std::size_t i = 0; i + 1 < count; i += 2)
            pairs.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i + 1));
    } else {
        pairs.reserve(count * (count - 1) / 2);
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t j = i + 1; j < count; ++j)
                pairs.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    }
    return pairs;
}

namespace {

// Splits a maximal run into max_len windows stepping by max_len; the final
// shorter remainder survives only if it still reaches min_len.
void window_split(ByteView run, std::size_t min_len, std::size_t max_len,
                  std::vector<Bytes>& out) {
    std::size_t pos = 0;
    while (run.size() - pos >= max_len) {
        out.emplace_back(run.substr(pos, max_len));
        pos += max_len;
    }
    if (run.size() - pos >= min_len)
        out.emplace_back(run.substr(pos));
}

} // namespace

std::vector<Pattern> extract_common_patterns(const Packet& first, const Packet& second,
                                             const ExtractionConfig& config,
                                             const HashParams& hash_params,
                                             const BloomParams& bloom_params) {
    config.validate();
    const Bytes& a = first.payload();
    const Bytes& b = second.payload();
    const std::size_t gram = config.min_len;
    if (a.size() < gram || b.size() < gram)
        return {};

    // Index every gram of `a`: Bloom filter as the fast pre-screen plus an
    // exact hash -> positions table for verification.
    BloomFilter filter(bloom_params, hash_params);
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> index;
    const HashFamily& family = filter.family();
    const unsigned k = family.hash_count();
    std::uint32_t positions[32];

    RollingWindowHash h1(gram, hash_params.base, hash_params.modulus);
    RollingWindowHash h2(gram, hash_params.base + 2, hash_params.modulus);
    h1.init(ByteView(a).substr(0, gram));
    h2.init(ByteView(a).substr(0, gram));
    for (std::size_t i = 0;; ++i) {
        family.positions_from(h1.value(), h2.value(), {positions, k});
        filter.insert_positions({positions, k});
        index[h1.value()].push_back(static_cast<std::uint32_t>(i));
        if (i + gram >= a.size())
            break;
        h1.roll(static_cast<unsigned char>(a[i]), static_cast<unsigned char>(a[i + gram]));
        h2.roll(static_cast<unsigned char>(a[i]), static_cast<unsigned char>(a[i + gram]));
    }

    // Slide over `b`, extend verified gram hits to maximal runs. One entry
    // per diagonal (i - j) suppresses rediscovery of the same run from every
    // gram it contains.
    std::unordered_set<Bytes> candidates;
    std::unordered_map<std::int64_t, std::size_t> diagonal_end; // diag -> end-in-b of last run
    RollingWindowHash p1(gram, hash_params.base, hash_params.modulus);
    RollingWindowHash p2(gram, hash_params.base + 2, hash_params.modulus);
    p1.init(ByteView(b).substr(0, gram));
    p2.init(ByteView(b).substr(0, gram));
    for (std::size_t j = 0;; ++j) {
        family.positions_from(p1.value(), p2.value(), {positions, k});
        if (filter.contains_positions({positions, k})) {
            if (auto it = index.find(p1.value()); it != index.end()) {
                for (std::uint32_t i : it->second) {
                    if (a.compare(i, gram, b, j, gram) != 0)
                        continue; // hash collision
                    std::int64_t diag = static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j);
                    if (auto de = diagonal_end.find(diag);
                        de != diagonal_end.end() && j + gram <= de->second)
                        continue; // inside an already-extended run
                    std::size_t s1 = i, s2 = j;
                    while (s1 > 0 && s2 > 0 && a[s1 - 1] == b[s2 - 1]) {
                        --s1;
                        --s2;
                    }
                    std::size_t e1 = i + gram, e2 = j + gram;
                    while (e1 < a.size() && e2 < b.size() && a[e1] == b[e2]) {
                        ++e1;
                        ++e2;
                    }
                    diagonal_end[diag] = e2;
                    candidates.insert(a.substr(s1, e1 - s1));
                }
            }
        }
        if (j + gram >= b.size())
            break;
        p1.roll(static_cast<unsigned char>(b[j]), static_cast<unsigned char>(b[j + gram]));
        p2.roll(static_cast<unsigned char>(b[j]), static_cast<unsigned char>(b[j + gram]));
    }

    // Keep only strings not contained in a longer candidate. Equal-length
    // distinct strings cannot contain each other, so scanning longest-first
    // against the kept list is enough.
    std::vector<Bytes> sorted(candidates.begin(), candidates.end());
    std::sort(sorted.begin(), sorted.end(), [](const Bytes& x, const Bytes& y) {
        return x.size() != y.size() ? x.size() > y.size() : x < y;
    });
    std::vector<Bytes> kept;
    for (Bytes& s : sorted) {
        bool contained = std::any_of(kept.begin(), kept.end(), [&](const Bytes& t) {
            return t.find(s) != Bytes::npos;
        });
        if (!contained)
            kept.push_back(std::move(s));
    }

    std::vector<Bytes> final_strings;
    if (config.max_len) {
        std::unordered_set<Bytes> dedup;
        for (const Bytes& s : kept) {
            if (s.size() <= *config.max_len) {
                dedup.insert(s);
            } else {
                std::vector<Bytes> windows;
                window_split(s, config.min_len, *config.max_len, windows);
                dedup.insert(std::make_move_iterator(windows.begin()),
                             std::make_move_iterator(windows.end()));
            }
        }
        final_strings.assign(dedup.begin(), dedup.end());
    } else {
        final_strings = std::move(kept);
    }

    std::sort(final_strings.begin(), final_strings.end());
    std::vector<Pattern> result;
    result.reserve(final_strings.size());
    for (Bytes& s : final_strings) {
        std::uint64_t h = hash_pattern(s, hash_params);
        result.push_back(Pattern{std::move(s), h});
    }
    return result;
}

std::vector<PatternOccurrence> extract_set_patterns(const PacketSet& set,
                                                    const ExtractionConfig& config,
                                                    const HashParams& hash_params,
                                                    const BloomParams& bloom_params,
                                                    ExecMode mode) {
    config.validate();
    const std::vector<IndexPair> pairs = pair_packets(set.size(), config.pairing);
    std::vector<std::vector<Pattern>> per_pair(pairs.size());

    if (mode == ExecMode::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            per_pair[p] = extract_common_patterns(set.packets()[pairs[p].first],
                                                  set.packets()[pairs[p].second], config,
                                                  hash_params, bloom_params);
        }
    } else {
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            per_pair[p] = extract_common_patterns(set.packets()[pairs[p].first],
                                                  set.packets()[pairs[p].second], config,
                                                  hash_params, bloom_params);
        }
    }

    // Merge in pair order; extract_common_patterns output is already sorted
    // and unique per pair, so the result is deterministic.
    std::vector<PatternOccurrence> out;
    for (std::size_t p = 0; p < per_pair.size(); ++p)
        for (Pattern& pattern : per_pair[p])
            out.push_back(PatternOccurrence{std::move(pattern), static_cast<std::uint32_t>(p)});
    return out;
}

} // namespace sift
