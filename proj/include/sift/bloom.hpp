#pragma once

// Bloom filter used as a pre-filter when intersecting the byte patterns of
// two packets, together with its textbook collision-probability formula.

#include <cstdint>
#include <vector>

#include "sift/hash.hpp"

namespace sift {

// Add-only bit-array set: false positives possible, false negatives not.
class BloomFilter {
public:
    BloomFilter(const BloomParams& params, const HashParams& hash_params);

    void insert(ByteView pattern);
    bool contains(ByteView pattern) const;

    // Variants taking precomputed bit positions (for rolled hashes).
    void insert_positions(std::span<const std::uint32_t> positions);
    bool contains_positions(std::span<const std::uint32_t> positions) const;

    std::size_t inserted() const { return inserted_; }
    std::size_t popcount() const;
    const BloomParams& params() const { return params_; }
    const HashFamily& family() const { return family_; }

private:
    BloomParams params_;
    HashFamily family_;
    std::vector<std::uint64_t> bits_;
    std::size_t inserted_ = 0;
};

// Exact collision (false-positive) probability after n insertions into an
// m-bit filter with k index functions: (1 - (1 - 1/m)^(kn))^k.
double collision_probability(std::uint64_t m, std::uint64_t k, std::uint64_t n);

// The usual exponential approximation (1 - e^(-kn/m))^k. Tracks the exact
// form to within ~k/(2m) relative, which at the default m = 10000 means the
// two agree to a few parts in ten thousand (and far closer in absolute terms
// in the small-probability regime).
double collision_probability_approx(std::uint64_t m, std::uint64_t k, std::uint64_t n);

} // namespace sift
