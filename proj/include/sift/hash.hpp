#pragma once

// Polynomial pattern hashing: the single hash used for coincidence-table
// keys and, in pairs, to derive the Bloom filter's k index functions.

#include <cstdint>
#include <span>

#include "sift/common.hpp"

namespace sift {

struct HashParams {
    std::uint64_t base = 257;        // first prime above the byte range
    std::uint64_t modulus = 10000;   // equals the Bloom filter bit count by default
    std::size_t min_pattern_len = 20;

    void validate() const;
};

// H = c1*q^(len-1) + c2*q^(len-2) + ... + c_len  (mod M), evaluated by Horner
// with a reduction at every step so no intermediate overflows. Throws ArgError
// on an empty pattern.
std::uint64_t hash_pattern(ByteView pattern, const HashParams& params);

// Rolling evaluation of hash_pattern over a fixed-length window; produces the
// same value as recomputing hash_pattern on every window.
class RollingWindowHash {
public:
    RollingWindowHash(std::size_t window_len, std::uint64_t base, std::uint64_t modulus);

    // Seeds the state from the first window (window.size() == window_len).
    void init(ByteView window);
    // Slides one byte: `outgoing` leaves on the left, `incoming` enters on the right.
    void roll(unsigned char outgoing, unsigned char incoming);
    std::uint64_t value() const { return value_; }

private:
    std::uint64_t base_;
    std::uint64_t modulus_;
    std::uint64_t lead_power_; // base^(window_len-1) mod modulus
    std::uint64_t value_ = 0;
};

struct BloomParams {
    std::size_t bit_count = 10000;       // m
    unsigned hash_count = 4;             // k
    std::size_t expected_insertions = 1500;

    void validate() const;
};

// Family of k index functions over [0, m): h_i(p) = (H1 + i*H2 + i^2) mod m
// with H1 = hash_pattern(p) under the base parameters and H2 the same hash
// with base q+2, forced odd (extended double hashing).
class HashFamily {
public:
    HashFamily(const BloomParams& bloom, const HashParams& base);

    unsigned hash_count() const { return bloom_.hash_count; }
    std::size_t bit_count() const { return bloom_.bit_count; }

    // Fills out[0 .. hash_count) with bit positions for `pattern`.
    void positions(ByteView pattern, std::span<std::uint32_t> out) const;
    // Same, from precomputed component hashes (as produced by component_hashes
    // or a pair of RollingWindowHash instances over bases q and q+2).
    void positions_from(std::uint64_t h1, std::uint64_t h2, std::span<std::uint32_t> out) const;

    std::pair<std::uint64_t, std::uint64_t> component_hashes(ByteView pattern) const;
    const HashParams& base_params() const { return base_; }
    const HashParams& alt_params() const { return alt_; }

private:
    BloomParams bloom_;
    HashParams base_;
    HashParams alt_; // base_ with q+2
};

} // namespace sift
