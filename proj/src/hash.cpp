#include "sift/hash.hpp"

namespace sift {

void HashParams::validate() const {
    if (base < 2)
        throw ArgError("hash base must be >= 2");
    if (modulus < 2)
        throw ArgError("hash modulus must be >= 2");
    if (min_pattern_len < 1)
        throw ArgError("minimum pattern length must be >= 1");
    // (modulus-1)*base + 255 must fit in uint64 for the Horner step.
    if (modulus - 1 > (UINT64_MAX - 255) / base)
        throw ArgError("hash base*modulus too large for 64-bit evaluation");
}

std::uint64_t hash_pattern(ByteView pattern, const HashParams& params) {
    params.validate();
    if (pattern.empty())
        throw ArgError("hash_pattern: empty pattern");
    std::uint64_t h = 0;
    for (unsigned char c : pattern)
        h = (h * params.base + c) % params.modulus;
    return h;
}

namespace {

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
    // mod is bounded so that mod*mod-ish products fit; use __uint128_t to be safe.
    unsigned __int128 result = 1;
    unsigned __int128 b = base % mod;
    while (exp > 0) {
        if (exp & 1)
            result = result * b % mod;
        b = b * b % mod;
        exp >>= 1;
    }
    return static_cast<std::uint64_t>(result);
}

} // namespace

RollingWindowHash::RollingWindowHash(std::size_t window_len, std::uint64_t base, std::uint64_t modulus)
    : base_(base), modulus_(modulus), lead_power_(mod_pow(base, window_len - 1, modulus)) {
    if (window_len == 0)
        throw ArgError("rolling hash window must be non-empty");
}

void RollingWindowHash::init(ByteView window) {
    value_ = 0;
    for (unsigned char c : window)
        value_ = (value_ * base_ + c) % modulus_;
}

void RollingWindowHash::roll(unsigned char outgoing, unsigned char incoming) {
    std::uint64_t drop = outgoing * lead_power_ % modulus_;
    value_ = ((value_ + modulus_ - drop) % modulus_ * base_ + incoming) % modulus_;
}

void BloomParams::validate() const {
    if (bit_count < 8)
        throw ArgError("bloom bit count must be >= 8");
    if (hash_count < 1 || hash_count > 32)
        throw ArgError("bloom hash count must be in [1, 32]");
}

HashFamily::HashFamily(const BloomParams& bloom, const HashParams& base)
    : bloom_(bloom), base_(base), alt_(base) {
    bloom_.validate();
    base_.validate();
    alt_.base = base_.base + 2;
    alt_.validate();
}

void HashFamily::positions_from(std::uint64_t h1, std::uint64_t h2,
                                std::span<std::uint32_t> out) const {
    std::uint64_t step = h2 | 1; // odd step keeps the probe sequence from degenerating
    std::uint64_t m = bloom_.bit_count;
    for (std::uint64_t i = 0; i < bloom_.hash_count; ++i)
        out[i] = static_cast<std::uint32_t>((h1 + i * step + i * i) % m);
}

std::pair<std::uint64_t, std::uint64_t> HashFamily::component_hashes(ByteView pattern) const {
    return {hash_pattern(pattern, base_), hash_pattern(pattern, alt_)};
}

void HashFamily::positions(ByteView pattern, std::span<std::uint32_t> out) const {
    auto [h1, h2] = component_hashes(pattern);
    positions_from(h1, h2, out);
}

} // namespace sift
