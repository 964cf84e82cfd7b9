#include "sift/bloom.hpp"

#include <bit>
#include <cmath>

namespace sift {

BloomFilter::BloomFilter(const BloomParams& params, const HashParams& hash_params)
    : params_(params), family_(params, hash_params), bits_((params.bit_count + 63) / 64, 0) {}

void BloomFilter::insert_positions(std::span<const std::uint32_t> positions) {
    for (std::uint32_t p : positions)
        bits_[p >> 6] |= std::uint64_t{1} << (p & 63);
    ++inserted_;
}

bool BloomFilter::contains_positions(std::span<const std::uint32_t> positions) const {
    for (std::uint32_t p : positions)
        if (!(bits_[p >> 6] & std::uint64_t{1} << (p & 63)))
            return false;
    return true;
}

namespace {

constexpr unsigned kMaxHashCount = 32;

} // namespace

void BloomFilter::insert(ByteView pattern) {
    std::uint32_t pos[kMaxHashCount];
    family_.positions(pattern, {pos, family_.hash_count()});
    insert_positions({pos, family_.hash_count()});
}

bool BloomFilter::contains(ByteView pattern) const {
    std::uint32_t pos[kMaxHashCount];
    family_.positions(pattern, {pos, family_.hash_count()});
    return contains_positions({pos, family_.hash_count()});
}

std::size_t BloomFilter::popcount() const {
    std::size_t n = 0;
    for (std::uint64_t w : bits_)
        n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

double collision_probability(std::uint64_t m, std::uint64_t k, std::uint64_t n) {
    if (m < 1 || k < 1)
        throw ArgError("collision_probability: m and k must be >= 1");
    if (n == 0)
        return 0.0;
    double kn = static_cast<double>(k) * static_cast<double>(n);
    // (1-1/m)^(kn) via exp/log1p keeps precision for large m.
    double unset = std::exp(kn * std::log1p(-1.0 / static_cast<double>(m)));
    return std::pow(1.0 - unset, static_cast<double>(k));
}

double collision_probability_approx(std::uint64_t m, std::uint64_t k, std::uint64_t n) {
    if (m < 1 || k < 1)
        throw ArgError("collision_probability_approx: m and k must be >= 1");
    if (n == 0)
        return 0.0;
    double kn = static_cast<double>(k) * static_cast<double>(n);
    return std::pow(-std::expm1(-kn / static_cast<double>(m)), static_cast<double>(k));
}

} // namespace sift
