#pragma once

#include <cstdint>

#include "sift/common.hpp"

namespace sift {

// A distributable cure: the flagged pattern bytes plus their hash under the
// active hash settings. Pattern length is always at least the configured
// minimum extraction length.
struct Signature {
    Bytes pattern_bytes;
    std::uint64_t hash = 0;
    std::uint64_t created_at = 0; // unix seconds

    bool operator==(const Signature&) const = default;
};

} // namespace sift
