#include "oracles.hpp"

#include <algorithm>
#include <set>

namespace oracle {

std::vector<sift::Bytes> common_patterns(sift::ByteView a, sift::ByteView b,
                                         std::size_t min_len,
                                         std::optional<std::size_t> max_len) {
    std::set<sift::Bytes> subs_b;
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t len = 1; len <= b.size() - i; ++len)
            subs_b.emplace(b.substr(i, len));

    std::set<sift::Bytes> common;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t len = 1; len <= a.size() - i; ++len) {
            sift::Bytes s(a.substr(i, len));
            if (subs_b.count(s))
                common.insert(std::move(s));
        }

    // A common string is non-maximal iff it is a proper substring of another
    // common string, iff it appears as the length-1 prefix or suffix of one.
    std::set<sift::Bytes> shadowed;
    for (const sift::Bytes& s : common)
        if (s.size() >= 2) {
            shadowed.insert(s.substr(0, s.size() - 1));
            shadowed.insert(s.substr(1));
        }

    std::set<sift::Bytes> result;
    for (const sift::Bytes& s : common) {
        if (s.size() < min_len || shadowed.count(s))
            continue;
        if (!max_len) {
            result.insert(s);
            continue;
        }
        std::size_t pos = 0;
        while (s.size() - pos >= *max_len) {
            result.insert(s.substr(pos, *max_len));
            pos += *max_len;
        }
        if (s.size() - pos >= min_len)
            result.insert(s.substr(pos));
    }
    return {result.begin(), result.end()};
}

std::vector<std::int64_t> first_offsets(sift::ByteView buffer,
                                        const std::vector<sift::Bytes>& patterns) {
    std::vector<std::int64_t> out;
    out.reserve(patterns.size());
    for (const sift::Bytes& p : patterns) {
        std::size_t pos = buffer.find(p);
        out.push_back(pos == sift::ByteView::npos ? -1 : static_cast<std::int64_t>(pos));
    }
    return out;
}

sift::Bytes random_bytes(std::mt19937_64& rng, std::size_t len, unsigned alphabet) {
    sift::Bytes out(len, '\0');
    for (std::size_t i = 0; i < len; ++i)
        out[i] = static_cast<char>(rng() % alphabet);
    return out;
}

} // namespace oracle
