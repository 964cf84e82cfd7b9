#pragma once

// Multi-pattern file scanning for the thin client: every signature is
// searched simultaneously via an Aho-Corasick automaton, files are read in
// fixed-size chunks whose overlap guarantees boundary-spanning matches.

#include <cstdint>
#include <string>
#include <vector>

#include "sift/common.hpp"
#include "sift/extract.hpp"
#include "sift/signature.hpp"
#include "sift/signature_db.hpp"

namespace sift {

struct ScanMatch {
    std::string file;
    Signature signature;
    std::uint64_t offset = 0; // first occurrence in the file

    bool operator==(const ScanMatch&) const = default;
};

struct ScanOptions {
    std::size_t chunk_size = 1 << 20; // grown automatically if a pattern is longer
    ExecMode mode = ExecMode::parallel;
};

// First match offset per (pattern, position) over an in-memory buffer;
// used directly for datagram-sized inputs and as the per-chunk kernel.
class PatternMatcher {
public:
    explicit PatternMatcher(std::vector<Bytes> patterns);

    std::size_t pattern_count() const { return patterns_.size(); }
    std::size_t max_pattern_len() const { return max_len_; }
    const Bytes& pattern(std::size_t index) const { return patterns_[index]; }

    // Walks `data` once; for every pattern found, records the smallest
    // offset (relative to `base`) into `first_offset` keyed by pattern
    // index. Entries already present are only lowered, never raised.
    void find_first(ByteView data, std::uint64_t base,
                    std::vector<std::int64_t>& first_offset) const;

private:
    struct Node {
        std::vector<std::pair<unsigned char, std::int32_t>> next; // sorted by byte
        std::int32_t fail = 0;
        std::int32_t out_link = -1;
        std::vector<std::int32_t> ends; // pattern indices ending here
    };

    std::int32_t child(std::int32_t node, unsigned char byte) const;
    std::int32_t step(std::int32_t state, unsigned char byte) const;

    std::vector<Bytes> patterns_;
    std::vector<Node> nodes_;
    std::size_t max_len_ = 0;
};

// Walks regular files under `root` (which may itself be a file), reports
// each file containing any db pattern with the first match offset per
// (file, pattern). Deterministic order: path ascending, then pattern bytes.
// Unreadable files are skipped with a warning.
std::vector<ScanMatch> scan_path(const SignatureDB& db, const std::string& root,
                                 const ScanOptions& options = {});

} // namespace sift
