#pragma once

// The thin client's persistent signature store. Entries are keyed by exact
// pattern bytes; the disk form is the same AMP1 encoding used on the wire.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sift/common.hpp"
#include "sift/signature.hpp"

namespace sift {

class SignatureDB {
public:
    SignatureDB() = default;

    // Reads an AMP1 file. Throws IoError if the file cannot be opened and
    // FormatError if it does not decode.
    static SignatureDB load(const std::string& path);

    // Adds signatures not yet present (by pattern bytes); returns how many
    // were new. Refreshes updated_at whenever anything was added.
    std::size_t merge(std::span<const Signature> signatures);

    // Writes the AMP1 encoding through a dot-prefixed temp file renamed into
    // place, so readers never observe a half-written database.
    void save(const std::string& path) const;

    std::size_t size() const { return entries_.size(); }
    bool contains(ByteView pattern_bytes) const;
    const Signature* find(ByteView pattern_bytes) const;

    // Sorted by pattern bytes; also the canonical persisted order.
    std::vector<Signature> entries() const;

    std::uint64_t updated_at() const { return updated_at_; }

    bool operator==(const SignatureDB& other) const { return entries_ == other.entries_; }

private:
    std::map<Bytes, Signature, std::less<>> entries_;
    std::uint64_t updated_at_ = 0;
};

} // namespace sift
