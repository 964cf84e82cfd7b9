#pragma once

// CORP/PSET binary serialization. All scalars are big-endian.
//
//   PSET block: "PSET", version u16 = 1, packet_count u32,
//               then per packet: payload_len u32 + payload bytes.
//   CORP file:  "CORP", version u16 = 1, created_at u64 (unix seconds),
//               set_count u16, then per set: block_len u32 + PSET block.
//
// Capture-side source tags are not part of the format; a decoded corpus
// carries payloads only.

#include <filesystem>

#include "sift/packet.hpp"

namespace sift {

Bytes write_packet_set(const PacketSet& set);
PacketSet read_packet_set(ByteView bytes);

Bytes write_corpus(const Corpus& corpus);
// Throws FormatError naming the offending field; rejects trailing bytes so
// that write_corpus(read_corpus(b)) == b for every accepted b.
Corpus read_corpus(ByteView bytes);

Corpus read_corpus_file(const std::filesystem::path& path);
void write_corpus_file(const Corpus& corpus, const std::filesystem::path& path);

} // namespace sift
