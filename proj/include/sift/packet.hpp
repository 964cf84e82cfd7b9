#pragma once

// Captured payloads and their grouping into the units the detector analyzes:
// fixed-size packet sets, several of which form a corpus.

#include <cstdint>
#include <vector>

#include "sift/common.hpp"

namespace sift {

constexpr std::size_t kMaxPayloadLen = 65535;
constexpr std::size_t kDefaultPacketsPerSet = 100;
constexpr std::size_t kDefaultSetsPerCorpus = 10;

// One captured application payload. Immutable after construction.
class Packet {
public:
    Packet() = default;
    explicit Packet(Bytes payload, std::string source_id = {});

    const Bytes& payload() const { return payload_; }
    const std::string& source_id() const { return source_id_; }

    bool operator==(const Packet&) const = default;

private:
    Bytes payload_;
    std::string source_id_;
};

// An ordered group of packets analyzed as one unit; its size is the N in the
// coincidence fraction.
class PacketSet {
public:
    PacketSet() = default;
    explicit PacketSet(std::vector<Packet> packets) : packets_(std::move(packets)) {}

    const std::vector<Packet>& packets() const { return packets_; }
    std::size_t size() const { return packets_.size(); }

    bool operator==(const PacketSet&) const = default;

private:
    std::vector<Packet> packets_;
};

struct Corpus {
    std::vector<PacketSet> sets;
    std::uint64_t created_at = 0; // unix seconds

    bool operator==(const Corpus&) const = default;
};

// Groups consecutive runs of exactly `per_set` packets into PacketSets; a
// trailing partial run is discarded so every set has a uniform size.
// Throws ArgError for per_set < 2.
std::vector<PacketSet> build_packet_sets(std::vector<Packet> packets,
                                         std::size_t per_set = kDefaultPacketsPerSet);

// Groups consecutive runs of `per_corpus` sets into corpora, discarding a
// trailing partial run. `created_at` defaults to the wall clock at the call.
// Throws ArgError for per_corpus < 1.
std::vector<Corpus> build_corpus(std::vector<PacketSet> sets,
                                 std::size_t per_corpus = kDefaultSetsPerCorpus,
                                 std::uint64_t created_at = now_unix_seconds());

} // namespace sift
