#pragma once

// Anti-malware packet: the wire unit that carries signatures to thin
// clients, plus the datagram fan-out that delivers it.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sift/common.hpp"
#include "sift/signature.hpp"

namespace sift {

struct AntiMalwarePacket {
    std::uint16_t version = 1;
    std::vector<Signature> signatures; // at most 65535

    bool operator==(const AntiMalwarePacket&) const = default;
};

// AMP1 layout, all integers big-endian: "AMP1", version u16, count u16, then
// per signature: pattern_len u32, pattern bytes, hash u64, created_at u64.
// Encoding is canonical; decode rejects trailing bytes so the two are exact
// inverses.
Bytes encode_packet(const AntiMalwarePacket& packet);
AntiMalwarePacket decode_packet(ByteView bytes);

struct Delivery {
    std::string endpoint;
    bool ok = false;
    std::string error; // empty on success
};

struct DeliveryReport {
    std::vector<Delivery> deliveries;

    std::size_t ok_count() const;
};

// Sends one identical AntiMalwarePacket datagram per endpoint. A failed send
// is recorded in the report and never aborts the remaining endpoints.
DeliveryReport broadcast_signatures(std::span<const Signature> signatures,
                                    std::span<const std::string> endpoints);

} // namespace sift
