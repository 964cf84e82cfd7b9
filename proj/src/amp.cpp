#include "sift/amp.hpp"

#include "sift/net.hpp"

namespace sift {

Bytes encode_packet(const AntiMalwarePacket& packet) {
    if (packet.version != 1)
        throw ArgError("only packet version 1 can be encoded");
    if (packet.signatures.size() > 65535)
        throw ArgError("packet holds more than 65535 signatures");
    Bytes out = "AMP1";
    put_u16(out, packet.version);
    put_u16(out, static_cast<std::uint16_t>(packet.signatures.size()));
    for (const Signature& sig : packet.signatures) {
        if (sig.pattern_bytes.size() > UINT32_MAX)
            throw ArgError("signature pattern too long for the wire format");
        put_u32(out, static_cast<std::uint32_t>(sig.pattern_bytes.size()));
        out += sig.pattern_bytes;
        put_u64(out, sig.hash);
        put_u64(out, sig.created_at);
    }
    return out;
}

AntiMalwarePacket decode_packet(ByteView bytes) {
    std::size_t off = 0;
    if (get_bytes(bytes, off, 4, "magic") != "AMP1")
        throw FormatError("bad magic");
    AntiMalwarePacket packet;
    packet.version = get_u16(bytes, off, "version");
    if (packet.version != 1)
        throw FormatError("unsupported version");
    std::uint16_t count = get_u16(bytes, off, "count");
    packet.signatures.reserve(count);
    for (std::uint16_t i = 0; i < count; ++i) {
        Signature sig;
        std::uint32_t len = get_u32(bytes, off, "pattern_len");
        sig.pattern_bytes = get_bytes(bytes, off, len, "pattern");
        sig.hash = get_u64(bytes, off, "hash");
        sig.created_at = get_u64(bytes, off, "created_at");
        packet.signatures.push_back(std::move(sig));
    }
    if (off != bytes.size())
        throw FormatError("trailing bytes after packet");
    return packet;
}

std::size_t DeliveryReport::ok_count() const {
    std::size_t n = 0;
    for (const Delivery& d : deliveries)
        if (d.ok)
            ++n;
    return n;
}

DeliveryReport broadcast_signatures(std::span<const Signature> signatures,
                                    std::span<const std::string> endpoints) {
    if (signatures.empty())
        throw ArgError("broadcast_signatures: nothing to send");
    AntiMalwarePacket packet;
    packet.signatures.assign(signatures.begin(), signatures.end());
    Bytes wire = encode_packet(packet);

    DeliveryReport report;
    report.deliveries.reserve(endpoints.size());
    for (const std::string& endpoint : endpoints) {
        Delivery d;
        d.endpoint = endpoint;
        try {
            UdpSocket sock = UdpSocket::sender();
            sock.send_to(endpoint, wire);
            d.ok = true;
        } catch (const std::exception& e) {
            d.ok = false;
            d.error = e.what();
            log_warn("broadcast to " + endpoint + " failed: " + d.error);
        }
        report.deliveries.push_back(std::move(d));
    }
    return report;
}

} // namespace sift
