#include "sift/pcap.hpp"

#include <fstream>
#include <optional>

namespace sift {

namespace {

constexpr std::uint32_t kMagicHostOrder = 0xa1b2c3d4;
constexpr std::uint32_t kMagicSwapped = 0xd4c3b2a1;
constexpr std::uint32_t kLinkTypeEthernet = 1;
constexpr std::size_t kGlobalHeaderLen = 24;
constexpr std::size_t kRecordHeaderLen = 16;

struct Reader {
    ByteView data;
    bool swapped = false;

    std::uint32_t u32_at(std::size_t off) const {
        std::uint32_t v = 0;
        if (swapped) { // big-endian file
            for (int i = 0; i < 4; ++i)
                v = v << 8 | static_cast<unsigned char>(data[off + i]);
        } else { // little-endian file
            for (int i = 3; i >= 0; --i)
                v = v << 8 | static_cast<unsigned char>(data[off + i]);
        }
        return v;
    }
};

std::uint16_t be16(ByteView d, std::size_t off) {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(d[off]) << 8 |
                                      static_cast<unsigned char>(d[off + 1]));
}

std::string ipv4_str(ByteView d, std::size_t off) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", static_cast<unsigned char>(d[off]),
                  static_cast<unsigned char>(d[off + 1]), static_cast<unsigned char>(d[off + 2]),
                  static_cast<unsigned char>(d[off + 3]));
    return buf;
}

// frame = one captured Ethernet frame (possibly snaplen-truncated)
std::optional<Packet> parse_frame(ByteView frame) {
    constexpr std::size_t kEthLen = 14;
    if (frame.size() < kEthLen + 20)
        return std::nullopt;
    if (be16(frame, 12) != 0x0800) // IPv4 only
        return std::nullopt;
    ByteView ip = frame.substr(kEthLen);
    unsigned version = static_cast<unsigned char>(ip[0]) >> 4;
    std::size_t ihl = (static_cast<unsigned char>(ip[0]) & 0x0f) * std::size_t{4};
    if (version != 4 || ihl < 20 || ip.size() < ihl)
        return std::nullopt;
    std::size_t total_len = be16(ip, 2);
    if (total_len < ihl)
        return std::nullopt;
    if (total_len > ip.size())
        total_len = ip.size(); // snaplen truncation; take what was captured
    if ((be16(ip, 6) & 0x1fff) != 0)
        return std::nullopt; // non-first fragment: no transport header
    unsigned proto = static_cast<unsigned char>(ip[9]);
    ByteView transport = ip.substr(ihl, total_len - ihl);

    std::size_t header_len = 0;
    std::size_t payload_len = 0;
    if (proto == 6) { // TCP
        if (transport.size() < 20)
            return std::nullopt;
        header_len = (static_cast<unsigned char>(transport[12]) >> 4) * std::size_t{4};
        if (header_len < 20 || transport.size() < header_len)
            return std::nullopt;
        payload_len = transport.size() - header_len;
    } else if (proto == 17) { // UDP
        if (transport.size() < 8)
            return std::nullopt;
        header_len = 8;
        std::size_t udp_len = be16(transport, 4);
        if (udp_len < 8)
            return std::nullopt;
        payload_len = std::min(udp_len, transport.size()) - 8;
    } else {
        return std::nullopt;
    }
    if (payload_len == 0)
        return std::nullopt;

    std::string source_id = ipv4_str(ip, 12) + ":" + std::to_string(be16(transport, 0)) + ">" +
                            ipv4_str(ip, 16) + ":" + std::to_string(be16(transport, 2));
    return Packet(Bytes(transport.substr(header_len, payload_len)), std::move(source_id));
}

} // namespace

std::vector<Packet> ingest_pcap(ByteView data) {
    if (data.size() < kGlobalHeaderLen)
        throw FormatError("truncated pcap global header");

    std::uint32_t magic_le = 0;
    for (int i = 3; i >= 0; --i)
        magic_le = magic_le << 8 | static_cast<unsigned char>(data[i]);

    Reader r{data, false};
    if (magic_le == kMagicHostOrder)
        r.swapped = false; // file little-endian, same as our sequential LE read
    else if (magic_le == kMagicSwapped)
        r.swapped = true;
    else
        throw FormatError("bad pcap magic");

    if (r.u32_at(20) != kLinkTypeEthernet)
        throw FormatError("unsupported pcap link type (want Ethernet)");

    std::vector<Packet> packets;
    std::size_t off = kGlobalHeaderLen;
    while (off < data.size()) {
        if (data.size() - off < kRecordHeaderLen)
            throw FormatError("truncated pcap record header at offset " + std::to_string(off));
        std::uint32_t incl_len = r.u32_at(off + 8);
        if (data.size() - off - kRecordHeaderLen < incl_len)
            throw FormatError("truncated pcap record at offset " + std::to_string(off));
        if (auto p = parse_frame(data.substr(off + kRecordHeaderLen, incl_len)))
            packets.push_back(std::move(*p));
        off += kRecordHeaderLen + incl_len;
    }
    return packets;
}

std::vector<Packet> ingest_pcap_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return ingest_pcap(data);
}

} // namespace sift
