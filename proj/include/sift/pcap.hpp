#pragma once

// Classic libpcap capture files -> transport payloads. Only frames that parse
// as Ethernet -> IPv4 -> TCP/UDP contribute; everything else (other
// ethertypes, non-first fragments, empty payloads) is skipped silently.

#include <filesystem>
#include <vector>

#include "sift/packet.hpp"

namespace sift {

// Accepts both file endiannesses (magic 0xa1b2c3d4 / 0xd4c3b2a1, Ethernet
// link type). Throws FormatError for a malformed global header and for a
// truncated record, naming the byte offset in the latter case. Each produced
// Packet carries the flow as its source tag ("src:port>dst:port").
std::vector<Packet> ingest_pcap(ByteView data);
std::vector<Packet> ingest_pcap_file(const std::filesystem::path& path);

} // namespace sift
