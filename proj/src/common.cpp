#include "sift/common.hpp"

#include <cstdio>
#include <ctime>
#include <mutex>

namespace sift {

void put_u16(Bytes& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xff));
}

void put_u32(Bytes& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8)
        out.push_back(static_cast<char>((v >> shift) & 0xff));
}

void put_u64(Bytes& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8)
        out.push_back(static_cast<char>((v >> shift) & 0xff));
}

namespace {

void need(ByteView in, std::size_t off, std::size_t n, const char* field) {
    if (off > in.size() || in.size() - off < n)
        throw FormatError(std::string("truncated ") + field);
}

} // namespace

std::uint16_t get_u16(ByteView in, std::size_t& off, const char* field) {
    need(in, off, 2, field);
    auto hi = static_cast<unsigned char>(in[off]);
    auto lo = static_cast<unsigned char>(in[off + 1]);
    off += 2;
    return static_cast<std::uint16_t>(hi << 8 | lo);
}

std::uint32_t get_u32(ByteView in, std::size_t& off, const char* field) {
    need(in, off, 4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v = v << 8 | static_cast<unsigned char>(in[off + i]);
    off += 4;
    return v;
}

std::uint64_t get_u64(ByteView in, std::size_t& off, const char* field) {
    need(in, off, 8, field);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v = v << 8 | static_cast<unsigned char>(in[off + i]);
    off += 8;
    return v;
}

Bytes get_bytes(ByteView in, std::size_t& off, std::size_t n, const char* field) {
    need(in, off, n, field);
    Bytes b(in.substr(off, n));
    off += n;
    return b;
}

std::string to_hex(ByteView bytes) {
    static const char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char c : bytes) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

namespace {

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0)
        throw FormatError("hex string has odd length");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0)
            throw FormatError("bad hex digit");
        out.push_back(static_cast<char>(hi << 4 | lo));
    }
    return out;
}

std::uint64_t now_unix_seconds() {
    return static_cast<std::uint64_t>(std::time(nullptr));
}

std::string iso8601_utc(std::uint64_t unix_seconds) {
    std::time_t t = static_cast<std::time_t>(unix_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

std::mutex g_log_mutex;

void log_line(const char* level, const std::string& msg) {
    std::lock_guard<std::mutex> lock(g_log_mutex);
    std::fprintf(stderr, "%s %s %s\n", iso8601_utc(now_unix_seconds()).c_str(), level, msg.c_str());
}

} // namespace

void log_info(const std::string& msg)  { log_line("INFO ", msg); }
void log_warn(const std::string& msg)  { log_line("WARN ", msg); }
void log_error(const std::string& msg) { log_line("ERROR", msg); }

} // namespace sift
