#pragma once

// Thin POSIX socket wrappers for the two wire paths: the TCP corpus push
// into the honeypot spool and the datagram channel signatures travel on.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

#include "sift/common.hpp"

namespace sift {

struct Endpoint {
    std::string host;
    std::uint16_t port = 0;
};

// Parses "host:port". The host part may be empty ("anything:0" binds an
// ephemeral port on all interfaces).
Endpoint parse_endpoint(const std::string& address);

// Accepts corpus pushes: magic "CXFR", u64 BE length, CORP payload. Replies
// one byte, 0x00 accepted / 0x01 malformed. Accepted payloads land in the
// spool via a dot-prefixed temp file renamed into place.
class CxfrServer {
public:
    CxfrServer(const std::string& listen_address, std::string spool_dir);
    ~CxfrServer();
    CxfrServer(const CxfrServer&) = delete;
    CxfrServer& operator=(const CxfrServer&) = delete;

    std::uint16_t port() const { return port_; }

    // Accept loop; returns once `stop` becomes true.
    void serve(std::atomic<bool>& stop);

private:
    void handle_connection(int conn);

    int fd_ = -1;
    std::uint16_t port_ = 0;
    std::string spool_dir_;
    std::uint64_t seq_ = 0;
};

// Pushes one already-encoded corpus; returns the server's reply byte.
std::uint8_t cxfr_push(const std::string& address, ByteView corpus_bytes);

class UdpSocket {
public:
    // Receiving socket bound to the given address.
    static UdpSocket bind(const std::string& address);
    // Unbound sending socket (broadcast-capable).
    static UdpSocket sender();

    ~UdpSocket();
    UdpSocket(UdpSocket&& other) noexcept;
    UdpSocket& operator=(UdpSocket&&) = delete;
    UdpSocket(const UdpSocket&) = delete;
    UdpSocket& operator=(const UdpSocket&) = delete;

    std::uint16_t port() const { return port_; }

    void send_to(const std::string& address, ByteView data);
    // One datagram, or nothing if the timeout expires first.
    std::optional<Bytes> receive(std::chrono::milliseconds timeout);

private:
    explicit UdpSocket(int fd) : fd_(fd) {}

    int fd_ = -1;
    std::uint16_t port_ = 0;
};

} // namespace sift
