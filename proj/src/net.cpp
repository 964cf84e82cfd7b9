#include "sift/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "sift/corpus_io.hpp"

namespace fs = std::filesystem;

namespace sift {

namespace {

constexpr std::uint64_t kMaxPushLen = 1ULL << 30;

[[noreturn]] void throw_errno(const std::string& what) {
    throw IoError(what + ": " + std::strerror(errno));
}

struct AddrInfo {
    addrinfo* res = nullptr;
    ~AddrInfo() {
        if (res)
            freeaddrinfo(res);
    }
};

sockaddr_in resolve(const Endpoint& ep, int socktype) {
    AddrInfo ai;
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = socktype;
    std::string host = ep.host.empty() ? "0.0.0.0" : ep.host;
    std::string port = std::to_string(ep.port);
    int rc = getaddrinfo(host.c_str(), port.c_str(), &hints, &ai.res);
    if (rc != 0)
        throw IoError("cannot resolve " + host + ": " + gai_strerror(rc));
    sockaddr_in out{};
    std::memcpy(&out, ai.res->ai_addr, sizeof out);
    return out;
}

void send_all(int fd, const void* data, std::size_t len) {
    const char* p = static_cast<const char*>(data);
    while (len > 0) {
        ssize_t n = ::send(fd, p, len, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            throw_errno("send");
        }
        p += n;
        len -= static_cast<std::size_t>(n);
    }
}

// False on clean EOF before `len` bytes arrive.
bool recv_all(int fd, void* data, std::size_t len) {
    char* p = static_cast<char*>(data);
    while (len > 0) {
        ssize_t n = ::recv(fd, p, len, 0);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            throw_errno("recv");
        }
        if (n == 0)
            return false;
        p += n;
        len -= static_cast<std::size_t>(n);
    }
    return true;
}

std::uint16_t bound_port(int fd) {
    sockaddr_in addr{};
    socklen_t alen = sizeof addr;
    if (getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &alen) != 0)
        throw_errno("getsockname");
    return ntohs(addr.sin_port);
}

} // namespace

Endpoint parse_endpoint(const std::string& address) {
    std::size_t colon = address.rfind(':');
    if (colon == std::string::npos)
        throw ArgError("endpoint must be host:port, got " + address);
    Endpoint ep;
    ep.host = address.substr(0, colon);
    std::string port = address.substr(colon + 1);
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc() || ptr != port.data() + port.size() || value > 65535)
        throw ArgError("bad port in endpoint " + address);
    ep.port = static_cast<std::uint16_t>(value);
    return ep;
}

CxfrServer::CxfrServer(const std::string& listen_address, std::string spool_dir)
    : spool_dir_(std::move(spool_dir)) {
    Endpoint ep = parse_endpoint(listen_address);
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0)
        throw_errno("socket");
    int one = 1;
    setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr = resolve(ep, SOCK_STREAM);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        int saved = errno;
        ::close(fd_);
        fd_ = -1;
        errno = saved;
        throw_errno("bind " + listen_address);
    }
    if (::listen(fd_, 16) != 0) {
        int saved = errno;
        ::close(fd_);
        fd_ = -1;
        errno = saved;
        throw_errno("listen");
    }
    port_ = bound_port(fd_);
    fs::create_directories(spool_dir_);
}

CxfrServer::~CxfrServer() {
    if (fd_ >= 0)
        ::close(fd_);
}

void CxfrServer::serve(std::atomic<bool>& stop) {
    while (!stop.load()) {
        pollfd pfd{fd_, POLLIN, 0};
        int rc = ::poll(&pfd, 1, 100);
        if (rc < 0) {
            if (errno == EINTR)
                continue;
            throw_errno("poll");
        }
        if (rc == 0 || !(pfd.revents & POLLIN))
            continue;
        int conn = ::accept(fd_, nullptr, nullptr);
        if (conn < 0) {
            if (errno == EINTR)
                continue;
            log_warn(std::string("accept failed: ") + std::strerror(errno));
            continue;
        }
        try {
            handle_connection(conn);
        } catch (const std::exception& e) {
            log_warn(std::string("push connection dropped: ") + e.what());
        }
        ::close(conn);
    }
}

void CxfrServer::handle_connection(int conn) {
    timeval tv{5, 0};
    setsockopt(conn, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    setsockopt(conn, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);

    auto reply = [conn](std::uint8_t code) {
        send_all(conn, &code, 1);
    };

    char header[12];
    if (!recv_all(conn, header, sizeof header)) {
        reply(0x01);
        return;
    }
    Bytes head(header, sizeof header);
    std::size_t off = 0;
    if (get_bytes(head, off, 4, "magic") != "CXFR") {
        reply(0x01);
        return;
    }
    std::uint64_t len = get_u64(head, off, "length");
    if (len == 0 || len > kMaxPushLen) {
        reply(0x01);
        return;
    }
    Bytes payload(len, '\0');
    if (!recv_all(conn, payload.data(), payload.size())) {
        reply(0x01);
        return;
    }
    try {
        read_corpus(payload);
    } catch (const FormatError& e) {
        log_warn(std::string("rejected pushed corpus: ") + e.what());
        reply(0x01);
        return;
    }

    std::string name = "push-" + std::to_string(now_unix_seconds()) + "-" +
                       std::to_string(++seq_) + ".corp";
    fs::path final_path = fs::path(spool_dir_) / name;
    while (fs::exists(final_path)) {
        name = "push-" + std::to_string(now_unix_seconds()) + "-" +
               std::to_string(++seq_) + ".corp";
        final_path = fs::path(spool_dir_) / name;
    }
    fs::path tmp_path = fs::path(spool_dir_) / ("." + name);
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot write spool temp file " + tmp_path.string());
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        out.flush();
        if (!out)
            throw IoError("short write to " + tmp_path.string());
    }
    fs::rename(tmp_path, final_path);
    reply(0x00);
}

std::uint8_t cxfr_push(const std::string& address, ByteView corpus_bytes) {
    Endpoint ep = parse_endpoint(address);
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0)
        throw_errno("socket");
    sockaddr_in addr = resolve(ep, SOCK_STREAM);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        int saved = errno;
        ::close(fd);
        errno = saved;
        throw_errno("connect " + address);
    }
    timeval tv{5, 0};
    setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
    try {
        Bytes header = "CXFR";
        put_u64(header, corpus_bytes.size());
        send_all(fd, header.data(), header.size());
        send_all(fd, corpus_bytes.data(), corpus_bytes.size());
        std::uint8_t code = 0xff;
        if (!recv_all(fd, &code, 1))
            throw IoError("server closed connection without a reply");
        ::close(fd);
        return code;
    } catch (...) {
        ::close(fd);
        throw;
    }
}

UdpSocket UdpSocket::bind(const std::string& address) {
    Endpoint ep = parse_endpoint(address);
    int fd = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd < 0)
        throw_errno("socket");
    int one = 1;
    setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr = resolve(ep, SOCK_DGRAM);
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        int saved = errno;
        ::close(fd);
        errno = saved;
        throw_errno("bind " + address);
    }
    UdpSocket sock(fd);
    sock.port_ = bound_port(fd);
    return sock;
}

UdpSocket UdpSocket::sender() {
    int fd = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd < 0)
        throw_errno("socket");
    int one = 1;
    setsockopt(fd, SOL_SOCKET, SO_BROADCAST, &one, sizeof one);
    return UdpSocket(fd);
}

UdpSocket::~UdpSocket() {
    if (fd_ >= 0)
        ::close(fd_);
}

UdpSocket::UdpSocket(UdpSocket&& other) noexcept : fd_(other.fd_), port_(other.port_) {
    other.fd_ = -1;
}

void UdpSocket::send_to(const std::string& address, ByteView data) {
    sockaddr_in addr = resolve(parse_endpoint(address), SOCK_DGRAM);
    ssize_t n = ::sendto(fd_, data.data(), data.size(), 0,
                         reinterpret_cast<sockaddr*>(&addr), sizeof addr);
    if (n < 0)
        throw_errno("sendto " + address);
    if (static_cast<std::size_t>(n) != data.size())
        throw IoError("short datagram send to " + address);
}

std::optional<Bytes> UdpSocket::receive(std::chrono::milliseconds timeout) {
    pollfd pfd{fd_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    if (rc < 0) {
        if (errno == EINTR)
            return std::nullopt;
        throw_errno("poll");
    }
    if (rc == 0 || !(pfd.revents & POLLIN))
        return std::nullopt;
    Bytes buf(65535, '\0');
    ssize_t n = ::recvfrom(fd_, buf.data(), buf.size(), 0, nullptr, nullptr);
    if (n < 0) {
        if (errno == EINTR || errno == EAGAIN || errno == EWOULDBLOCK)
            return std::nullopt;
        throw_errno("recvfrom");
    }
    buf.resize(static_cast<std::size_t>(n));
    return buf;
}

} // namespace sift
