#include "sift/client.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>

#include "sift/net.hpp"

namespace fs = std::filesystem;

namespace sift {

namespace {

// True when `file` lives under `dir`; keeps the client from re-quarantining
// its own vault when the vault sits inside the scan root.
bool path_within(const std::string& file, const fs::path& dir) {
    fs::path f = fs::weakly_canonical(file);
    auto [dir_it, file_it] = std::mismatch(dir.begin(), dir.end(), f.begin(), f.end());
    return dir_it == dir.end();
}

} // namespace

std::size_t client_update_db(SignatureDB& db, const AntiMalwarePacket& packet,
                             const std::string& db_path) {
    SignatureDB staged = db;
    std::size_t added = staged.merge(packet.signatures);
    staged.save(db_path); // throws before the in-memory db is touched
    db = std::move(staged);
    return added;
}

void client_service(const ClientOptions& options, std::atomic<bool>& stop,
                    const ClientHooks& hooks) {
    SignatureDB db;
    if (fs::exists(options.db_path))
        db = SignatureDB::load(options.db_path);
    fs::create_directories(options.quarantine_dir);
    fs::path vault = fs::weakly_canonical(options.quarantine_dir);

    UdpSocket sock = UdpSocket::bind(options.listen_address);
    log_info("client listening on " + options.listen_address + " (port " +
             std::to_string(sock.port()) + ")");
    if (hooks.on_listening)
        hooks.on_listening(sock.port());

    while (!stop.load()) {
        std::optional<Bytes> datagram = sock.receive(std::chrono::milliseconds(200));
        if (!datagram)
            continue;
        AntiMalwarePacket packet;
        try {
            packet = decode_packet(*datagram);
        } catch (const FormatError& e) {
            log_warn(std::string("dropped malformed datagram: ") + e.what());
            continue;
        }
        try {
            std::size_t added = client_update_db(db, packet, options.db_path);
            if (hooks.on_update)
                hooks.on_update(added);
            std::vector<ScanMatch> matches = scan_path(db, options.scan_root, options.scan);
            if (hooks.on_scan)
                hooks.on_scan(matches);
            for (const ScanMatch& match : matches) {
                if (path_within(match.file, vault))
                    continue;
                std::optional<QuarantineRecord> record =
                    quarantine(match, options.quarantine_dir);
                if (record && hooks.on_quarantine)
                    hooks.on_quarantine(*record);
            }
        } catch (const std::exception& e) {
            log_error(std::string("client cycle failed: ") + e.what());
        }
    }
}

} // namespace sift
