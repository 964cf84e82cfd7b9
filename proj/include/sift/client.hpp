#pragma once

// The thin client: receives anti-malware packets, keeps the signature
// database current, scans its root and quarantines whatever matches.

#include <atomic>
#include <functional>
#include <string>

#include "sift/amp.hpp"
#include "sift/quarantine.hpp"
#include "sift/scanner.hpp"
#include "sift/signature_db.hpp"

namespace sift {

// Merges the packet into the db and persists to `db_path` before returning.
// Returns the number of signatures that were new. If persisting fails the
// in-memory db is left exactly as it was.
std::size_t client_update_db(SignatureDB& db, const AntiMalwarePacket& packet,
                             const std::string& db_path);

struct ClientOptions {
    std::string listen_address = "0.0.0.0:7072";
    std::string db_path = "signatures.amp";
    std::string scan_root = ".";
    std::string quarantine_dir = "quarantine";
    ScanOptions scan;
};

struct ClientHooks {
    std::function<void(std::uint16_t port)> on_listening; // fires once, after bind
    std::function<void(std::size_t new_signatures)> on_update;
    std::function<void(const std::vector<ScanMatch>&)> on_scan;
    std::function<void(const QuarantineRecord&)> on_quarantine;
};

// Receive loop: each decoded packet triggers one serialized
// update -> scan -> quarantine cycle. Malformed datagrams are dropped with a
// log line; the loop only exits when `stop` becomes true.
void client_service(const ClientOptions& options, std::atomic<bool>& stop,
                    const ClientHooks& hooks = {});

} // namespace sift
