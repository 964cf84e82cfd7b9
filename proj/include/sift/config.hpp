#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sift/common.hpp"
#include "sift/extract.hpp"

namespace sift {

// Runtime settings shared by the detector daemon, the distribution side and
// the CLI.  Parsed from a flat key=value file; unknown keys are rejected so a
// typo never silently falls back to a default.
struct Config {
    // detection
    std::size_t k_min = 20;
    std::size_t k_max = 0; // 0 = unlimited
    Pairing pairing = Pairing::adjacent_disjoint;
    double tau = 0.3;
    double c = 3.0;
    std::size_t min_population = 10;

    // hashing
    std::uint64_t bloom_m = 10000;
    unsigned bloom_k = 4;
    std::uint64_t hash_q = 257;

    // daemon
    unsigned period_seconds = 30;
    std::string spool_dir = "spool";
    std::string log_path = "suspects.log";
    std::string cxfr_listen = "127.0.0.1:7071";

    // distribution
    std::vector<std::string> endpoints;   // signature receivers, host:port
    std::string udp_broadcast;            // optional single broadcast target
    std::string client_listen = "0.0.0.0:7072";
    std::string db_path = "signatures.amp";
    std::string scan_root = ".";
    std::string quarantine_dir = "quarantine";

    void validate() const;
};

// Parses key=value lines.  '#' starts a comment, blank lines are skipped,
// whitespace around keys and values is trimmed.  Throws FormatError on
// unknown keys, duplicate keys or unparsable values.
Config parse_config(ByteView text);
Config load_config_file(const std::string& path);

} // namespace sift
