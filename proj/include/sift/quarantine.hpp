#pragma once

// Moves matched files into the quarantine directory under collision-free
// names and records a sidecar metadata line per quarantined file.

#include <cstdint>
#include <optional>
#include <string>

#include "sift/common.hpp"
#include "sift/scanner.hpp"

namespace sift {

struct QuarantineRecord {
    std::string original_path; // absolute
    std::string quarantine_path;
    std::string sidecar_path;
    std::uint64_t signature_hash = 0;
    std::uint64_t offset = 0;
    std::uint64_t timestamp = 0;
};

// Moves the matched file into `qdir` as "<basename>.<n>" with the smallest
// free n, atomically when source and target share a filesystem, and writes
// "<name>.meta" holding: ISO-8601 UTC, TAB, original absolute path, TAB,
// signature hash (decimal), TAB, offset (decimal), LF.
// A file that vanished since the scan is a logged no-op (returns nothing);
// an unwritable qdir is an IoError and the file stays where it is.
std::optional<QuarantineRecord> quarantine(const ScanMatch& match, const std::string& qdir);

} // namespace sift
