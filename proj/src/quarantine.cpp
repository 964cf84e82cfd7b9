#include "sift/quarantine.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;

namespace sift {

namespace {

// rename that refuses to clobber an existing target. Returns errno, 0 on
// success. Falls back to an existence probe where RENAME_NOREPLACE is not
// supported by the kernel or filesystem.
int rename_noreplace(const char* from, const char* to) {
#ifdef RENAME_NOREPLACE
    if (renameat2(AT_FDCWD, from, AT_FDCWD, to, RENAME_NOREPLACE) == 0)
        return 0;
    if (errno != EINVAL && errno != ENOSYS && errno != ENOTSUP)
        return errno;
#endif
    struct stat st;
    if (::lstat(to, &st) == 0)
        return EEXIST;
    if (::rename(from, to) == 0)
        return 0;
    return errno;
}

// Cross-filesystem fallback: copy then unlink. Not atomic, used only when
// rename reports EXDEV.
void copy_then_remove(const fs::path& from, const fs::path& to) {
    fs::copy_file(from, to, fs::copy_options::none);
    fs::remove(from);
}

} // namespace

std::optional<QuarantineRecord> quarantine(const ScanMatch& match, const std::string& qdir) {
    fs::path source(match.file);
    if (!fs::exists(fs::symlink_status(source))) {
        log_info("quarantine: " + match.file + " already gone, nothing to do");
        return std::nullopt;
    }

    std::error_code ec;
    fs::create_directories(qdir, ec);
    if (ec)
        throw IoError("cannot create quarantine directory " + qdir + ": " + ec.message());

    std::string base = source.filename().string();
    fs::path target;
    for (unsigned n = 1;; ++n) {
        target = fs::path(qdir) / (base + "." + std::to_string(n));
        int rc = rename_noreplace(source.c_str(), target.c_str());
        if (rc == 0)
            break;
        if (rc == EEXIST)
            continue;
        if (rc == ENOENT) {
            log_info("quarantine: " + match.file + " vanished mid-move, nothing to do");
            return std::nullopt;
        }
        if (rc == EXDEV) {
            if (fs::exists(fs::symlink_status(target)))
                continue;
            copy_then_remove(source, target);
            break;
        }
        throw IoError("cannot quarantine " + match.file + ": " + std::strerror(rc));
    }

    QuarantineRecord record;
    record.original_path = fs::absolute(source).string();
    record.quarantine_path = target.string();
    record.sidecar_path = target.string() + ".meta";
    record.signature_hash = match.signature.hash;
    record.offset = match.offset;
    record.timestamp = now_unix_seconds();

    std::string line = iso8601_utc(record.timestamp);
    line += '\t';
    line += record.original_path;
    line += '\t';
    line += std::to_string(record.signature_hash);
    line += '\t';
    line += std::to_string(record.offset);
    line += '\n';

    std::ofstream meta(record.sidecar_path, std::ios::binary | std::ios::trunc);
    if (!meta)
        throw IoError("cannot write sidecar " + record.sidecar_path);
    meta.write(line.data(), static_cast<std::streamsize>(line.size()));
    meta.flush();
    if (!meta)
        throw IoError("short write to sidecar " + record.sidecar_path);
    return record;
}

} // namespace sift
