#include "sift/scanner.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <filesystem>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;

namespace sift {

PatternMatcher::PatternMatcher(std::vector<Bytes> patterns)
    : patterns_(std::move(patterns)) {
    nodes_.emplace_back();
    for (std::size_t p = 0; p < patterns_.size(); ++p) {
        const Bytes& pat = patterns_[p];
        if (pat.empty())
            throw ArgError("empty pattern cannot be matched");
        max_len_ = std::max(max_len_, pat.size());
        std::int32_t node = 0;
        for (unsigned char byte : pat) {
            std::int32_t next = child(node, byte);
            if (next < 0) {
                next = static_cast<std::int32_t>(nodes_.size());
                nodes_.emplace_back();
                auto& edges = nodes_[node].next;
                edges.insert(std::lower_bound(edges.begin(), edges.end(),
                                              std::pair<unsigned char, std::int32_t>{byte, 0}),
                             {byte, next});
            }
            node = next;
        }
        nodes_[node].ends.push_back(static_cast<std::int32_t>(p));
    }

    // Breadth-first fail links; out_link short-circuits to the nearest
    // suffix state that ends a pattern.
    std::deque<std::int32_t> queue;
    for (auto& [byte, next] : nodes_[0].next) {
        nodes_[next].fail = 0;
        queue.push_back(next);
    }
    while (!queue.empty()) {
        std::int32_t node = queue.front();
        queue.pop_front();
        std::int32_t fail = nodes_[node].fail;
        nodes_[node].out_link =
            nodes_[fail].ends.empty() ? nodes_[fail].out_link : fail;
        for (auto& [byte, next] : nodes_[node].next) {
            nodes_[next].fail = step(fail, byte);
            queue.push_back(next);
        }
    }
}

std::int32_t PatternMatcher::child(std::int32_t node, unsigned char byte) const {
    const auto& edges = nodes_[node].next;
    auto it = std::lower_bound(edges.begin(), edges.end(),
                               std::pair<unsigned char, std::int32_t>{byte, 0},
                               [](const auto& a, const auto& b) { return a.first < b.first; });
    if (it != edges.end() && it->first == byte)
        return it->second;
    return -1;
}

std::int32_t PatternMatcher::step(std::int32_t state, unsigned char byte) const {
    while (true) {
        std::int32_t next = child(state, byte);
        if (next >= 0)
            return next;
        if (state == 0)
            return 0;
        state = nodes_[state].fail;
    }
}

void PatternMatcher::find_first(ByteView data, std::uint64_t base,
                                std::vector<std::int64_t>& first_offset) const {
    if (first_offset.size() != patterns_.size())
        throw ArgError("first_offset must have one slot per pattern");
    std::int32_t state = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        state = step(state, static_cast<unsigned char>(data[i]));
        std::int32_t hit = nodes_[state].ends.empty() ? nodes_[state].out_link : state;
        while (hit >= 0) {
            for (std::int32_t p : nodes_[hit].ends) {
                std::uint64_t start = base + i + 1 - patterns_[p].size();
                std::int64_t& slot = first_offset[p];
                if (slot < 0 || static_cast<std::uint64_t>(slot) > start)
                    slot = static_cast<std::int64_t>(start);
            }
            hit = nodes_[hit].out_link;
        }
    }
}

namespace {

// First offsets for every pattern in one file, chunked with enough overlap
// that no match can straddle unseen. -1 = not present.
std::vector<std::int64_t> scan_file(const fs::path& path, const PatternMatcher& matcher,
                                    std::size_t chunk_size) {
    std::vector<std::int64_t> first(matcher.pattern_count(), -1);
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());

    std::size_t overlap = matcher.max_pattern_len() - 1;
    if (chunk_size <= overlap)
        chunk_size = overlap + (1 << 12);
    Bytes buffer(chunk_size, '\0');
    std::uint64_t base = 0;
    std::size_t carried = 0;
    while (true) {
        in.read(buffer.data() + carried,
                static_cast<std::streamsize>(buffer.size() - carried));
        std::size_t got = static_cast<std::size_t>(in.gcount());
        if (in.bad())
            throw IoError("read failed on " + path.string());
        std::size_t filled = carried + got;
        if (filled == 0)
            break;
        matcher.find_first(ByteView(buffer.data(), filled), base, first);
        if (got == 0 || filled < buffer.size())
            break; // end of file
        // Keep the tail so a match crossing the boundary reappears whole.
        std::memmove(buffer.data(), buffer.data() + filled - overlap, overlap);
        base += filled - overlap;
        carried = overlap;
    }
    return first;
}

std::vector<fs::path> collect_files(const fs::path& root) {
    std::vector<fs::path> files;
    if (fs::is_regular_file(fs::symlink_status(root))) {
        files.push_back(root);
        return files;
    }
    if (!fs::is_directory(root))
        throw IoError("scan root missing: " + root.string());
    for (auto it = fs::recursive_directory_iterator(
             root, fs::directory_options::skip_permission_denied);
         it != fs::recursive_directory_iterator(); ++it) {
        if (it->is_symlink())
            continue;
        if (it->is_regular_file())
            files.push_back(it->path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.string() < b.string(); });
    return files;
}

} // namespace

std::vector<ScanMatch> scan_path(const SignatureDB& db, const std::string& root,
                                 const ScanOptions& options) {
    std::vector<ScanMatch> matches;
    if (db.size() == 0) {
        if (!fs::exists(root))
            throw IoError("scan root missing: " + root);
        return matches;
    }

    std::vector<Signature> sigs = db.entries(); // sorted by pattern bytes
    std::vector<Bytes> patterns;
    patterns.reserve(sigs.size());
    for (const Signature& sig : sigs)
        patterns.push_back(sig.pattern_bytes);
    PatternMatcher matcher(std::move(patterns));

    std::vector<fs::path> files = collect_files(root);
    std::vector<std::vector<std::int64_t>> per_file(files.size());

    auto scan_one = [&](std::size_t i) {
        try {
            per_file[i] = scan_file(files[i], matcher, options.chunk_size);
        } catch (const IoError& e) {
            log_warn(std::string("skipping unreadable file: ") + e.what());
            per_file[i].assign(sigs.size(), -1);
        }
    };

    if (options.mode == ExecMode::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::size_t i = 0; i < files.size(); ++i)
            scan_one(i);
    } else {
        for (std::size_t i = 0; i < files.size(); ++i)
            scan_one(i);
    }

    // files are path-sorted and sigs byte-sorted, so emission order is the
    // contract order with no extra sort.
    for (std::size_t i = 0; i < files.size(); ++i)
        for (std::size_t p = 0; p < sigs.size(); ++p)
            if (per_file[i][p] >= 0)
                matches.push_back({files[i].string(), sigs[p],
                                   static_cast<std::uint64_t>(per_file[i][p])});
    return matches;
}

} // namespace sift
