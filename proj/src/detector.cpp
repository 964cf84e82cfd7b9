#include "sift/detector.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>
#include <unordered_set>

#include "sift/corpus_io.hpp"

namespace fs = std::filesystem;

namespace sift {

AnalysisParams analysis_params(const Config& cfg) {
    cfg.validate();
    AnalysisParams p;
    p.extraction.min_len = cfg.k_min;
    p.extraction.max_len = cfg.k_max == 0 ? std::nullopt : std::optional<std::size_t>(cfg.k_max);
    p.extraction.pairing = cfg.pairing;
    p.policy.threshold = cfg.tau;
    p.policy.deviation_multiplier = cfg.c;
    p.policy.min_population = cfg.min_population;
    p.hash.base = cfg.hash_q;
    p.hash.modulus = cfg.bloom_m;
    p.hash.min_pattern_len = cfg.k_min;
    p.bloom.bit_count = cfg.bloom_m;
    p.bloom.hash_count = cfg.bloom_k;
    p.hash.validate();
    p.bloom.validate();
    return p;
}

std::string corpus_id(const Corpus& corpus) {
    Bytes encoded = write_corpus(corpus);
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char b : encoded) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

// Moves `from` into `dir`, suffixing the name if the slot is taken.
void move_into(const fs::path& from, const fs::path& dir) {
    fs::create_directories(dir);
    fs::path target = dir / from.filename();
    for (unsigned n = 1; fs::exists(target); ++n)
        target = dir / (from.filename().string() + "." + std::to_string(n));
    fs::rename(from, target);
}

Bytes read_file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("read failed on " + path.string());
    return data;
}

struct SpoolCandidate {
    fs::path path;
    std::uint64_t created_at;
    std::string name;
};

} // namespace

std::optional<Corpus> receive_corpus(const std::string& spool_dir) {
    fs::path spool(spool_dir);
    if (!fs::is_directory(spool))
        throw IoError("spool directory missing: " + spool_dir);

    std::vector<SpoolCandidate> candidates;
    for (const auto& entry : fs::directory_iterator(spool)) {
        if (!entry.is_regular_file())
            continue;
        std::string name = entry.path().filename().string();
        if (name.empty() || name.front() == '.')
            continue; // in-flight atomic write
        Bytes data;
        try {
            data = read_file_bytes(entry.path());
        } catch (const IoError& e) {
            log_error(std::string("spool: ") + e.what());
            continue;
        }
        // Peek at the header for ordering; full validation happens on pick.
        try {
            std::size_t off = 0;
            Bytes magic = get_bytes(data, off, 4, "magic");
            if (magic != "CORP")
                throw FormatError("bad magic");
            std::uint16_t version = get_u16(data, off, "version");
            if (version != 1)
                throw FormatError("unsupported version");
            std::uint64_t created_at = get_u64(data, off, "created_at");
            candidates.push_back({entry.path(), created_at, name});
        } catch (const FormatError& e) {
            log_error("rejected corpus file " + name + ": " + e.what());
            move_into(entry.path(), spool / "rejected");
        }
    }

    std::sort(candidates.begin(), candidates.end(),
              [](const SpoolCandidate& a, const SpoolCandidate& b) {
                  if (a.created_at != b.created_at)
                      return a.created_at < b.created_at;
                  return a.name < b.name;
              });

    for (const SpoolCandidate& cand : candidates) {
        try {
            Corpus corpus = read_corpus(read_file_bytes(cand.path));
            move_into(cand.path, spool / "processed");
            return corpus;
        } catch (const FormatError& e) {
            log_error("rejected corpus file " + cand.name + ": " + e.what());
            move_into(cand.path, spool / "rejected");
        } catch (const IoError& e) {
            log_error(std::string("spool: ") + e.what());
        }
    }
    return std::nullopt;
}

DetectionReport run_detection(const Corpus& corpus, const AnalysisParams& params) {
    DetectionReport report;
    report.corpus_id = corpus_id(corpus);
    report.config_snapshot = params;
    report.started_at = now_unix_seconds();

    std::vector<CoincidenceTable> tables;
    tables.reserve(corpus.sets.size());
    for (const PacketSet& set : corpus.sets) {
        if (set.size() == 0)
            continue;
        CoincidenceTable table(static_cast<std::uint32_t>(set.size()));
        for (const PatternOccurrence& occ :
             extract_set_patterns(set, params.extraction, params.hash, params.bloom, params.mode))
            table.record(occ.pattern);
        tables.push_back(std::move(table));
    }
    if (!tables.empty())
        report.suspects = aggregate_corpus_suspects(tables, params.policy);

    report.finished_at = std::max(now_unix_seconds(), report.started_at);
    return report;
}

std::size_t append_suspects(const DetectionReport& report, const std::string& log_path) {
    if (report.suspects.empty()) {
        // Still create the file so the audit trail exists from the first run.
        std::ofstream out(log_path, std::ios::binary | std::ios::app);
        if (!out)
            throw IoError("cannot open suspects log " + log_path);
        return 0;
    }
    std::string block;
    std::string stamp = iso8601_utc(report.finished_at);
    for (const CoincidenceEntry& e : report.suspects) {
        char frac[32];
        std::snprintf(frac, sizeof frac, "%.4f", e.fraction);
        block += stamp;
        block += '\t';
        block += frac;
        block += '\t';
        block += to_hex(e.pattern.bytes);
        block += '\n';
    }
    std::ofstream out(log_path, std::ios::binary | std::ios::app);
    if (!out)
        throw IoError("cannot open suspects log " + log_path);
    out.write(block.data(), static_cast<std::streamsize>(block.size()));
    out.flush();
    if (!out)
        throw IoError("write failed on suspects log " + log_path);
    return report.suspects.size();
}

std::vector<Signature> generate_signatures(const DetectionReport& report) {
    std::vector<Signature> sigs;
    std::unordered_set<Bytes> seen;
    std::uint64_t now = now_unix_seconds();
    for (const CoincidenceEntry& e : report.suspects) {
        if (!seen.insert(e.pattern.bytes).second)
            continue;
        sigs.push_back({e.pattern.bytes, e.pattern.hash, now});
    }
    return sigs;
}

void run_service(const ServiceOptions& options, std::atomic<bool>& stop,
                 const ServiceHooks& hooks) {
    if (options.period_seconds == 0)
        throw ArgError("service period must be >= 1 second");
    fs::create_directories(options.spool_dir);
    fs::path log_parent = fs::path(options.log_path).parent_path();
    if (!log_parent.empty())
        fs::create_directories(log_parent);

    while (!stop.load()) {
        while (!stop.load()) {
            std::optional<Corpus> corpus;
            try {
                corpus = receive_corpus(options.spool_dir);
            } catch (const std::exception& e) {
                log_error(std::string("spool scan failed: ") + e.what());
                break;
            }
            if (!corpus)
                break;
            try {
                DetectionReport report = run_detection(*corpus, options.params);
                append_suspects(report, options.log_path);
                std::vector<Signature> sigs = generate_signatures(report);
                if (hooks.on_report)
                    hooks.on_report(report);
                if (!sigs.empty() && hooks.on_signatures)
                    hooks.on_signatures(sigs);
            } catch (const std::exception& e) {
                log_error(std::string("detection failed: ") + e.what());
            }
        }
        if (hooks.on_cycle)
            hooks.on_cycle();

        auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::seconds(options.period_seconds);
        while (!stop.load() && std::chrono::steady_clock::now() < deadline)
            std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
}

} // namespace sift
