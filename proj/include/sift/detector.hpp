#pragma once

// Honeypot-side services: spool intake, periodic detection over corpora,
// suspects logging and signature generation.

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sift/bloom.hpp"
#include "sift/coincidence.hpp"
#include "sift/config.hpp"
#include "sift/extract.hpp"
#include "sift/hash.hpp"
#include "sift/packet.hpp"
#include "sift/signature.hpp"

namespace sift {

// Everything run_detection needs; snapshotted into each report so a log entry
// can always be traced back to the settings that produced it.
struct AnalysisParams {
    ExtractionConfig extraction;
    FilterPolicy policy;
    HashParams hash;
    BloomParams bloom;
    ExecMode mode = ExecMode::parallel;
};

AnalysisParams analysis_params(const Config& cfg);

struct DetectionReport {
    std::string corpus_id;
    std::vector<CoincidenceEntry> suspects; // ordering matches aggregate_corpus_suspects
    std::uint64_t started_at = 0;
    std::uint64_t finished_at = 0; // >= started_at
    AnalysisParams config_snapshot;
};

// Stable identifier for a corpus: FNV-1a 64 over its wire encoding, hex.
std::string corpus_id(const Corpus& corpus);

// Picks the oldest parseable corpus file out of `spool_dir` (ordered by the
// encoded created_at, ties by filename), moves it to processed/ and returns
// it. Malformed files are moved to rejected/ with a logged error and never
// abort the call. Dot-prefixed names are in-flight writes and are ignored.
std::optional<Corpus> receive_corpus(const std::string& spool_dir);

// Pairs and extracts within each packet set, records into that set's
// coincidence table, then aggregates suspects across the corpus.
DetectionReport run_detection(const Corpus& corpus, const AnalysisParams& params);

// Appends one line per suspect: ISO-8601 UTC, TAB, f_Q with 4 decimals, TAB,
// lowercase hex of the pattern bytes, LF. Returns the number of lines written.
std::size_t append_suspects(const DetectionReport& report, const std::string& log_path);

// One signature per suspect, deduplicated by bytes, created_at = now.
std::vector<Signature> generate_signatures(const DetectionReport& report);

struct ServiceOptions {
    std::string spool_dir;
    std::string log_path;
    unsigned period_seconds = 3600;
    AnalysisParams params;
};

// Callbacks fired by the service loop; any of them may be empty. on_signatures
// is the hand-off point to the distribution side.
struct ServiceHooks {
    std::function<void(const DetectionReport&)> on_report;
    std::function<void(const std::vector<Signature>&)> on_signatures;
    std::function<void()> on_cycle; // end of each drain pass
};

// Runs drain-detect-log-sign cycles every period until `stop` becomes true.
// Stop requests are honored between corpora; per-corpus failures are logged
// and skipped.
void run_service(const ServiceOptions& options, std::atomic<bool>& stop,
                 const ServiceHooks& hooks = {});

} // namespace sift
