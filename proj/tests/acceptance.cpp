// Acceptance gate: nine numbered criteria, one pass/fail line each.
// Run with no arguments for the full gate, or with a single number to run
// one criterion. Exit code 0 only when every executed criterion passes.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sift/amp.hpp"
#include "sift/bloom.hpp"
#include "sift/coincidence.hpp"
#include "sift/corpus_io.hpp"
#include "sift/detector.hpp"
#include "sift/extract.hpp"
#include "sift/scanner.hpp"
#include "sift/signature_db.hpp"
#include "sift/sim.hpp"

using namespace sift;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, ...) {
    va_list args;
    va_start(args, format);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

struct ScratchDir {
    fs::path path;
    explicit ScratchDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               (tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

// 1. The worked pair yields exactly {BCD, GHIJ} at minimum length 3, fast.
bool criterion_1(std::string& detail) {
    ExtractionConfig cfg;
    cfg.min_len = 3;
    HashParams hp;
    BloomParams bp;
    Packet p1(Bytes("ABCDEFGHIJK"));
    Packet p2(Bytes("AMNBCDOPQGHIJR"));

    std::vector<Pattern> got;
    double best_ms = 1e9;
    for (int rep = 0; rep < 3; ++rep) {
        auto start = Clock::now();
        got = extract_common_patterns(p1, p2, cfg, hp, bp);
        best_ms = std::min(best_ms, seconds_since(start) * 1e3);
    }
    std::vector<Bytes> bytes;
    for (const Pattern& p : got)
        bytes.push_back(p.bytes);
    bool exact = bytes == std::vector<Bytes>{"BCD", "GHIJ"};
    bool fast = best_ms < 1.0;
    detail = fmt("worked pair gave {%s} in %.3f ms (need exactly {BCD, GHIJ} under 1 ms)",
                 [&] {
                     std::string joined;
                     for (const Bytes& b : bytes)
                         joined += (joined.empty() ? "" : ", ") + b;
                     return joined;
                 }()
                     .c_str(),
                 best_ms);
    return exact && fast;
}

// 2. Accelerated extraction equals exhaustive enumeration over 1000+ pairs.
bool criterion_2(std::string& detail) {
    HashParams hp;
    BloomParams bp;
    std::mt19937_64 rng(1002);
    auto start = Clock::now();
    std::size_t pairs = 0;
    std::size_t mismatches = 0;

    const unsigned alphabets[] = {2, 4, 256};
    const std::size_t min_lens[] = {3, 5, 20};
    for (int iter = 0; iter < 990; ++iter) {
        Bytes a = oracle::random_bytes(rng, rng() % 201, alphabets[iter % 3]);
        Bytes b = oracle::random_bytes(rng, rng() % 201, alphabets[iter % 3]);
        ExtractionConfig cfg;
        cfg.min_len = min_lens[rng() % 3];
        auto got = extract_common_patterns(Packet(a), Packet(b), cfg, hp, bp);
        auto want = oracle::common_patterns(a, b, cfg.min_len);
        std::vector<Bytes> got_bytes;
        for (const Pattern& p : got)
            got_bytes.push_back(p.bytes);
        ++pairs;
        if (got_bytes != want)
            ++mismatches;
    }
    for (int iter = 0; iter < 60; ++iter) { // periodic payloads
        Bytes unit = oracle::random_bytes(rng, 1 + rng() % 5, 4);
        Bytes a, b;
        for (std::size_t i = 0, n = 1 + rng() % 50; i < n; ++i)
            a += unit;
        for (std::size_t i = 0, n = 1 + rng() % 50; i < n; ++i)
            b += unit;
        a += oracle::random_bytes(rng, rng() % 8, 4);
        b = oracle::random_bytes(rng, rng() % 8, 4) + b;
        a = a.substr(0, 200);
        b = b.substr(0, 200);
        ExtractionConfig cfg;
        cfg.min_len = 3;
        auto got = extract_common_patterns(Packet(a), Packet(b), cfg, hp, bp);
        auto want = oracle::common_patterns(a, b, cfg.min_len);
        std::vector<Bytes> got_bytes;
        for (const Pattern& p : got)
            got_bytes.push_back(p.bytes);
        ++pairs;
        if (got_bytes != want)
            ++mismatches;
    }

    double elapsed = seconds_since(start);
    detail = fmt("%zu pairs, %zu mismatches, %.1f s (need >= 1000 pairs, 0 mismatches, under 30 s)",
                 pairs, mismatches, elapsed);
    return pairs >= 1000 && mismatches == 0 && elapsed < 30.0;
}

// 3. Measured false-positive rate within factor 1.5 of the closed form at
// (m=10000, k=4, n=500); exact and exponential forms agree to 1e-6 in
// absolute terms there. Their intrinsic relative gap is about k/(2m), a few
// parts in ten thousand, so absolute agreement is the meaningful 1e-6 bound;
// the module tests pin that relative gap separately.
bool criterion_3(std::string& detail) {
    HashParams hp;
    BloomParams bp; // m = 10000, k = 4
    BloomFilter filter(bp, hp);
    std::mt19937_64 rng(1003);
    for (int i = 0; i < 500; ++i)
        filter.insert(oracle::random_bytes(rng, 20));
    const int probes = 100000;
    int hits = 0;
    for (int i = 0; i < probes; ++i)
        if (filter.contains(oracle::random_bytes(rng, 20)))
            ++hits;
    double measured = static_cast<double>(hits) / probes;
    double exact = collision_probability(10000, 4, 500);
    double approx = collision_probability_approx(10000, 4, 500);
    double abs_gap = std::abs(exact - approx);
    double rel_gap = abs_gap / exact;

    bool factor_ok = measured > exact / 1.5 && measured < exact * 1.5;
    bool forms_ok = abs_gap < 1e-6;
    detail = fmt("measured fp %.3e vs exact %.3e (factor band 1.5); exact-approx gap %.3e abs, "
                 "%.3e rel (need abs < 1e-6); the quoted 6.1e-4 is documented, not asserted",
                 measured, exact, abs_gap, rel_gap);
    return factor_ok && forms_ok;
}

// 4. Occurrence fraction worked values are exact; recording never lowers an
// entry's fraction across 10^4 random record sequences.
bool criterion_4(std::string& detail) {
    bool exact_values = coincidence_fraction(25, 100) == 0.5;
    for (std::uint64_t n : {1ULL, 7ULL, 100ULL, 9999ULL}) {
        exact_values = exact_values && coincidence_fraction(0, n) == 0.0;
        exact_values = exact_values && coincidence_fraction(n, n) == 1.0;
    }

    HashParams hp;
    hp.min_pattern_len = 1;
    std::mt19937_64 rng(1004);
    std::vector<Pattern> pool;
    for (int i = 0; i < 50; ++i) {
        Bytes b = oracle::random_bytes(rng, 4 + rng() % 12);
        pool.push_back(Pattern{b, hash_pattern(b, hp)});
    }
    CoincidenceTable table(100);
    std::size_t violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const Pattern& p = pool[rng() % pool.size()];
        const CoincidenceEntry* before = table.find(p.bytes);
        std::uint64_t old_count = before ? before->count : 0;
        double old_fraction = before ? before->fraction : 0.0;
        table.record(p);
        const CoincidenceEntry* after = table.find(p.bytes);
        if (!after || after->count != old_count + 1 || after->fraction < old_fraction ||
            after->fraction != coincidence_fraction(after->count, 100))
            ++violations;
    }
    detail = fmt("worked values %s; %zu monotonicity violations in 10000 records (need 0)",
                 exact_values ? "exact" : "WRONG", violations);
    return exact_values && violations == 0;
}

// 5. Two-stage filter on the synthetic tables: the single outlier is flagged
// alone, an all-equal table flags nothing, a single entry passes stage 1.
bool criterion_5(std::string& detail) {
    auto start = Clock::now();
    HashParams hp;
    hp.min_pattern_len = 1;
    auto named = [&](const std::string& name) {
        return Pattern{name, hash_pattern(name, hp)};
    };
    FilterPolicy policy;

    CoincidenceTable outlier_table(400);
    for (int i = 0; i < 324; ++i)
        outlier_table.record(named("outlier"));
    for (int i = 1; i < 100; ++i)
        outlier_table.record(named("background-" + std::to_string(i)));

    auto flagged = flag_suspects(outlier_table, policy);
    bool outlier_only = flagged.size() == 1 && flagged[0].pattern.bytes == "outlier";

    // Independently frozen moments for this table: mean 0.0585,
    // population sigma 0.0845739322, cut 0.3122217965.
    auto entries = outlier_table.entries();
    double mean = 0.0;
    for (const auto& e : entries)
        mean += e.fraction;
    mean /= static_cast<double>(entries.size());
    double var = 0.0;
    for (const auto& e : entries)
        var += (e.fraction - mean) * (e.fraction - mean);
    double sigma = std::sqrt(var / static_cast<double>(entries.size()));
    double cut = mean + policy.deviation_multiplier * sigma;
    bool moments_ok = std::abs(mean - 0.0585) < 1e-8 &&
                      std::abs(sigma - 0.0845739322) < 1e-8 &&
                      std::abs(cut - 0.3122217965) < 1e-8;

    CoincidenceTable all_equal(400);
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 25; ++j)
            all_equal.record(named("same-" + std::to_string(i)));
    bool quiet_ok = flag_suspects(all_equal, policy).empty();

    CoincidenceTable single(2);
    single.record(named("lonely"));
    auto lone = flag_suspects(single, policy);
    bool single_ok = lone.size() == 1 && lone[0].pattern.bytes == "lonely";

    double elapsed = seconds_since(start);
    detail = fmt("outlier flagged alone: %s; moments match frozen values: %s; "
                 "all-equal quiet: %s; single entry kept by stage 1: %s; %.2f s (need < 1 s)",
                 outlier_only ? "yes" : "NO", moments_ok ? "yes" : "NO",
                 quiet_ok ? "yes" : "NO", single_ok ? "yes" : "NO", elapsed);
    return outlier_only && moments_ok && quiet_ok && single_ok && elapsed < 1.0;
}

// 6. Desk-scale end-to-end detection: 20 seeded corpora (10 x 100 x 1500,
// 50% carrying the test string) must flag it in at least 19; the same
// corpora without injection must stay silent, all under 60 s.
bool criterion_6(std::string& detail) {
    auto start = Clock::now();
    AnalysisParams params = analysis_params(Config{});
    Bytes eicar = eicar_test_string();

    int detected = 0;
    int clean_hits = 0;
    const int runs = 20;
    for (int run = 0; run < runs; ++run) {
        SimScenario hot;
        hot.n_sets = 10;
        hot.packets_per_set = 100;
        hot.packet_len = 1500;
        hot.inject_fraction = 0.5;
        hot.inject_payload = eicar;
        hot.seed = 9000 + run;
        DetectionReport report = run_detection(gen_corpus(hot), params);
        for (const CoincidenceEntry& e : report.suspects)
            if (e.pattern.bytes.find(eicar) != Bytes::npos) {
                ++detected;
                break;
            }

        SimScenario cold = hot;
        cold.inject_fraction = 0.0;
        cold.inject_payload.clear();
        if (!run_detection(gen_corpus(cold), params).suspects.empty())
            ++clean_hits;
    }
    double elapsed = seconds_since(start);
    detail = fmt("injected runs detected %d/20 (need >= 19); clean runs with suspects %d "
                 "(need 0); %.1f s (need < 60 s)",
                 detected, clean_hits, elapsed);
    return detected >= 19 && clean_hits == 0 && elapsed < 60.0;
}

// 7. Cure propagation: the in-process pipeline run ends with both clients
// quarantining the planted file, clean files untouched, cure under 30 s.
bool criterion_7(std::string& detail) {
    ScratchDir scratch("sift-acceptance-sim");
    SimScenario scenario;
    scenario.n_sets = 10;
    scenario.packets_per_set = 100;
    scenario.packet_len = 1500;
    scenario.inject_fraction = 0.5;
    scenario.inject_payload = eicar_test_string();
    scenario.seed = 1007;

    SimReport report = run_simulation(scenario, scratch.path.string(), Config{},
                                      std::chrono::seconds(60));
    bool cured = report.success && report.outcome == "quarantined" &&
                 report.clients_quarantined == 2;
    bool timely = report.cure_seconds < 30.0;
    detail = fmt("outcome %s, clients quarantined %zu/2, clean files intact %s, "
                 "detection-to-quarantine %.2f s (need quarantined on both under 30 s)",
                 report.outcome.c_str(), report.clients_quarantined,
                 report.success ? "yes" : "NO", report.cure_seconds);
    return cured && timely;
}

// 8. Wire formats: corpus and signature-packet codecs are exact inverses on
// 10^4 random instances; the hand-assembled packet fixture decodes exactly.
bool criterion_8(std::string& detail) {
    std::mt19937_64 rng(1008);
    std::size_t corpus_failures = 0;
    for (int iter = 0; iter < 10000; ++iter) {
        Corpus corpus;
        corpus.created_at = rng();
        std::size_t sets = rng() % 4;
        for (std::size_t s = 0; s < sets; ++s) {
            std::vector<Packet> packets;
            std::size_t count = rng() % 5;
            for (std::size_t p = 0; p < count; ++p)
                packets.emplace_back(oracle::random_bytes(rng, rng() % 41));
            corpus.sets.push_back(PacketSet(std::move(packets)));
        }
        Bytes wire = write_corpus(corpus);
        if (!(read_corpus(wire) == corpus && write_corpus(read_corpus(wire)) == wire))
            ++corpus_failures;
    }

    std::size_t amp_failures = 0;
    for (int iter = 0; iter < 10000; ++iter) {
        AntiMalwarePacket packet;
        std::size_t n = rng() % 8;
        for (std::size_t i = 0; i < n; ++i)
            packet.signatures.push_back(
                Signature{oracle::random_bytes(rng, 1 + rng() % 40), rng(), rng()});
        Bytes wire = encode_packet(packet);
        if (!(decode_packet(wire) == packet && encode_packet(decode_packet(wire)) == wire))
            ++amp_failures;
    }

    AntiMalwarePacket fixture;
    fixture.signatures.push_back(Signature{Bytes("BCD"), 6521, 0});
    bool fixture_ok =
        to_hex(encode_packet(fixture)) ==
            "414d503100010001000000034243440000000000001979"
            "0000000000000000" &&
        decode_packet(from_hex("414d503100010001000000034243440000000000001979"
                               "0000000000000000")) == fixture;

    detail = fmt("corpus codec failures %zu/10000, signature codec failures %zu/10000, "
                 "byte fixture %s (need 0, 0, exact)",
                 corpus_failures, amp_failures, fixture_ok ? "exact" : "WRONG");
    return corpus_failures == 0 && amp_failures == 0 && fixture_ok;
}

// 9. Scanner: a signature straddling a chunk boundary is found, and the
// chunked directory scan equals whole-buffer search on 100 random files.
bool criterion_9(std::string& detail) {
    ScratchDir scratch("sift-acceptance-scan");
    fs::create_directories(scratch.path);
    std::mt19937_64 rng(1009);

    HashParams hp;
    Bytes sig_bytes = oracle::random_bytes(rng, 24);
    SignatureDB db;
    db.merge(std::vector<Signature>{Signature{sig_bytes, hash_pattern(sig_bytes, hp), 1}});

    // Straddle: plant 8 bytes before a 4 KiB chunk boundary.
    ScanOptions opts;
    opts.chunk_size = 1 << 12;
    Bytes straddle = oracle::random_bytes(rng, 3 * opts.chunk_size);
    std::size_t plant_at = opts.chunk_size - 8;
    straddle.replace(plant_at, sig_bytes.size(), sig_bytes);
    fs::path straddle_file = scratch.path / "straddle.bin";
    {
        std::ofstream out(straddle_file, std::ios::binary);
        out.write(straddle.data(), static_cast<std::streamsize>(straddle.size()));
    }
    auto straddle_matches = scan_path(db, straddle_file.string(), opts);
    bool straddle_ok = straddle_matches.size() == 1 &&
                       straddle_matches[0].offset == plant_at;

    // 100 random files up to 1 MiB, a third carrying the signature.
    fs::path tree = scratch.path / "tree";
    fs::create_directories(tree);
    std::vector<std::pair<std::string, Bytes>> files;
    for (int i = 0; i < 100; ++i) {
        std::size_t len = rng() % (1 << 20);
        Bytes content = oracle::random_bytes(rng, len, 16);
        if (i % 3 == 0 && content.size() > 2 * sig_bytes.size()) {
            std::size_t at = rng() % (content.size() - sig_bytes.size());
            content.replace(at, sig_bytes.size(), sig_bytes);
        }
        fs::path file = tree / fmt("file-%03d.bin", i);
        std::ofstream out(file, std::ios::binary);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        files.emplace_back(file.string(), std::move(content));
    }
    std::sort(files.begin(), files.end());

    std::vector<ScanMatch> want;
    Signature stored = db.entries()[0];
    for (const auto& [file, content] : files) {
        auto offs = oracle::first_offsets(content, {sig_bytes});
        if (offs[0] >= 0)
            want.push_back(ScanMatch{file, stored, static_cast<std::uint64_t>(offs[0])});
    }
    auto got = scan_path(db, tree.string(), opts);
    bool tree_ok = got == want;

    detail = fmt("boundary straddle %s at offset %zu; tree scan %zu matches vs oracle %zu, "
                 "%s (need equal)",
                 straddle_ok ? "found" : "MISSED", plant_at, got.size(), want.size(),
                 tree_ok ? "identical" : "DIFFERENT");
    return straddle_ok && tree_ok;
}

} // namespace

int main(int argc, char** argv) {
    using Criterion = bool (*)(std::string&);
    const Criterion criteria[] = {criterion_1, criterion_2, criterion_3,
                                  criterion_4, criterion_5, criterion_6,
                                  criterion_7, criterion_8, criterion_9};

    int only = 0;
    if (argc > 1) {
        only = std::atoi(argv[1]);
        if (only < 1 || only > 9) {
            std::fprintf(stderr, "usage: %s [1-9]\n", argv[0]);
            return 2;
        }
    }

    int failures = 0;
    for (int n = 1; n <= 9; ++n) {
        if (only != 0 && n != only)
            continue;
        std::string detail;
        bool ok = false;
        try {
            ok = criteria[n - 1](detail);
        } catch (const std::exception& e) {
            detail = std::string("unexpected exception: ") + e.what();
        }
        std::printf("criterion %d %s: %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
        std::fflush(stdout);
        if (!ok)
            ++failures;
    }
    return failures == 0 ? 0 : 1;
}
