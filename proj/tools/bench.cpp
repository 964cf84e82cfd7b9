// Times the two data-parallel kernels (pair extraction, file scanning) in
// serial and OpenMP mode and checks both modes agree byte for byte.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "sift/detector.hpp"
#include "sift/extract.hpp"
#include "sift/scanner.hpp"
#include "sift/sim.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

sift::Bytes random_bytes(std::mt19937_64& rng, std::size_t len) {
    sift::Bytes out(len, '\0');
    std::size_t i = 0;
    while (i < len) {
        std::uint64_t draw = rng();
        for (int b = 0; b < 8 && i < len; ++b, ++i) {
            out[i] = static_cast<char>(draw & 0xff);
            draw >>= 8;
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs parallel kernel benchmark"};
    std::size_t packets = 60;
    std::size_t packet_len = 1500;
    std::size_t files = 24;
    std::size_t file_len = 1 << 20;
    unsigned reps = 3;
    std::uint64_t seed = 1;
    app.add_option("--packets", packets, "packets in the benchmark set");
    app.add_option("--len", packet_len, "bytes per packet");
    app.add_option("--files", files, "files in the scan benchmark");
    app.add_option("--file-size", file_len, "bytes per scanned file");
    app.add_option("--reps", reps, "repetitions per timing");
    app.add_option("--seed", seed, "RNG seed");
    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    std::printf("openmp: %d thread(s)\n", omp_get_max_threads());
#else
    std::printf("openmp: not compiled in, parallel mode runs serially\n");
#endif

    std::mt19937_64 rng(seed);
    sift::Bytes marker = sift::eicar_test_string();

    // Extraction benchmark: all-pairs over one set, half the packets carry
    // the marker so the kernel has real matches to extend and verify.
    std::vector<sift::Packet> pkts;
    for (std::size_t i = 0; i < packets; ++i) {
        sift::Bytes payload = random_bytes(rng, packet_len);
        if (i % 2 == 0)
            payload.replace(rng() % (packet_len - marker.size() + 1), marker.size(), marker);
        pkts.emplace_back(std::move(payload));
    }
    sift::PacketSet set(std::move(pkts));
    sift::ExtractionConfig config;
    config.pairing = sift::Pairing::all_pairs;
    sift::HashParams hp;
    sift::BloomParams bp;

    auto time_extract = [&](sift::ExecMode mode) {
        double best = 1e99;
        std::vector<sift::PatternOccurrence> result;
        for (unsigned r = 0; r < reps; ++r) {
            auto t0 = Clock::now();
            result = sift::extract_set_patterns(set, config, hp, bp, mode);
            best = std::min(best, seconds_since(t0));
        }
        return std::pair{best, result};
    };
    auto [serial_time, serial_out] = time_extract(sift::ExecMode::serial);
    auto [parallel_time, parallel_out] = time_extract(sift::ExecMode::parallel);
    bool extract_same = serial_out == parallel_out;
    std::printf("extract %zu packets x %zu B (all pairs): serial %.3fs  parallel %.3fs  "
                "speedup %.2fx  results %s\n",
                packets, packet_len, serial_time, parallel_time,
                serial_time / parallel_time, extract_same ? "identical" : "DIFFER");

    // Scan benchmark: a fresh tree of random files, a third of them carrying
    // the marker somewhere inside.
    fs::path root = fs::temp_directory_path() /
                    ("siftbench-" + std::to_string(::getpid()));
    fs::create_directories(root);
    for (std::size_t i = 0; i < files; ++i) {
        sift::Bytes content = random_bytes(rng, file_len);
        if (i % 3 == 0)
            content.replace(rng() % (file_len - marker.size() + 1), marker.size(), marker);
        std::ofstream(root / ("f" + std::to_string(i) + ".bin"), std::ios::binary)
            << content;
    }
    sift::SignatureDB db;
    sift::Signature sig{marker, sift::hash_pattern(marker, hp), 0};
    db.merge(std::array{sig});

    auto time_scan = [&](sift::ExecMode mode) {
        sift::ScanOptions opts;
        opts.mode = mode;
        double best = 1e99;
        std::vector<sift::ScanMatch> result;
        for (unsigned r = 0; r < reps; ++r) {
            auto t0 = Clock::now();
            result = sift::scan_path(db, root.string(), opts);
            best = std::min(best, seconds_since(t0));
        }
        return std::pair{best, result};
    };
    auto [scan_serial, scan_serial_out] = time_scan(sift::ExecMode::serial);
    auto [scan_parallel, scan_parallel_out] = time_scan(sift::ExecMode::parallel);
    bool scan_same = scan_serial_out == scan_parallel_out;
    std::printf("scan %zu files x %zu B: serial %.3fs  parallel %.3fs  speedup %.2fx  "
                "results %s\n",
                files, file_len, scan_serial, scan_parallel, scan_serial / scan_parallel,
                scan_same ? "identical" : "DIFFER");
    fs::remove_all(root);

    return extract_same && scan_same ? 0 : 1;
}
