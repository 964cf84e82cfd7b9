#pragma once

// Traffic synthesis and the self-contained end-to-end run: detector,
// push channel and two thin clients wired together in one process.

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "sift/config.hpp"
#include "sift/packet.hpp"

namespace sift {

// The 68-byte industry-standard antivirus test string, assembled at runtime
// so it never sits contiguous in the binary or in any source file.
Bytes eicar_test_string();

struct SimScenario {
    std::size_t n_sets = 10;
    std::size_t packets_per_set = 100;
    std::size_t packet_len = 1500;
    double inject_fraction = 0.0; // in [0, 1]
    Bytes inject_payload;         // length <= packet_len
    std::uint64_t seed = 0;

    void validate() const;
};

// Seeded synthetic corpus: uniform-random payloads, each independently
// receiving inject_payload at a random offset with probability
// inject_fraction. Byte-identical across runs and platforms for a fixed
// scenario (created_at is pinned to 0 for that reason).
Corpus gen_corpus(const SimScenario& scenario);

struct SimReport {
    bool success = false;
    std::string outcome; // "quarantined" | "no-detection" | "timeout" | "error"
    bool detection_expected = false;
    std::size_t suspect_count = 0;
    std::size_t signature_count = 0;
    std::size_t clients_quarantined = 0;
    double detect_seconds = 0.0; // push accepted -> detection report
    double cure_seconds = 0.0;   // detection report -> last quarantine
    double total_seconds = 0.0;
    std::vector<std::string> stages; // timestamped stage lines for the audit dump
};

// Runs the whole pipeline inside `workdir` (which must be empty or absent):
// writes the corpus, pushes it to an in-process detector on a 1 s period,
// and watches two clients whose roots hold one infected and one clean file.
// Succeeds when both clients quarantine the infected file and leave the
// clean one, or when a no-detection scenario correctly produces nothing.
SimReport run_simulation(const SimScenario& scenario, const std::string& workdir,
                         const Config& cfg = {},
                         std::chrono::seconds timeout = std::chrono::seconds(60));

} // namespace sift
