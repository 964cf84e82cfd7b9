#include "sift/sim.hpp"

#include <array>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include "sift/amp.hpp"
#include "sift/client.hpp"
#include "sift/corpus_io.hpp"
#include "sift/detector.hpp"
#include "sift/net.hpp"

namespace fs = std::filesystem;

namespace sift {

Bytes eicar_test_string() {
    Bytes head = "X5O!P%@AP[4\\PZX54(P^)7CC)7}$";
    Bytes tail = "EICAR-STANDARD-ANTIVIRUS-TEST-FILE!$H+H*";
    return head + tail;
}

void SimScenario::validate() const {
    if (n_sets < 1)
        throw ArgError("scenario needs at least one set");
    if (packets_per_set < 2)
        throw ArgError("scenario needs at least two packets per set");
    if (packet_len > kMaxPayloadLen)
        throw ArgError("packet_len exceeds the payload limit");
    if (inject_fraction < 0.0 || inject_fraction > 1.0)
        throw ArgError("inject_fraction must be in [0, 1]");
    if (inject_payload.size() > packet_len)
        throw ArgError("inject_payload longer than packet_len");
}

namespace {

// [0, 1) from a raw engine draw; avoids distribution objects so the byte
// stream is identical on every platform.
double unit_double(std::uint64_t draw) {
    return static_cast<double>(draw >> 11) * 0x1.0p-53;
}

Bytes random_bytes(std::mt19937_64& rng, std::size_t len) {
    Bytes out(len, '\0');
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

Corpus gen_corpus(const SimScenario& scenario) {
    scenario.validate();
    std::mt19937_64 rng(scenario.seed);
    std::vector<Packet> packets;
    std::size_t total = scenario.n_sets * scenario.packets_per_set;
    packets.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        Bytes payload = random_bytes(rng, scenario.packet_len);
        if (!scenario.inject_payload.empty()) {
            bool inject = unit_double(rng()) < scenario.inject_fraction;
            if (inject) {
                std::size_t room = scenario.packet_len - scenario.inject_payload.size();
                std::size_t offset = room == 0 ? 0 : rng() % (room + 1);
                payload.replace(offset, scenario.inject_payload.size(),
                                scenario.inject_payload);
            }
        }
        packets.emplace_back(std::move(payload));
    }
    std::vector<PacketSet> sets = build_packet_sets(std::move(packets),
                                                    scenario.packets_per_set);
    return build_corpus(std::move(sets), scenario.n_sets, 0).at(0);
}

namespace {

struct Monitor {
    std::mutex mu;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    std::vector<std::string> stages;

    bool report_seen = false;
    std::size_t suspects = 0;
    std::chrono::steady_clock::time_point t_report;

    std::size_t signatures = 0;
    std::size_t delivered = 0;

    std::array<std::size_t, 2> quarantines{0, 0};
    std::chrono::steady_clock::time_point t_last_quarantine;

    double since(std::chrono::steady_clock::time_point t) const {
        return std::chrono::duration<double>(t - t0).count();
    }

    void stage(const std::string& line) {
        std::lock_guard lock(mu);
        char head[32];
        std::snprintf(head, sizeof head, "[+%8.3fs] ",
                      since(std::chrono::steady_clock::now()));
        stages.push_back(head + line);
    }
};

Bytes read_all(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

} // namespace

SimReport run_simulation(const SimScenario& scenario, const std::string& workdir,
                         const Config& cfg, std::chrono::seconds timeout) {
    scenario.validate();
    cfg.validate();
    fs::path wd(workdir);
    if (fs::exists(wd)) {
        if (!fs::is_directory(wd) || !fs::is_empty(wd))
            throw ArgError("simulation workdir must be an empty directory");
    } else {
        fs::create_directories(wd);
    }

    Monitor mon;
    SimReport report;
    report.detection_expected = scenario.inject_fraction > 0.0 &&
                                scenario.inject_payload.size() >= cfg.k_min;

    Corpus corpus = gen_corpus(scenario);
    fs::path corpus_file = wd / "corpus.corp";
    write_corpus_file(corpus, corpus_file);
    mon.stage("corpus written: " + std::to_string(scenario.n_sets) + " sets x " +
              std::to_string(scenario.packets_per_set) + " packets -> " +
              corpus_file.string());

    // Client workspaces: one planted file, one clean file, vault outside the
    // scan root so nothing gets rescanned after the move.
    struct ClientBundle {
        ClientOptions opts;
        fs::path infected;
        fs::path clean;
        Bytes clean_bytes;
        std::thread thread;
    };
    std::array<ClientBundle, 2> clients;
    std::array<std::atomic<std::uint16_t>, 2> ports{};
    std::atomic<bool> stop{false};

    std::mt19937_64 file_rng(scenario.seed + 0x5eedf11e);
    for (std::size_t i = 0; i < clients.size(); ++i) {
        ClientBundle& cb = clients[i];
        fs::path home = wd / ("client" + std::to_string(i + 1));
        fs::path root = home / "files";
        fs::create_directories(root);
        Bytes infected_bytes = random_bytes(file_rng, 2048);
        if (!scenario.inject_payload.empty()) {
            std::size_t offset = 700 + 13 * i;
            infected_bytes.replace(offset, scenario.inject_payload.size(),
                                   scenario.inject_payload);
        }
        cb.infected = root / "infected.bin";
        std::ofstream(cb.infected, std::ios::binary) << infected_bytes;
        cb.clean_bytes = random_bytes(file_rng, 2048);
        cb.clean = root / "clean.bin";
        std::ofstream(cb.clean, std::ios::binary) << cb.clean_bytes;

        cb.opts.listen_address = "127.0.0.1:0";
        cb.opts.db_path = (home / "signatures.amp").string();
        cb.opts.scan_root = root.string();
        cb.opts.quarantine_dir = (home / "quarantine").string();
    }

    for (std::size_t i = 0; i < clients.size(); ++i) {
        ClientBundle& cb = clients[i];
        std::string tag = "client " + std::to_string(i + 1);
        ClientHooks hooks;
        hooks.on_listening = [&, i, tag](std::uint16_t port) {
            ports[i].store(port);
            mon.stage(tag + " listening on port " + std::to_string(port));
        };
        hooks.on_update = [&, tag](std::size_t added) {
            mon.stage(tag + " db update: " + std::to_string(added) + " new signatures");
        };
        hooks.on_quarantine = [&, i, tag](const QuarantineRecord& rec) {
            {
                std::lock_guard lock(mon.mu);
                ++mon.quarantines[i];
                mon.t_last_quarantine = std::chrono::steady_clock::now();
            }
            mon.stage(tag + " quarantined " + rec.original_path + " -> " +
                      rec.quarantine_path);
        };
        cb.thread = std::thread([&, hooks, tag] {
            try {
                client_service(cb.opts, stop, hooks);
            } catch (const std::exception& e) {
                mon.stage(tag + " failed: " + std::string(e.what()));
            }
        });
    }

    auto ports_deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
    while ((ports[0].load() == 0 || ports[1].load() == 0) &&
           std::chrono::steady_clock::now() < ports_deadline)
        std::this_thread::sleep_for(std::chrono::milliseconds(10));

    fs::path spool = wd / "spool";
    CxfrServer server("127.0.0.1:0", spool.string());
    mon.stage("corpus receiver on port " + std::to_string(server.port()));
    std::thread server_thread([&] {
        try {
            server.serve(stop);
        } catch (const std::exception& e) {
            mon.stage("corpus receiver failed: " + std::string(e.what()));
        }
    });

    ServiceOptions svc;
    svc.spool_dir = spool.string();
    svc.log_path = (wd / "suspects.log").string();
    svc.period_seconds = 1;
    svc.params = analysis_params(cfg);
    std::size_t broadcast_seq = 0;
    ServiceHooks det_hooks;
    det_hooks.on_report = [&](const DetectionReport& r) {
        {
            std::lock_guard lock(mon.mu);
            mon.report_seen = true;
            mon.suspects = r.suspects.size();
            mon.t_report = std::chrono::steady_clock::now();
        }
        mon.stage("detection report for corpus " + r.corpus_id + ": " +
                  std::to_string(r.suspects.size()) + " suspects");
    };
    det_hooks.on_signatures = [&](const std::vector<Signature>& sigs) {
        std::vector<std::string> endpoints = {
            "127.0.0.1:" + std::to_string(ports[0].load()),
            "127.0.0.1:" + std::to_string(ports[1].load()),
        };
        AntiMalwarePacket packet;
        packet.signatures = sigs;
        fs::path audit = wd / ("broadcast-" + std::to_string(++broadcast_seq) + ".amp");
        std::ofstream(audit, std::ios::binary) << encode_packet(packet);
        DeliveryReport dr = broadcast_signatures(sigs, endpoints);
        {
            std::lock_guard lock(mon.mu);
            mon.signatures = sigs.size();
            mon.delivered = dr.ok_count();
        }
        mon.stage("broadcast " + std::to_string(sigs.size()) + " signatures, " +
                  std::to_string(dr.ok_count()) + "/" +
                  std::to_string(endpoints.size()) + " delivered");
    };
    std::thread detector_thread([&] {
        try {
            run_service(svc, stop, det_hooks);
        } catch (const std::exception& e) {
            mon.stage("detector failed: " + std::string(e.what()));
        }
    });

    auto finish = [&](const std::string& outcome) {
        stop.store(true);
        detector_thread.join();
        server_thread.join();
        for (ClientBundle& cb : clients)
            cb.thread.join();
        report.outcome = outcome;
        std::lock_guard lock(mon.mu);
        report.suspect_count = mon.suspects;
        report.signature_count = mon.signatures;
        report.clients_quarantined = static_cast<std::size_t>(mon.quarantines[0] > 0) +
                                     static_cast<std::size_t>(mon.quarantines[1] > 0);
        report.total_seconds = mon.since(std::chrono::steady_clock::now());
        report.stages = mon.stages;
    };

    Bytes wire = write_corpus(corpus);
    std::uint8_t code;
    try {
        code = cxfr_push("127.0.0.1:" + std::to_string(server.port()), wire);
    } catch (const std::exception& e) {
        mon.stage("push failed: " + std::string(e.what()));
        finish("error");
        return report;
    }
    auto t_push = std::chrono::steady_clock::now();
    if (code != 0x00) {
        mon.stage("push rejected with code " + std::to_string(code));
        finish("error");
        return report;
    }
    mon.stage("corpus push accepted");

    auto deadline = mon.t0 + timeout;
    std::string outcome = "timeout";
    while (std::chrono::steady_clock::now() < deadline) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        std::lock_guard lock(mon.mu);
        if (!mon.report_seen)
            continue;
        if (mon.suspects == 0) {
            outcome = "no-detection";
            break;
        }
        if (mon.quarantines[0] > 0 && mon.quarantines[1] > 0) {
            outcome = "quarantined";
            break;
        }
    }

    // Timing before teardown so joins do not inflate the cure time.
    {
        std::lock_guard lock(mon.mu);
        if (mon.report_seen) {
            report.detect_seconds =
                std::max(0.0, std::chrono::duration<double>(mon.t_report - t_push).count());
            if (mon.quarantines[0] > 0 || mon.quarantines[1] > 0)
                report.cure_seconds = std::max(
                    0.0,
                    std::chrono::duration<double>(mon.t_last_quarantine - mon.t_report)
                        .count());
        }
    }
    finish(outcome);

    // Verdict: the filesystem is the ground truth, not the counters.
    bool files_ok = true;
    for (ClientBundle& cb : clients) {
        bool clean_intact = fs::exists(cb.clean) && read_all(cb.clean) == cb.clean_bytes;
        if (!clean_intact)
            files_ok = false;
        if (report.outcome == "quarantined") {
            if (fs::exists(cb.infected))
                files_ok = false;
            bool vault_has_file = false;
            bool vault_has_meta = false;
            fs::path vault(cb.opts.quarantine_dir);
            if (fs::is_directory(vault)) {
                for (const auto& entry : fs::directory_iterator(vault)) {
                    std::string name = entry.path().filename().string();
                    if (name.ends_with(".meta"))
                        vault_has_meta = true;
                    else
                        vault_has_file = true;
                }
            }
            if (!vault_has_file || !vault_has_meta)
                files_ok = false;
        }
    }

    if (report.outcome == "quarantined")
        report.success = files_ok && report.detection_expected;
    else if (report.outcome == "no-detection")
        report.success = files_ok && !report.detection_expected;
    else
        report.success = false;
    return report;
}

} // namespace sift
