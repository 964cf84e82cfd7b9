// Command-line front end: one verb per pipeline stage plus the end-to-end
// simulation. Machine-readable JSON lines go to stdout, human summaries and
// warnings to stderr.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sift/amp.hpp"
#include "sift/client.hpp"
#include "sift/corpus_io.hpp"
#include "sift/detector.hpp"
#include "sift/net.hpp"
#include "sift/pcap.hpp"
#include "sift/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::atomic<bool> g_stop{false};

void handle_signal(int) {
    g_stop.store(true);
}

void install_signal_handlers() {
    struct sigaction sa{};
    sa.sa_handler = handle_signal;
    sigaction(SIGINT, &sa, nullptr);
    sigaction(SIGTERM, &sa, nullptr);
}

void emit(const json& record) {
    std::cout << record.dump() << "\n";
    std::cout.flush();
}

sift::Config load_config_or_default(const std::string& path) {
    if (path.empty())
        return sift::Config{};
    return sift::load_config_file(path);
}

sift::Bytes read_file_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw sift::IoError("cannot open " + path);
    sift::Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw sift::IoError("read failed on " + path);
    return data;
}

struct ScenarioFlags {
    std::size_t sets = 10;
    std::size_t packets = 100;
    std::size_t len = 1500;
    double fraction = 0.0;
    std::string payload;
    std::string payload_hex;
    bool eicar = false;
    std::uint64_t seed = 0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--sets", sets, "packet sets per corpus");
        cmd->add_option("--packets", packets, "packets per set");
        cmd->add_option("--len", len, "payload bytes per packet");
        cmd->add_option("--fraction", fraction, "injection probability per packet");
        auto* pl = cmd->add_option("--payload", payload, "literal payload to inject");
        auto* ph = cmd->add_option("--payload-hex", payload_hex, "payload as lowercase hex");
        auto* pe = cmd->add_flag("--eicar", eicar, "inject the standard antivirus test string");
        pl->excludes(ph)->excludes(pe);
        ph->excludes(pe);
        cmd->add_option("--seed", seed, "RNG seed");
    }

    sift::SimScenario scenario() const {
        sift::SimScenario s;
        s.n_sets = sets;
        s.packets_per_set = packets;
        s.packet_len = len;
        s.inject_fraction = fraction;
        s.seed = seed;
        if (eicar)
            s.inject_payload = sift::eicar_test_string();
        else if (!payload_hex.empty())
            s.inject_payload = sift::from_hex(payload_hex);
        else
            s.inject_payload = payload;
        return s;
    }
};

json report_to_json(const sift::DetectionReport& report) {
    json suspects = json::array();
    for (const sift::CoincidenceEntry& e : report.suspects)
        suspects.push_back({{"hex", sift::to_hex(e.pattern.bytes)},
                            {"count", e.count},
                            {"f_q", e.fraction}});
    return {{"event", "report"},
            {"corpus_id", report.corpus_id},
            {"suspects", report.suspects.size()},
            {"started_at", report.started_at},
            {"finished_at", report.finished_at},
            {"patterns", suspects}};
}

int cmd_gen_traffic(const ScenarioFlags& flags, const std::string& out) {
    sift::SimScenario scenario = flags.scenario();
    sift::Corpus corpus = sift::gen_corpus(scenario);
    sift::write_corpus_file(corpus, out);

    std::size_t injected = 0;
    std::size_t total = 0;
    for (const sift::PacketSet& set : corpus.sets)
        for (const sift::Packet& packet : set.packets()) {
            ++total;
            if (!scenario.inject_payload.empty() &&
                packet.payload().find(scenario.inject_payload) != sift::Bytes::npos)
                ++injected;
        }
    emit({{"event", "gen-traffic"},
          {"out", out},
          {"sets", corpus.sets.size()},
          {"packets", total},
          {"injected", injected},
          {"seed", scenario.seed}});
    std::cerr << "wrote " << total << " packets (" << injected << " injected) to "
              << out << "\n";
    return 0;
}

int cmd_ingest(const std::string& pcap_path, const std::string& out,
               std::size_t per_set, std::size_t per_corpus) {
    std::vector<sift::Packet> packets = sift::ingest_pcap_file(pcap_path);
    std::vector<sift::PacketSet> sets = sift::build_packet_sets(std::move(packets), per_set);
    std::vector<sift::Corpus> corpora = sift::build_corpus(std::move(sets), per_corpus);
    if (corpora.empty())
        throw sift::ArgError("not enough packets for a full corpus");
    sift::write_corpus_file(corpora.front(), out);
    emit({{"event", "ingest"},
          {"pcap", pcap_path},
          {"out", out},
          {"sets", corpora.front().sets.size()},
          {"corpora_dropped", corpora.size() - 1}});
    std::cerr << "wrote first corpus (" << corpora.front().sets.size() << " sets) to "
              << out << "\n";
    return 0;
}

int cmd_detect(const std::string& corpus_path, const std::string& config_path) {
    sift::Config cfg = load_config_or_default(config_path);
    sift::Corpus corpus = sift::read_corpus_file(corpus_path);
    sift::DetectionReport report = sift::run_detection(corpus, sift::analysis_params(cfg));
    std::size_t appended = sift::append_suspects(report, cfg.log_path);
    emit(report_to_json(report));
    emit({{"event", "suspects-logged"}, {"path", cfg.log_path}, {"lines", appended}});
    std::cerr << report.suspects.size() << " suspects\n";
    return 0;
}

int cmd_serve(const std::string& config_path) {
    sift::Config cfg = load_config_or_default(config_path);
    sift::CxfrServer server(cfg.cxfr_listen, cfg.spool_dir);
    emit({{"event", "serving"},
          {"cxfr", cfg.cxfr_listen},
          {"port", server.port()},
          {"spool", cfg.spool_dir},
          {"log", cfg.log_path},
          {"period_seconds", cfg.period_seconds},
          {"endpoints", cfg.endpoints}});
    std::cerr << "corpus receiver on port " << server.port() << ", period "
              << cfg.period_seconds << "s\n";

    std::thread receiver([&] {
        try {
            server.serve(g_stop);
        } catch (const std::exception& e) {
            sift::log_error(std::string("receiver stopped: ") + e.what());
            g_stop.store(true);
        }
    });

    sift::ServiceOptions svc;
    svc.spool_dir = cfg.spool_dir;
    svc.log_path = cfg.log_path;
    svc.period_seconds = cfg.period_seconds;
    svc.params = sift::analysis_params(cfg);

    std::vector<std::string> endpoints = cfg.endpoints;
    if (!cfg.udp_broadcast.empty())
        endpoints.push_back(cfg.udp_broadcast);

    sift::ServiceHooks hooks;
    hooks.on_report = [](const sift::DetectionReport& report) {
        emit(report_to_json(report));
    };
    hooks.on_signatures = [&endpoints](const std::vector<sift::Signature>& sigs) {
        if (endpoints.empty()) {
            emit({{"event", "broadcast"}, {"signatures", sigs.size()}, {"delivered", 0},
                  {"note", "no endpoints configured"}});
            return;
        }
        sift::DeliveryReport dr = sift::broadcast_signatures(sigs, endpoints);
        emit({{"event", "broadcast"},
              {"signatures", sigs.size()},
              {"delivered", dr.ok_count()},
              {"endpoints", endpoints.size()}});
    };
    sift::run_service(svc, g_stop, hooks);
    receiver.join();
    emit({{"event", "stopped"}});
    return 0;
}

int cmd_push(const std::string& corpus_path, const std::string& to) {
    sift::Bytes wire = read_file_or_throw(corpus_path);
    std::uint8_t code = sift::cxfr_push(to, wire);
    emit({{"event", "push"}, {"to", to}, {"bytes", wire.size()}, {"reply", code}});
    if (code == 0x00) {
        std::cerr << "accepted (" << wire.size() << " bytes)\n";
        return 0;
    }
    std::cerr << "rejected with code " << unsigned(code) << "\n";
    return 1;
}

int cmd_client(const std::string& config_path) {
    sift::Config cfg = load_config_or_default(config_path);
    sift::ClientOptions opts;
    opts.listen_address = cfg.client_listen;
    opts.db_path = cfg.db_path;
    opts.scan_root = cfg.scan_root;
    opts.quarantine_dir = cfg.quarantine_dir;

    sift::ClientHooks hooks;
    hooks.on_listening = [&](std::uint16_t port) {
        emit({{"event", "client-listening"}, {"address", cfg.client_listen}, {"port", port}});
    };
    hooks.on_update = [](std::size_t added) {
        emit({{"event", "db-update"}, {"new_signatures", added}});
    };
    hooks.on_scan = [](const std::vector<sift::ScanMatch>& matches) {
        emit({{"event", "scan"}, {"matches", matches.size()}});
    };
    hooks.on_quarantine = [](const sift::QuarantineRecord& rec) {
        emit({{"event", "quarantine"},
              {"original", rec.original_path},
              {"moved_to", rec.quarantine_path},
              {"hash", rec.signature_hash},
              {"offset", rec.offset}});
    };
    sift::client_service(opts, g_stop, hooks);
    emit({{"event", "stopped"}});
    return 0;
}

int cmd_simulate(const ScenarioFlags& flags, const std::string& workdir,
                 const std::string& config_path, unsigned timeout_seconds) {
    sift::Config cfg = load_config_or_default(config_path);
    sift::SimReport report = sift::run_simulation(flags.scenario(), workdir, cfg,
                                                  std::chrono::seconds(timeout_seconds));
    for (const std::string& line : report.stages)
        std::cerr << line << "\n";
    emit({{"event", "simulate"},
          {"outcome", report.outcome},
          {"success", report.success},
          {"detection_expected", report.detection_expected},
          {"suspects", report.suspect_count},
          {"signatures", report.signature_count},
          {"clients_quarantined", report.clients_quarantined},
          {"detect_seconds", report.detect_seconds},
          {"cure_seconds", report.cure_seconds},
          {"total_seconds", report.total_seconds}});
    if (report.outcome == "quarantined")
        std::cerr << "cure delivered: detection to quarantine took " << report.cure_seconds
                  << "s (total " << report.total_seconds << "s)\n";
    else
        std::cerr << "outcome: " << report.outcome << "\n";
    return report.success ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    install_signal_handlers();
    CLI::App app{"content-sifting signature pipeline"};
    app.require_subcommand(1);

    ScenarioFlags gen_flags;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen-traffic", "write a synthetic corpus file");
    gen_flags.add_to(gen);
    gen->add_option("--out", gen_out, "output corpus file")->required();

    std::string ingest_pcap, ingest_out;
    std::size_t ingest_per_set = sift::kDefaultPacketsPerSet;
    std::size_t ingest_per_corpus = sift::kDefaultSetsPerCorpus;
    auto* ingest = app.add_subcommand("ingest", "build a corpus file from a pcap capture");
    ingest->add_option("--pcap", ingest_pcap, "input pcap file")->required();
    ingest->add_option("--out", ingest_out, "output corpus file")->required();
    ingest->add_option("--per-set", ingest_per_set, "packets per set");
    ingest->add_option("--per-corpus", ingest_per_corpus, "sets per corpus");

    std::string detect_corpus, detect_config;
    auto* detect = app.add_subcommand("detect", "run detection over one corpus file");
    detect->add_option("--corpus", detect_corpus, "corpus file")->required();
    detect->add_option("--config", detect_config, "config file");

    std::string serve_config;
    auto* serve = app.add_subcommand("serve", "run the honeypot detector service");
    serve->add_option("--config", serve_config, "config file");

    std::string push_corpus, push_to;
    auto* push = app.add_subcommand("push", "push a corpus file to a running detector");
    push->add_option("--corpus", push_corpus, "corpus file")->required();
    push->add_option("--to", push_to, "detector address host:port")->required();

    std::string client_config;
    auto* client = app.add_subcommand("client", "run the thin scanning client");
    client->add_option("--config", client_config, "config file");

    ScenarioFlags sim_flags;
    std::string sim_workdir, sim_config;
    unsigned sim_timeout = 60;
    auto* simulate = app.add_subcommand("simulate", "run the pipeline end to end in one process");
    sim_flags.add_to(simulate);
    simulate->add_option("--workdir", sim_workdir, "empty working directory")->required();
    simulate->add_option("--config", sim_config, "config file");
    simulate->add_option("--timeout", sim_timeout, "seconds before giving up");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen_traffic(gen_flags, gen_out);
        if (ingest->parsed())
            return cmd_ingest(ingest_pcap, ingest_out, ingest_per_set, ingest_per_corpus);
        if (detect->parsed())
            return cmd_detect(detect_corpus, detect_config);
        if (serve->parsed())
            return cmd_serve(serve_config);
        if (push->parsed())
            return cmd_push(push_corpus, push_to);
        if (client->parsed())
            return cmd_client(client_config);
        if (simulate->parsed())
            return cmd_simulate(sim_flags, sim_workdir, sim_config, sim_timeout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
