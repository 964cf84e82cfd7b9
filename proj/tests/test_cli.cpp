#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sift/common.hpp"
#include "sift/corpus_io.hpp"
#include "sift/net.hpp"
#include "sift/sim.hpp"

using namespace sift;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

struct CmdResult {
    int code = -1;
    std::string output; // stdout and stderr interleaved
};

// Runs the tool with `args` inside `cwd` through the shell.
CmdResult run_tool(const fs::path& cwd, const std::string& args) {
    std::string cmd = "cd '" + cwd.string() + "' && '" + HONEYSIFT_BIN + "' " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CmdResult result;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0)
        result.output.append(buf, n);
    int status = ::pclose(pipe);
    result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

// All lines of `output` that parse as JSON objects with the given event.
std::vector<json> events_named(const std::string& output, const std::string& event) {
    std::vector<json> found;
    std::size_t pos = 0;
    while (pos < output.size()) {
        std::size_t nl = output.find('\n', pos);
        if (nl == std::string::npos)
            nl = output.size();
        std::string line = output.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.empty() || line.front() != '{')
            continue;
        json parsed = json::parse(line, nullptr, false);
        if (!parsed.is_discarded() && parsed.value("event", "") == event)
            found.push_back(parsed);
    }
    return found;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spill(const fs::path& p, const Bytes& data) {
    std::ofstream out(p, std::ios::binary);
    REQUIRE(out);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

} // namespace

TEST_CASE("traffic generation is deterministic and shaped as requested") {
    TempDir tmp("sift-cli");
    std::string flags = "gen-traffic --sets 2 --packets 10 --len 64 --seed 7 --out ";
    CmdResult first = run_tool(tmp.path, flags + "a.corp");
    CmdResult second = run_tool(tmp.path, flags + "b.corp");
    CHECK(first.code == 0);
    CHECK(second.code == 0);
    CHECK(slurp(tmp.path / "a.corp") == slurp(tmp.path / "b.corp"));

    Corpus corpus = read_corpus_file(tmp.path / "a.corp");
    CHECK(corpus.created_at == 0); // pinned so reruns are byte-identical
    REQUIRE(corpus.sets.size() == 2);
    for (const PacketSet& set : corpus.sets) {
        REQUIRE(set.size() == 10);
        for (const Packet& p : set.packets())
            CHECK(p.payload().size() == 64);
    }

    auto events = events_named(first.output, "gen-traffic");
    REQUIRE(events.size() == 1);
    CHECK(events[0]["packets"] == 20);
    CHECK(events[0]["sets"] == 2);
    CHECK(events[0]["injected"] == 0);
    CHECK(events[0]["seed"] == 7);
    CHECK(first.output.find("wrote 20 packets (0 injected)") != std::string::npos);
}

TEST_CASE("traffic generation accounts for injected payloads") {
    TempDir tmp("sift-cli");
    CmdResult r = run_tool(tmp.path,
                           "gen-traffic --eicar --fraction 1 --sets 1 --packets 4 "
                           "--len 300 --seed 3 --out t.corp");
    CHECK(r.code == 0);
    auto events = events_named(r.output, "gen-traffic");
    REQUIRE(events.size() == 1);
    CHECK(events[0]["injected"] == 4);

    Corpus corpus = read_corpus_file(tmp.path / "t.corp");
    for (const Packet& p : corpus.sets[0].packets())
        CHECK(p.payload().find(eicar_test_string()) != Bytes::npos);

    // The payload selectors are mutually exclusive.
    CmdResult both = run_tool(tmp.path, "gen-traffic --eicar --payload X --out u.corp");
    CHECK(both.code != 0);
}

TEST_CASE("detect emits a report and appends the suspects log") {
    TempDir tmp("sift-cli");
    spill(tmp.path / "sift.conf",
          Bytes("# test config\nlog_path = " + (tmp.path / "suspects.log").string() + "\n"));

    CmdResult gen = run_tool(tmp.path,
                             "gen-traffic --eicar --fraction 0.5 --sets 2 --packets 20 "
                             "--len 300 --seed 9 --out hot.corp");
    REQUIRE(gen.code == 0);
    CmdResult det = run_tool(tmp.path, "detect --corpus hot.corp --config sift.conf");
    CHECK(det.code == 0);

    auto reports = events_named(det.output, "report");
    REQUIRE(reports.size() == 1);
    REQUIRE(reports[0]["suspects"].get<std::size_t>() >= 1);
    std::string eicar_hex = to_hex(eicar_test_string());
    bool eicar_flagged = false;
    for (const json& pattern : reports[0]["patterns"])
        if (pattern["hex"].get<std::string>().find(eicar_hex) != std::string::npos)
            eicar_flagged = true;
    CHECK(eicar_flagged);

    std::string log = slurp(tmp.path / "suspects.log");
    CHECK(log.find(eicar_hex) != std::string::npos);
    auto logged = events_named(det.output, "suspects-logged");
    REQUIRE(logged.size() == 1);
    CHECK(logged[0]["lines"].get<std::size_t>() >= 1);
}

TEST_CASE("detect stays quiet on uncorrelated traffic") {
    TempDir tmp("sift-cli");
    CmdResult gen = run_tool(tmp.path,
                             "gen-traffic --sets 2 --packets 20 --len 300 --seed 11 "
                             "--out cold.corp");
    REQUIRE(gen.code == 0);
    CmdResult det = run_tool(tmp.path, "detect --corpus cold.corp");
    CHECK(det.code == 0);
    CHECK(det.output.find("0 suspects") != std::string::npos);
    auto reports = events_named(det.output, "report");
    REQUIRE(reports.size() == 1);
    CHECK(reports[0]["suspects"] == 0);
    CHECK(fs::exists(tmp.path / "suspects.log")); // audit file appears even when empty
    CHECK(slurp(tmp.path / "suspects.log").empty());
}

TEST_CASE("errors surface as nonzero exits with a message") {
    TempDir tmp("sift-cli");
    CmdResult missing = run_tool(tmp.path, "detect --corpus does-not-exist.corp");
    CHECK(missing.code == 2);
    CHECK(missing.output.find("error:") != std::string::npos);

    CmdResult unknown = run_tool(tmp.path, "no-such-verb");
    CHECK(unknown.code != 0);
    CmdResult incomplete = run_tool(tmp.path, "gen-traffic"); // --out is required
    CHECK(incomplete.code != 0);

    CmdResult malformed = run_tool(tmp.path, "detect --corpus x.corp --config nope.conf");
    CHECK(malformed.code == 2);
}

TEST_CASE("push against a live receiver") {
    TempDir tmp("sift-cli");
    fs::path spool = tmp.path / "spool";
    fs::create_directories(spool);
    CxfrServer server("127.0.0.1:0", spool.string());
    std::atomic<bool> stop{false};
    std::thread acceptor([&] { server.serve(stop); });
    std::string to = "127.0.0.1:" + std::to_string(server.port());

    spill(tmp.path / "garbage.corp", Bytes("CORP but cut off"));
    CmdResult rejected = run_tool(tmp.path, "push --corpus garbage.corp --to " + to);
    CHECK(rejected.code == 1);
    CHECK(rejected.output.find("rejected") != std::string::npos);
    auto rejected_events = events_named(rejected.output, "push");
    REQUIRE(rejected_events.size() == 1);
    CHECK(rejected_events[0]["reply"] == 1);

    CmdResult gen = run_tool(tmp.path, "gen-traffic --sets 1 --packets 4 --len 40 --seed 2 "
                                       "--out fine.corp");
    REQUIRE(gen.code == 0);
    CmdResult accepted = run_tool(tmp.path, "push --corpus fine.corp --to " + to);
    CHECK(accepted.code == 0);
    CHECK(accepted.output.find("accepted") != std::string::npos);

    stop.store(true);
    acceptor.join();

    // Only the accepted corpus landed, byte-preserving.
    std::vector<fs::path> landed;
    for (const auto& entry : fs::directory_iterator(spool))
        landed.push_back(entry.path());
    REQUIRE(landed.size() == 1);
    CHECK(landed[0].filename().string().rfind("push-", 0) == 0);
    CHECK(slurp(landed[0]) == slurp(tmp.path / "fine.corp"));
}
