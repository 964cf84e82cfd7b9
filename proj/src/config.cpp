#include "sift/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

namespace sift {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view value, std::string_view key) {
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw FormatError("config: bad value for " + std::string(key));
    return out;
}

double parse_double(std::string_view value, std::string_view key) {
    try {
        std::size_t pos = 0;
        double out = std::stod(std::string(value), &pos);
        if (pos != value.size())
            throw FormatError("");
        return out;
    } catch (const std::exception&) {
        throw FormatError("config: bad value for " + std::string(key));
    }
}

std::vector<std::string> parse_list(std::string_view value) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        std::size_t comma = value.find(',', start);
        if (comma == std::string_view::npos)
            comma = value.size();
        std::string_view item = trim(value.substr(start, comma - start));
        if (!item.empty())
            out.emplace_back(item);
        start = comma + 1;
    }
    return out;
}

} // namespace

void Config::validate() const {
    if (k_min < 2)
        throw ArgError("config: k_min must be >= 2");
    if (k_max != 0 && k_max < k_min)
        throw ArgError("config: k_max must be 0 or >= k_min");
    if (!(tau > 0.0) || tau > 1.0)
        throw ArgError("config: tau must be in (0, 1]");
    if (!(c > 0.0))
        throw ArgError("config: c must be > 0");
    if (min_population < 2)
        throw ArgError("config: min_population must be >= 2");
    if (bloom_m < 8)
        throw ArgError("config: bloom_m must be >= 8");
    if (bloom_k < 1 || bloom_k > 32)
        throw ArgError("config: bloom_k must be in [1, 32]");
    if (hash_q < 2)
        throw ArgError("config: hash_q must be >= 2");
    if (period_seconds == 0)
        throw ArgError("config: period_seconds must be >= 1");
    if (spool_dir.empty() || log_path.empty())
        throw ArgError("config: spool_dir and log_path must be set");
}

Config parse_config(ByteView text) {
    Config cfg;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == ByteView::npos)
            nl = text.size();
        std::string_view line = trim(ByteView(text).substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#')
            continue;
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw FormatError("config line " + std::to_string(line_no) + ": expected key=value");
        std::string_view key = trim(line.substr(0, eq));
        std::string_view value = trim(line.substr(eq + 1));
        if (key.empty())
            throw FormatError("config line " + std::to_string(line_no) + ": empty key");
        if (!seen.insert(std::string(key)).second)
            throw FormatError("config: duplicate key " + std::string(key));

        if (key == "k_min") {
            cfg.k_min = parse_number<std::size_t>(value, key);
        } else if (key == "k_max") {
            cfg.k_max = parse_number<std::size_t>(value, key);
        } else if (key == "pairing") {
            if (value == "adjacent")
                cfg.pairing = Pairing::adjacent_disjoint;
            else if (value == "all")
                cfg.pairing = Pairing::all_pairs;
            else
                throw FormatError("config: pairing must be adjacent or all");
        } else if (key == "tau") {
            cfg.tau = parse_double(value, key);
        } else if (key == "c") {
            cfg.c = parse_double(value, key);
        } else if (key == "min_population") {
            cfg.min_population = parse_number<std::size_t>(value, key);
        } else if (key == "bloom_m") {
            cfg.bloom_m = parse_number<std::uint64_t>(value, key);
        } else if (key == "bloom_k") {
            cfg.bloom_k = parse_number<unsigned>(value, key);
        } else if (key == "hash_q") {
            cfg.hash_q = parse_number<std::uint64_t>(value, key);
        } else if (key == "period_seconds") {
            cfg.period_seconds = parse_number<unsigned>(value, key);
        } else if (key == "spool_dir") {
            cfg.spool_dir = std::string(value);
        } else if (key == "log_path") {
            cfg.log_path = std::string(value);
        } else if (key == "cxfr_listen") {
            cfg.cxfr_listen = std::string(value);
        } else if (key == "endpoints") {
            cfg.endpoints = parse_list(value);
        } else if (key == "udp_broadcast") {
            cfg.udp_broadcast = std::string(value);
        } else if (key == "client_listen") {
            cfg.client_listen = std::string(value);
        } else if (key == "db_path") {
            cfg.db_path = std::string(value);
        } else if (key == "scan_root") {
            cfg.scan_root = std::string(value);
        } else if (key == "quarantine_dir") {
            cfg.quarantine_dir = std::string(value);
        } else {
            throw FormatError("config: unknown key " + std::string(key));
        }
    }
    cfg.validate();
    return cfg;
}

Config load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace sift
