#include "sift/coincidence.hpp"

#include <algorithm>
#include <cmath>

namespace sift {

double coincidence_fraction(std::uint64_t count, std::uint64_t packets) {
    if (packets == 0)
        throw ArgError("coincidence_fraction: packet count must be >= 1");
    return std::sqrt(static_cast<double>(count) / static_cast<double>(packets));
}

CoincidenceTable::CoincidenceTable(std::uint32_t packets_in_set)
    : packet_count_(packets_in_set) {
    if (packets_in_set == 0)
        throw ArgError("coincidence table needs a positive packet count");
}

void CoincidenceTable::record(const Pattern& pattern) {
    auto [it, inserted] = entries_.try_emplace(pattern.bytes);
    CoincidenceEntry& e = it->second;
    if (inserted)
        e.pattern = pattern;
    ++e.count;
    e.fraction = coincidence_fraction(e.count, packet_count_);
}

const CoincidenceEntry* CoincidenceTable::find(ByteView pattern_bytes) const {
    auto it = entries_.find(Bytes(pattern_bytes));
    return it == entries_.end() ? nullptr : &it->second;
}

std::vector<CoincidenceEntry> CoincidenceTable::entries() const {
    std::vector<CoincidenceEntry> out;
    out.reserve(entries_.size());
    for (const auto& [bytes, entry] : entries_)
        out.push_back(entry);
    return out;
}

void FilterPolicy::validate() const {
    if (!(threshold > 0.0) || threshold > 1.0)
        throw ArgError("threshold must be in (0, 1]");
    if (!(deviation_multiplier > 0.0))
        throw ArgError("deviation multiplier must be > 0");
    if (min_population < 2)
        throw ArgError("minimum population must be >= 2");
}

namespace {

void sort_suspects(std::vector<CoincidenceEntry>& suspects) {
    std::sort(suspects.begin(), suspects.end(),
              [](const CoincidenceEntry& x, const CoincidenceEntry& y) {
                  if (x.fraction != y.fraction)
                      return x.fraction > y.fraction;
                  return x.pattern.bytes < y.pattern.bytes;
              });
}

} // namespace

std::vector<CoincidenceEntry> flag_suspects(const CoincidenceTable& table,
                                            const FilterPolicy& policy) {
    policy.validate();
    std::vector<CoincidenceEntry> all = table.entries();

    std::vector<CoincidenceEntry> candidates;
    for (const CoincidenceEntry& e : all)
        if (e.fraction >= policy.threshold)
            candidates.push_back(e);

    if (all.size() >= policy.min_population) {
        double mean = 0.0;
        for (const CoincidenceEntry& e : all)
            mean += e.fraction;
        mean /= static_cast<double>(all.size());
        double var = 0.0;
        for (const CoincidenceEntry& e : all)
            var += (e.fraction - mean) * (e.fraction - mean);
        var /= static_cast<double>(all.size());
        double cut = mean + policy.deviation_multiplier * std::sqrt(var);
        std::erase_if(candidates,
                      [&](const CoincidenceEntry& e) { return !(e.fraction > cut); });
    }

    sort_suspects(candidates);
    return candidates;
}

std::vector<CoincidenceEntry> aggregate_corpus_suspects(std::span<const CoincidenceTable> tables,
                                                        const FilterPolicy& policy) {
    if (tables.empty())
        throw ArgError("aggregate_corpus_suspects: no tables");
    std::unordered_map<Bytes, CoincidenceEntry> best;
    for (const CoincidenceTable& table : tables) {
        for (CoincidenceEntry& e : flag_suspects(table, policy)) {
            auto [it, inserted] = best.try_emplace(e.pattern.bytes, e);
            if (!inserted && e.fraction > it->second.fraction)
                it->second = std::move(e);
        }
    }
    std::vector<CoincidenceEntry> out;
    out.reserve(best.size());
    for (auto& [bytes, entry] : best)
        out.push_back(std::move(entry));
    sort_suspects(out);
    return out;
}

} // namespace sift
