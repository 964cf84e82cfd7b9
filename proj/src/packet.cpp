#include "sift/packet.hpp"

namespace sift {

Packet::Packet(Bytes payload, std::string source_id)
    : payload_(std::move(payload)), source_id_(std::move(source_id)) {
    if (payload_.size() > kMaxPayloadLen)
        throw ArgError("packet payload exceeds 65535 bytes");
}

std::vector<PacketSet> build_packet_sets(std::vector<Packet> packets, std::size_t per_set) {
    if (per_set < 2)
        throw ArgError("packets per set must be >= 2");
    std::vector<PacketSet> sets;
    sets.reserve(packets.size() / per_set);
    std::size_t full = packets.size() / per_set * per_set;
    for (std::size_t i = 0; i < full; i += per_set) {
        std::vector<Packet> chunk(std::make_move_iterator(packets.begin() + i),
                                  std::make_move_iterator(packets.begin() + i + per_set));
        sets.emplace_back(std::move(chunk));
    }
    return sets;
}

std::vector<Corpus> build_corpus(std::vector<PacketSet> sets, std::size_t per_corpus,
                                 std::uint64_t created_at) {
    if (per_corpus < 1)
        throw ArgError("sets per corpus must be >= 1");
    std::vector<Corpus> corpora;
    corpora.reserve(sets.size() / per_corpus);
    std::size_t full = sets.size() / per_corpus * per_corpus;
    for (std::size_t i = 0; i < full; i += per_corpus) {
        Corpus c;
        c.sets.assign(std::make_move_iterator(sets.begin() + i),
                      std::make_move_iterator(sets.begin() + i + per_corpus));
        c.created_at = created_at;
        corpora.push_back(std::move(c));
    }
    return corpora;
}

} // namespace sift
