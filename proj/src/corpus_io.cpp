#include "sift/corpus_io.hpp"

#include <fstream>

namespace sift {

namespace {

constexpr ByteView kPsetMagic = "PSET";
constexpr ByteView kCorpMagic = "CORP";
constexpr std::uint16_t kFormatVersion = 1;

void check_magic(ByteView in, std::size_t& off, ByteView magic) {
    if (in.size() - off < 4 || in.substr(off, 4) != magic)
        throw FormatError("bad magic");
    off += 4;
}

void check_version(ByteView in, std::size_t& off) {
    if (get_u16(in, off, "version") != kFormatVersion)
        throw FormatError("unsupported version");
}

PacketSet parse_packet_set(ByteView in, std::size_t& off) {
    check_magic(in, off, kPsetMagic);
    check_version(in, off);
    std::uint32_t count = get_u32(in, off, "packet_count");
    std::vector<Packet> packets;
    packets.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        std::uint32_t len = get_u32(in, off, "payload_len");
        if (len > kMaxPayloadLen)
            throw FormatError("payload_len exceeds 65535");
        packets.emplace_back(get_bytes(in, off, len, "payload"));
    }
    return PacketSet(std::move(packets));
}

} // namespace

Bytes write_packet_set(const PacketSet& set) {
    Bytes out;
    out.append(kPsetMagic);
    put_u16(out, kFormatVersion);
    put_u32(out, static_cast<std::uint32_t>(set.size()));
    for (const Packet& p : set.packets()) {
        put_u32(out, static_cast<std::uint32_t>(p.payload().size()));
        out.append(p.payload());
    }
    return out;
}

PacketSet read_packet_set(ByteView bytes) {
    std::size_t off = 0;
    PacketSet set = parse_packet_set(bytes, off);
    if (off != bytes.size())
        throw FormatError("trailing bytes after packet set");
    return set;
}

Bytes write_corpus(const Corpus& corpus) {
    Bytes out;
    out.append(kCorpMagic);
    put_u16(out, kFormatVersion);
    put_u64(out, corpus.created_at);
    put_u16(out, static_cast<std::uint16_t>(corpus.sets.size()));
    for (const PacketSet& set : corpus.sets) {
        Bytes block = write_packet_set(set);
        put_u32(out, static_cast<std::uint32_t>(block.size()));
        out.append(block);
    }
    return out;
}

Corpus read_corpus(ByteView bytes) {
    std::size_t off = 0;
    check_magic(bytes, off, kCorpMagic);
    check_version(bytes, off);
    Corpus corpus;
    corpus.created_at = get_u64(bytes, off, "created_at");
    std::uint16_t count = get_u16(bytes, off, "set_count");
    corpus.sets.reserve(count);
    for (std::uint16_t i = 0; i < count; ++i) {
        std::uint32_t block_len = get_u32(bytes, off, "block_len");
        Bytes block = get_bytes(bytes, off, block_len, "set block");
        std::size_t block_off = 0;
        PacketSet set = parse_packet_set(block, block_off);
        if (block_off != block.size())
            throw FormatError("block_len does not match set block");
        corpus.sets.push_back(std::move(set));
    }
    if (off != bytes.size())
        throw FormatError("trailing bytes after corpus");
    return corpus;
}

Corpus read_corpus_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return read_corpus(data);
}

void write_corpus_file(const Corpus& corpus, const std::filesystem::path& path) {
    Bytes data = write_corpus(corpus);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out)
        throw IoError("short write to " + path.string());
}

} // namespace sift
