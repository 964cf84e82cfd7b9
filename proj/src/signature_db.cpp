#include "sift/signature_db.hpp"

#include <filesystem>
#include <fstream>

#include "sift/amp.hpp"

namespace fs = std::filesystem;

namespace sift {

SignatureDB SignatureDB::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open signature db " + path);
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("read failed on signature db " + path);
    AntiMalwarePacket packet = decode_packet(data);
    SignatureDB db;
    db.merge(packet.signatures);
    return db;
}

std::size_t SignatureDB::merge(std::span<const Signature> signatures) {
    std::size_t added = 0;
    for (const Signature& sig : signatures)
        if (entries_.try_emplace(sig.pattern_bytes, sig).second)
            ++added;
    if (added > 0)
        updated_at_ = now_unix_seconds();
    return added;
}

void SignatureDB::save(const std::string& path) const {
    AntiMalwarePacket packet;
    packet.signatures = entries();
    Bytes wire = encode_packet(packet);

    fs::path target(path);
    fs::path dir = target.parent_path();
    fs::path tmp = (dir.empty() ? fs::path(".") : dir) /
                   ("." + target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot write signature db temp file " + tmp.string());
        out.write(wire.data(), static_cast<std::streamsize>(wire.size()));
        out.flush();
        if (!out)
            throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("cannot move signature db into place: " + ec.message());
    }
}

bool SignatureDB::contains(ByteView pattern_bytes) const {
    return entries_.find(pattern_bytes) != entries_.end();
}

const Signature* SignatureDB::find(ByteView pattern_bytes) const {
    auto it = entries_.find(pattern_bytes);
    return it == entries_.end() ? nullptr : &it->second;
}

std::vector<Signature> SignatureDB::entries() const {
    std::vector<Signature> out;
    out.reserve(entries_.size());
    for (const auto& [bytes, sig] : entries_)
        out.push_back(sig);
    return out;
}

} // namespace sift
