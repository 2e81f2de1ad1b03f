#include "competeai/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "competeai/hashing.hpp"

namespace competeai {

namespace {

constexpr char kMagic[8] = {'C', 'A', 'I', 'C', 'K', 'P', 'T', '\0'};
constexpr std::size_t kHeaderSize = sizeof kMagic + 4 + 8;

void put_le(std::string& out, std::uint64_t v, int bytes)
{
    for (int i = 0; i < bytes; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(std::string_view in, std::size_t at, int bytes)
{
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
    return v;
}

} // namespace

std::string encode_checkpoint(const Checkpoint& c)
{
    const nlohmann::json doc{{"config", c.config},
                             {"roster", serialize_roster(c.roster)},
                             {"world", c.world},
                             {"log", c.log.to_jsonl()},
                             {"requests", c.requests}};
    const auto payload = nlohmann::json::to_cbor(doc);

    std::string out(kMagic, sizeof kMagic);
    put_le(out, kCheckpointVersion, 4);
    put_le(out, payload.size(), 8);
    out.append(reinterpret_cast<const char*>(payload.data()), payload.size());
    const auto digest = sha256(out);
    out.append(reinterpret_cast<const char*>(digest.data()), digest.size());
    return out;
}

Checkpoint decode_checkpoint(std::string_view bytes)
{
    if (bytes.size() < kHeaderSize + 32 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
        throw CheckpointError("not a checkpoint file (bad magic bytes)");
    if (const auto v = get_le(bytes, 8, 4); v != kCheckpointVersion)
        throw CheckpointError(fmt::format("checkpoint version {} is not supported (expected {})", v, kCheckpointVersion));
    const auto len = get_le(bytes, 12, 8);
    if (len != bytes.size() - kHeaderSize - 32)
        throw CheckpointError("checkpoint length field does not match the file size");
    const auto body = bytes.substr(0, kHeaderSize + len);
    const auto digest = sha256(body);
    if (std::memcmp(digest.data(), bytes.data() + body.size(), digest.size()) != 0)
        throw CheckpointError("checkpoint checksum mismatch: file is corrupted");

    try {
        const auto doc = nlohmann::json::from_cbor(bytes.substr(kHeaderSize, len));
        Checkpoint c;
        c.config = parse_config(doc.at("config"));
        c.roster = parse_roster(nlohmann::json::parse(doc.at("roster").get<std::string>()));
        c.world = doc.at("world").get<World>();
        c.log = RunLog::from_jsonl(doc.at("log").get<std::string>());
        c.requests = doc.at("requests").get<std::int64_t>();
        return c;
    } catch (const std::exception& e) {
        throw CheckpointError(std::string("checkpoint payload is unreadable: ") + e.what());
    }
}

void save_checkpoint(const std::filesystem::path& file, const Checkpoint& c)
{
    const auto bytes = encode_checkpoint(c);
    if (file.has_parent_path())
        std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw CheckpointError("cannot write checkpoint " + file.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw CheckpointError("cannot open checkpoint " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return decode_checkpoint(ss.str());
}

} // namespace competeai
