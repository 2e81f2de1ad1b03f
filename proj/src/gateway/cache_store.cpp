#include <cstring>
#include <fstream>

#include <fmt/format.h>

#include "competeai/gateway.hpp"

namespace competeai {

namespace {

constexpr char kMagic[8] = {'C', 'A', 'I', 'C', 'A', 'C', 'H', 'E'};

void put_u32(std::string& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, std::size_t at)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
    return v;
}

} // namespace

std::shared_ptr<CacheStore> CacheStore::open(const std::filesystem::path& file, bool create)
{
    std::shared_ptr<CacheStore> store(new CacheStore(file));
    if (!std::filesystem::exists(file)) {
        if (!create)
            throw CacheError("cache file not found: " + file.string());
        if (file.has_parent_path())
            std::filesystem::create_directories(file.parent_path());
        std::string header(kMagic, sizeof kMagic);
        put_u32(header, kFormatVersion);
        std::ofstream out(file, std::ios::binary);
        out.write(header.data(), static_cast<std::streamsize>(header.size()));
        if (!out)
            throw CacheError("cannot create cache file " + file.string());
        return store;
    }

    std::ifstream in(file, std::ios::binary);
    const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < 12 || std::memcmp(data.data(), kMagic, sizeof kMagic) != 0)
        throw CacheError(file.string() + ": not a completion cache (bad magic bytes)");
    if (const auto v = get_u32(data, 8); v != kFormatVersion)
        throw CacheError(fmt::format("{}: cache format version {} is not supported (expected {})", file.string(), v,
                                     kFormatVersion));
    std::size_t pos = 12;
    while (pos < data.size()) {
        if (data.size() - pos < 4)
            throw CacheError(fmt::format("{}: truncated record header at byte {}", file.string(), pos));
        const auto len = get_u32(data, pos);
        pos += 4;
        if (data.size() - pos < len)
            throw CacheError(fmt::format("{}: truncated record at byte {}", file.string(), pos - 4));
        auto rec = std::make_unique<CompletionRecord>();
        try {
            *rec = nlohmann::json::parse(data.substr(pos, len)).get<CompletionRecord>();
        } catch (const nlohmann::json::exception& e) {
            throw CacheError(fmt::format("{}: bad record at byte {}: {}", file.string(), pos - 4, e.what()));
        }
        pos += len;
        store->index_.try_emplace(rec->fingerprint, rec.get());
        store->records_.push_back(std::move(rec));
    }
    return store;
}

const CompletionRecord* CacheStore::find(const std::string& fingerprint) const
{
    std::lock_guard lock(mutex_);
    auto it = index_.find(fingerprint);
    return it == index_.end() ? nullptr : it->second;
}

void CacheStore::append(const CompletionRecord& record)
{
    const auto body = nlohmann::json(record).dump();
    std::string frame;
    put_u32(frame, static_cast<std::uint32_t>(body.size()));
    frame += body;

    std::lock_guard lock(mutex_);
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    out.write(frame.data(), static_cast<std::streamsize>(frame.size()));
    out.flush();
    if (!out)
        throw CacheError("cannot append to cache file " + path_.string());
    auto rec = std::make_unique<CompletionRecord>(record);
    index_.try_emplace(rec->fingerprint, rec.get());
    records_.push_back(std::move(rec));
}

std::size_t CacheStore::size() const
{
    std::lock_guard lock(mutex_);
    return records_.size();
}

} // namespace competeai
