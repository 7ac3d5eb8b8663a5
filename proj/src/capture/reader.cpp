#include "netfeat/capture/reader.hpp"

#include <array>
#include <cstring>

namespace netfeat::capture {

namespace {

constexpr std::uint32_t kPcapMagicMicro = 0xa1b2c3d4;
constexpr std::uint32_t kPcapMagicNano = 0xa1b23c4d;
constexpr std::uint32_t kPcapNgSectionHeader = 0x0a0d0d0a;
constexpr std::uint32_t kPcapNgByteOrderMagic = 0x1a2b3c4d;
constexpr std::uint32_t kPcapNgInterfaceBlock = 0x00000001;
constexpr std::uint32_t kPcapNgEnhancedPacket = 0x00000006;

constexpr std::uint16_t kOptEndOfOpt = 0;
constexpr std::uint16_t kOptTsResol = 9;
constexpr std::uint16_t kOptTsOffset = 14;

// Anything larger is treated as a corrupt length field rather than a frame.
constexpr std::uint32_t kMaxRecordBytes = 256u * 1024u * 1024u;

std::uint32_t bswap(std::uint32_t v) { return __builtin_bswap32(v); }
std::uint16_t bswap(std::uint16_t v) { return __builtin_bswap16(v); }

std::uint32_t load_le32(const std::uint8_t* p)
{
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
           std::uint32_t(p[3]) << 24;
}

// Converts a PCAPNG timestamp in interface units to microseconds.
std::int64_t units_to_micros(std::uint64_t units, std::uint8_t resolution)
{
    const bool binary = (resolution & 0x80) != 0;
    const unsigned exponent = resolution & 0x7f;
    if (binary) {
        const unsigned __int128 scaled = static_cast<unsigned __int128>(units) * 1'000'000u;
        return static_cast<std::int64_t>(exponent >= 127 ? 0 : scaled >> exponent);
    }
    if (exponent == 6)
        return static_cast<std::int64_t>(units);
    if (exponent > 6) {
        std::uint64_t div = 1;
        for (unsigned i = 6; i < exponent && i < 25; ++i)
            div *= 10;
        return static_cast<std::int64_t>(units / div);
    }
    std::uint64_t mul = 1;
    for (unsigned i = exponent; i < 6; ++i)
        mul *= 10;
    return static_cast<std::int64_t>(units * mul);
}

} // namespace

CaptureReader::CaptureReader(const std::filesystem::path& path) : path_(path)
{
    in_.open(path, std::ios::binary);
    if (!in_)
        throw CaptureError("cannot open capture file: " + path.string());

    std::array<std::uint8_t, 4> magic{};
    if (!read_exact(magic.data(), magic.size()))
        throw CaptureError("file too short for a capture header: " + path.string());

    const std::uint32_t le = load_le32(magic.data());
    const std::uint32_t be = bswap(le);
    if (le == kPcapNgSectionHeader) {
        format_ = CaptureFormat::PcapNg;
        if (!read_section_header())
            throw CaptureError("malformed PCAPNG section header: " + path.string());
        return;
    }

    if (le == kPcapMagicMicro || le == kPcapMagicNano) {
        swapped_ = false;
        nanosecond_ = le == kPcapMagicNano;
    } else if (be == kPcapMagicMicro || be == kPcapMagicNano) {
        swapped_ = true;
        nanosecond_ = be == kPcapMagicNano;
    } else {
        throw CaptureError("unknown capture magic in " + path.string());
    }

    std::array<std::uint8_t, 20> rest{};
    if (!read_exact(rest.data(), rest.size()))
        throw CaptureError("truncated PCAP global header: " + path.string());
    const std::uint32_t network = u32(rest.data() + 16);
    link_types_.push_back(static_cast<LinkType>(network & 0xffff));
    format_ = CaptureFormat::Pcap;
}

bool CaptureReader::read_exact(void* dst, std::size_t n)
{
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in_.gcount()) == n;
}

std::uint32_t CaptureReader::u32(const std::uint8_t* p) const
{
    const std::uint32_t v = load_le32(p);
    return swapped_ ? bswap(v) : v;
}

std::uint16_t CaptureReader::u16(const std::uint8_t* p) const
{
    const auto v = static_cast<std::uint16_t>(p[0] | p[1] << 8);
    return swapped_ ? bswap(v) : v;
}

void CaptureReader::warn_truncated(const std::string& what)
{
    truncated_ = true;
    done_ = true;
    warnings_.push_back(path_.string() + ": " + what + " after " + std::to_string(record_index_) +
                        " records");
}

std::optional<RawRecord> CaptureReader::next()
{
    if (done_)
        return std::nullopt;
    auto rec = format_ == CaptureFormat::Pcap ? next_pcap() : next_pcapng();
    if (rec)
        ++record_index_;
    return rec;
}

std::optional<RawRecord> CaptureReader::next_pcap()
{
    std::array<std::uint8_t, 16> hdr{};
    in_.read(reinterpret_cast<char*>(hdr.data()), hdr.size());
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got == 0) {
        done_ = true;
        return std::nullopt;
    }
    if (got < hdr.size()) {
        warn_truncated("truncated record header");
        return std::nullopt;
    }

    const std::uint32_t sec = u32(hdr.data());
    const std::uint32_t frac = u32(hdr.data() + 4);
    const std::uint32_t caplen = u32(hdr.data() + 8);
    const std::uint32_t origlen = u32(hdr.data() + 12);
    if (caplen > kMaxRecordBytes) {
        warn_truncated("implausible record length " + std::to_string(caplen));
        return std::nullopt;
    }

    RawRecord rec;
    rec.link_type = link_types_.front();
    rec.original_length = origlen;
    rec.timestamp = Timestamp::from_seconds(sec, nanosecond_ ? frac / 1000 : frac);
    rec.data.resize(caplen);
    if (caplen > 0 && !read_exact(rec.data.data(), caplen)) {
        warn_truncated("truncated record data");
        return std::nullopt;
    }
    return rec;
}

bool CaptureReader::read_section_header()
{
    // Block type already consumed; the byte-order magic decides endianness.
    std::array<std::uint8_t, 8> head{};
    if (!read_exact(head.data(), head.size()))
        return false;
    const std::uint32_t bom = load_le32(head.data() + 4);
    if (bom == kPcapNgByteOrderMagic)
        swapped_ = false;
    else if (bswap(bom) == kPcapNgByteOrderMagic)
        swapped_ = true;
    else
        return false;

    const std::uint32_t total = u32(head.data());
    if (total < 28 || total % 4 != 0 || total > kMaxRecordBytes)
        return false;
    std::vector<std::uint8_t> rest(total - 12);
    if (!read_exact(rest.data(), rest.size()))
        return false;
    interfaces_.clear();
    return true;
}

void CaptureReader::parse_interface_block(const std::vector<std::uint8_t>& body)
{
    Interface iface;
    if (body.size() >= 8) {
        iface.link_type = static_cast<LinkType>(u16(body.data()));
        std::size_t pos = 8;
        while (pos + 4 <= body.size()) {
            const std::uint16_t code = u16(body.data() + pos);
            const std::uint16_t len = u16(body.data() + pos + 2);
            pos += 4;
            if (code == kOptEndOfOpt || pos + len > body.size())
                break;
            if (code == kOptTsResol && len >= 1)
                iface.ts_resolution = body[pos];
            if (code == kOptTsOffset && len >= 8) {
                const std::uint64_t lo = u32(body.data() + pos);
                const std::uint64_t hi = u32(body.data() + pos + 4);
                iface.ts_offset_seconds =
                    static_cast<std::int64_t>(swapped_ ? (lo << 32 | hi) : (hi << 32 | lo));
            }
            pos += (len + 3u) & ~3u;
        }
    }
    interfaces_.push_back(iface);
    link_types_.push_back(iface.link_type);
}

std::optional<RawRecord> CaptureReader::next_pcapng()
{
    for (;;) {
        std::array<std::uint8_t, 8> head{};
        in_.read(reinterpret_cast<char*>(head.data()), head.size());
        const auto got = static_cast<std::size_t>(in_.gcount());
        if (got == 0) {
            done_ = true;
            return std::nullopt;
        }
        if (got < head.size()) {
            warn_truncated("truncated block header");
            return std::nullopt;
        }

        const std::uint32_t raw_type = load_le32(head.data());
        if (raw_type == kPcapNgSectionHeader) {
            // Re-read the length after the byte-order magic of the new section.
            in_.seekg(-4, std::ios::cur);
            if (!read_section_header()) {
                warn_truncated("malformed section header");
                return std::nullopt;
            }
            continue;
        }

        const std::uint32_t type = u32(head.data());
        const std::uint32_t total = u32(head.data() + 4);
        if (total < 12 || total % 4 != 0 || total > kMaxRecordBytes) {
            warn_truncated("invalid block length " + std::to_string(total));
            return std::nullopt;
        }
        std::vector<std::uint8_t> body(total - 12);
        std::array<std::uint8_t, 4> trailer{};
        if (!read_exact(body.data(), body.size()) || !read_exact(trailer.data(), trailer.size())) {
            warn_truncated("truncated block");
            return std::nullopt;
        }

        if (type == kPcapNgInterfaceBlock) {
            parse_interface_block(body);
            continue;
        }
        if (type != kPcapNgEnhancedPacket)
            continue;

        if (body.size() < 20) {
            warn_truncated("short enhanced packet block");
            return std::nullopt;
        }
        const std::uint32_t iface_id = u32(body.data());
        const std::uint64_t ts = std::uint64_t(u32(body.data() + 4)) << 32 | u32(body.data() + 8);
        const std::uint32_t caplen = u32(body.data() + 12);
        const std::uint32_t origlen = u32(body.data() + 16);
        if (caplen > body.size() - 20) {
            warn_truncated("enhanced packet data exceeds block");
            return std::nullopt;
        }
        if (iface_id >= interfaces_.size()) {
            warnings_.push_back(path_.string() + ": packet references unknown interface " +
                                std::to_string(iface_id) + ", skipped");
            continue;
        }

        const Interface& iface = interfaces_[iface_id];
        RawRecord rec;
        rec.interface_id = iface_id;
        rec.link_type = iface.link_type;
        rec.original_length = origlen;
        rec.timestamp.micros = units_to_micros(ts, iface.ts_resolution) +
                               iface.ts_offset_seconds * 1'000'000;
        rec.data.assign(body.begin() + 20, body.begin() + 20 + caplen);
        return rec;
    }
}

std::vector<RawRecord> read_all(const std::filesystem::path& path, std::vector<std::string>* warnings)
{
    CaptureReader reader(path);
    std::vector<RawRecord> out;
    while (auto rec = reader.next())
        out.push_back(std::move(*rec));
    if (warnings)
        *warnings = reader.warnings();
    return out;
}

} // namespace netfeat::capture
