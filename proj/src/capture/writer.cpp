#include "netfeat/capture/writer.hpp"

#include "netfeat/capture/reader.hpp"

#include <vector>

namespace netfeat::capture {

PcapWriter::PcapWriter(const std::filesystem::path& path, PcapWriterOptions options)
    : out_(path, std::ios::binary | std::ios::trunc), options_(options)
{
    if (!out_)
        throw CaptureError("cannot create capture file: " + path.string());
    put32(options_.nanosecond ? 0xa1b23c4d : 0xa1b2c3d4);
    put16(2);
    put16(4);
    put32(0);
    put32(0);
    put32(options_.snaplen);
    put32(static_cast<std::uint32_t>(options_.link_type));
}

void PcapWriter::put32(std::uint32_t v)
{
    const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                       static_cast<char>(v >> 24)};
    if (options_.big_endian) {
        const char r[4] = {b[3], b[2], b[1], b[0]};
        out_.write(r, 4);
    } else {
        out_.write(b, 4);
    }
}

void PcapWriter::put16(std::uint16_t v)
{
    const char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
    if (options_.big_endian) {
        const char r[2] = {b[1], b[0]};
        out_.write(r, 2);
    } else {
        out_.write(b, 2);
    }
}

void PcapWriter::write(Timestamp ts, std::span<const std::uint8_t> frame)
{
    write(ts, frame, static_cast<std::uint32_t>(frame.size()));
}

void PcapWriter::write(Timestamp ts, std::span<const std::uint8_t> frame, std::uint32_t original_length)
{
    const std::int64_t sec = ts.micros / 1'000'000;
    const std::int64_t usec = ts.micros % 1'000'000;
    put32(static_cast<std::uint32_t>(sec));
    put32(static_cast<std::uint32_t>(options_.nanosecond ? usec * 1000 : usec));
    put32(static_cast<std::uint32_t>(frame.size()));
    put32(original_length);
    out_.write(reinterpret_cast<const char*>(frame.data()), static_cast<std::streamsize>(frame.size()));
}

PcapNgWriter::PcapNgWriter(const std::filesystem::path& path, LinkType link_type, std::uint8_t ts_resolution)
    : out_(path, std::ios::binary | std::ios::trunc), ts_resolution_(ts_resolution)
{
    if (!out_)
        throw CaptureError("cannot create capture file: " + path.string());

    // Section header block without options.
    put32(0x0a0d0d0a);
    put32(28);
    put32(0x1a2b3c4d);
    put16(1);
    put16(0);
    put32(0xffffffff);
    put32(0xffffffff);
    put32(28);

    // Interface description block with if_tsresol and opt_endofopt.
    const std::uint32_t idb_len = 20 + 8 + 4;
    put32(1);
    put32(idb_len);
    put16(static_cast<std::uint16_t>(link_type));
    put16(0);
    put32(262144);
    put16(9);
    put16(1);
    const char opt[4] = {static_cast<char>(ts_resolution_), 0, 0, 0};
    out_.write(opt, 4);
    put32(0);
    put32(idb_len);
}

void PcapNgWriter::put32(std::uint32_t v)
{
    const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                       static_cast<char>(v >> 24)};
    out_.write(b, 4);
}

void PcapNgWriter::put16(std::uint16_t v)
{
    const char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
    out_.write(b, 2);
}

void PcapNgWriter::write(Timestamp ts, std::span<const std::uint8_t> frame)
{
    std::uint64_t units = static_cast<std::uint64_t>(ts.micros);
    for (int i = 6; i < (ts_resolution_ & 0x7f); ++i)
        units *= 10;
    const std::uint32_t padded = (static_cast<std::uint32_t>(frame.size()) + 3u) & ~3u;
    const std::uint32_t total = 32 + padded;
    put32(6);
    put32(total);
    put32(0);
    put32(static_cast<std::uint32_t>(units >> 32));
    put32(static_cast<std::uint32_t>(units));
    put32(static_cast<std::uint32_t>(frame.size()));
    put32(static_cast<std::uint32_t>(frame.size()));
    out_.write(reinterpret_cast<const char*>(frame.data()), static_cast<std::streamsize>(frame.size()));
    const std::vector<char> pad(padded - frame.size(), 0);
    out_.write(pad.data(), static_cast<std::streamsize>(pad.size()));
    put32(total);
}

void PcapNgWriter::write_raw_block(std::uint32_t type, std::span<const std::uint8_t> body)
{
    const std::uint32_t padded = (static_cast<std::uint32_t>(body.size()) + 3u) & ~3u;
    const std::uint32_t total = 12 + padded;
    put32(type);
    put32(total);
    out_.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
    const std::vector<char> pad(padded - body.size(), 0);
    out_.write(pad.data(), static_cast<std::streamsize>(pad.size()));
    put32(total);
}

} // namespace netfeat::capture
