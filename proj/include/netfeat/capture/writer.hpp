#pragma once

#include "netfeat/capture/packet.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>

namespace netfeat::capture {

struct PcapWriterOptions {
    LinkType link_type = LinkType::Ethernet;
    bool nanosecond = false;
    bool big_endian = false;
    std::uint32_t snaplen = 262144;
};

/// Writes classic libpcap files.
class PcapWriter {
public:
    PcapWriter(const std::filesystem::path& path, PcapWriterOptions options = {});

    void write(Timestamp ts, std::span<const std::uint8_t> frame);
    void write(Timestamp ts, std::span<const std::uint8_t> frame, std::uint32_t original_length);
    void flush() { out_.flush(); }

private:
    void put32(std::uint32_t v);
    void put16(std::uint16_t v);

    std::ofstream out_;
    PcapWriterOptions options_;
};

/// Writes a single-section PCAPNG file with one interface.
class PcapNgWriter {
public:
    /// `ts_resolution` is the raw if_tsresol byte (6 = microseconds, 9 = nanoseconds).
    PcapNgWriter(const std::filesystem::path& path, LinkType link_type, std::uint8_t ts_resolution = 6);

    void write(Timestamp ts, std::span<const std::uint8_t> frame);
    /// Emits an arbitrary block; used to check that unknown blocks are skipped.
    void write_raw_block(std::uint32_t type, std::span<const std::uint8_t> body);
    void flush() { out_.flush(); }

private:
    void put32(std::uint32_t v);
    void put16(std::uint16_t v);

    std::ofstream out_;
    std::uint8_t ts_resolution_;
};

} // namespace netfeat::capture
