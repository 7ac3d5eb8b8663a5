#pragma once

#include "netfeat/capture/packet.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace netfeat::capture {

class CaptureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class CaptureFormat { Pcap, PcapNg };

/// One captured frame as stored in the file, before any protocol decoding.
struct RawRecord {
    Timestamp timestamp;
    LinkType link_type = LinkType::Ethernet;
    std::uint32_t interface_id = 0;
    std::uint32_t original_length = 0;
    std::vector<std::uint8_t> data;
};

/// Sequential reader over a PCAP or PCAPNG file.
///
/// Records are yielded in file order. A record cut short by end-of-file ends
/// the stream and leaves a warning; everything read before it is still valid.
/// PCAPNG timestamps are normalised to microseconds using each interface's
/// if_tsresol/if_tsoffset options; nanosecond PCAP timestamps are truncated.
class CaptureReader {
public:
    /// Throws CaptureError when the file cannot be opened or has no known magic.
    explicit CaptureReader(const std::filesystem::path& path);

    std::optional<RawRecord> next();

    CaptureFormat format() const { return format_; }
    /// Link type of each interface seen so far (PCAP files have exactly one).
    const std::vector<LinkType>& link_types() const { return link_types_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    bool truncated() const { return truncated_; }

private:
    struct Interface {
        LinkType link_type = LinkType::Ethernet;
        std::uint8_t ts_resolution = 6;
        std::int64_t ts_offset_seconds = 0;
    };

    bool read_exact(void* dst, std::size_t n);
    std::uint32_t u32(const std::uint8_t* p) const;
    std::uint16_t u16(const std::uint8_t* p) const;
    void warn_truncated(const std::string& what);

    std::optional<RawRecord> next_pcap();
    std::optional<RawRecord> next_pcapng();
    bool read_section_header();
    void parse_interface_block(const std::vector<std::uint8_t>& body);

    std::filesystem::path path_;
    std::ifstream in_;
    CaptureFormat format_ = CaptureFormat::Pcap;
    bool swapped_ = false;
    bool nanosecond_ = false;
    bool done_ = false;
    bool truncated_ = false;
    std::uint64_t record_index_ = 0;
    std::vector<Interface> interfaces_;
    std::vector<LinkType> link_types_;
    std::vector<std::string> warnings_;
};

/// Reads an entire capture into memory. Convenience for tests and small files.
std::vector<RawRecord> read_all(const std::filesystem::path& path,
                                std::vector<std::string>* warnings = nullptr);

} // namespace netfeat::capture
