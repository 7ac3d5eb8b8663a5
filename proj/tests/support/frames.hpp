#pragma once

#include "netfeat/capture/packet.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace netfeat::testing {

using Bytes = std::vector<std::uint8_t>;

Bytes bytes_of(std::string_view text);

// Hand-rolled header builders. Lengths are filled in; checksums are left 0.
Bytes tcp_segment(std::uint16_t sport, std::uint16_t dport, std::uint32_t seq, std::uint32_t ack, std::uint8_t flags,
                  std::uint16_t window, const Bytes& payload);
Bytes udp_datagram(std::uint16_t sport, std::uint16_t dport, const Bytes& payload);
Bytes ipv4_packet(const std::string& src, const std::string& dst, std::uint8_t protocol, const Bytes& l4,
                  std::uint16_t frag_field = 0);
Bytes ipv6_packet(const std::string& src, const std::string& dst, std::uint8_t next_header, const Bytes& l4);
Bytes ethernet_frame(std::uint16_t ethertype, const Bytes& payload);

/// One synthetic packet; the address family follows the address text.
struct PacketSpec {
    double time = 0.0; // seconds since epoch
    std::string src = "10.0.0.1";
    std::string dst = "10.0.0.2";
    std::uint16_t sport = 1000;
    std::uint16_t dport = 80;
    std::uint8_t protocol = capture::ip_proto::tcp;
    std::uint8_t flags = capture::tcp_flag::ack;
    std::uint32_t seq = 0;
    std::uint16_t window = 1024;
    Bytes payload;
};

capture::Timestamp ts_of(double seconds);

/// Ethernet + IP + transport frame of a spec.
Bytes frame_of(const PacketSpec& spec);
/// The spec decoded through decode_packet; aborts the test on a Skip.
capture::DecodedPacket decoded_of(const PacketSpec& spec);

void write_pcap(const std::filesystem::path& path, const std::vector<PacketSpec>& packets);

/// Unique empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view text);

} // namespace netfeat::testing
