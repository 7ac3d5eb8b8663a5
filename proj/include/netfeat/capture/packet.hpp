#pragma once

#include "netfeat/capture/ip_address.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace netfeat::capture {

/// Capture timestamp, microseconds since the Unix epoch.
struct Timestamp {
    std::int64_t micros = 0;

    static constexpr Timestamp from_seconds(std::int64_t sec, std::int64_t usec = 0)
    {
        return Timestamp{sec * 1'000'000 + usec};
    }
    double seconds() const { return static_cast<double>(micros) / 1e6; }

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// Link-layer header types, numbered as in the tcpdump LINKTYPE registry.
enum class LinkType : std::uint32_t {
    Ethernet = 1,
    Raw = 101,
    LinuxSll = 113,
    Ipv4 = 228,
    Ipv6 = 229,
    LinuxSll2 = 276,
};

std::string_view to_string(LinkType link);

namespace ip_proto {
inline constexpr std::uint8_t icmp = 1;
inline constexpr std::uint8_t igmp = 2;
inline constexpr std::uint8_t tcp = 6;
inline constexpr std::uint8_t udp = 17;
inline constexpr std::uint8_t icmpv6 = 58;
} // namespace ip_proto

namespace tcp_flag {
inline constexpr std::uint8_t fin = 0x01;
inline constexpr std::uint8_t syn = 0x02;
inline constexpr std::uint8_t rst = 0x04;
inline constexpr std::uint8_t psh = 0x08;
inline constexpr std::uint8_t ack = 0x10;
inline constexpr std::uint8_t urg = 0x20;
} // namespace tcp_flag

struct DecodedPacket {
    Timestamp timestamp;
    LinkType link_type = LinkType::Ethernet;
    std::uint8_t ip_version = 4;
    IpAddress src_ip;
    IpAddress dst_ip;
    std::uint8_t ip_protocol = 0;
    /// Total IP datagram length as declared by the header (IPv6: 40 + payload length).
    std::uint32_t ip_total_length = 0;
    std::uint32_t ip_header_length = 0;
    std::uint32_t transport_header_length = 0;
    std::optional<std::uint16_t> src_port;
    std::optional<std::uint16_t> dst_port;
    std::optional<std::uint8_t> tcp_flags;
    std::optional<std::uint16_t> tcp_window;
    std::optional<std::uint32_t> tcp_seq;
    /// Bytes after the transport header. For portless protocols, everything after the IP header.
    std::vector<std::uint8_t> payload;

    bool has_flag(std::uint8_t flag) const { return tcp_flags && (*tcp_flags & flag) != 0; }
};

} // namespace netfeat::capture
