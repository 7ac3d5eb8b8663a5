#include "netfeat/capture/decoder.hpp"

#include <algorithm>

namespace netfeat::capture {

namespace {

constexpr std::uint16_t kEtherIpv4 = 0x0800;
constexpr std::uint16_t kEtherIpv6 = 0x86dd;
constexpr std::uint16_t kEtherVlan = 0x8100;
constexpr std::uint16_t kEtherQinQ = 0x88a8;
constexpr std::uint16_t kEtherVlanLegacy = 0x9100;

std::uint16_t be16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] << 8 | p[1]); }
std::uint32_t be32(const std::uint8_t* p)
{
    return std::uint32_t(p[0]) << 24 | std::uint32_t(p[1]) << 16 | std::uint32_t(p[2]) << 8 | p[3];
}

struct Network {
    std::span<const std::uint8_t> bytes;
    std::uint16_t ethertype = 0; // 0 = infer from the IP version nibble
};

DecodeResult skip(SkipReason reason) { return Skip{reason}; }

// Strips the link layer, returning the network-layer bytes or a skip reason.
std::variant<Network, Skip> strip_link(std::span<const std::uint8_t> raw, LinkType link)
{
    switch (link) {
    case LinkType::Ethernet: {
        if (raw.size() < 14)
            return Skip{SkipReason::Malformed};
        std::size_t off = 12;
        std::uint16_t type = be16(raw.data() + off);
        off += 2;
        while (type == kEtherVlan || type == kEtherQinQ || type == kEtherVlanLegacy) {
            if (raw.size() < off + 4)
                return Skip{SkipReason::Malformed};
            type = be16(raw.data() + off + 2);
            off += 4;
        }
        if (type != kEtherIpv4 && type != kEtherIpv6)
            return Skip{SkipReason::NonIp};
        return Network{raw.subspan(off), type};
    }
    case LinkType::Raw:
        return Network{raw, 0};
    case LinkType::Ipv4:
        return Network{raw, kEtherIpv4};
    case LinkType::Ipv6:
        return Network{raw, kEtherIpv6};
    case LinkType::LinuxSll: {
        if (raw.size() < 16)
            return Skip{SkipReason::Malformed};
        const std::uint16_t type = be16(raw.data() + 14);
        if (type != kEtherIpv4 && type != kEtherIpv6)
            return Skip{SkipReason::NonIp};
        return Network{raw.subspan(16), type};
    }
    case LinkType::LinuxSll2: {
        if (raw.size() < 20)
            return Skip{SkipReason::Malformed};
        const std::uint16_t type = be16(raw.data());
        if (type != kEtherIpv4 && type != kEtherIpv6)
            return Skip{SkipReason::NonIp};
        return Network{raw.subspan(20), type};
    }
    }
    return Skip{SkipReason::UnsupportedLink};
}

bool is_ipv6_extension(std::uint8_t next)
{
    return next == 0 || next == 43 || next == 44 || next == 51 || next == 60;
}

} // namespace

std::string_view to_string(SkipReason reason)
{
    switch (reason) {
    case SkipReason::UnsupportedLink:
        return "unsupported-link";
    case SkipReason::NonIp:
        return "non-ip";
    case SkipReason::Fragment:
        return "fragment";
    case SkipReason::Malformed:
        return "malformed";
    }
    return "unknown";
}

std::string_view to_string(LinkType link)
{
    switch (link) {
    case LinkType::Ethernet:
        return "ethernet";
    case LinkType::Raw:
        return "raw";
    case LinkType::LinuxSll:
        return "linux-sll";
    case LinkType::Ipv4:
        return "ipv4";
    case LinkType::Ipv6:
        return "ipv6";
    case LinkType::LinuxSll2:
        return "linux-sll2";
    }
    return "unsupported";
}

DecodeResult decode_packet(std::span<const std::uint8_t> raw, LinkType link_type, Timestamp timestamp)
{
    auto stripped = strip_link(raw, link_type);
    if (auto* s = std::get_if<Skip>(&stripped))
        return *s;
    const Network net = std::get<Network>(stripped);
    const std::span<const std::uint8_t> ip = net.bytes;
    if (ip.empty())
        return skip(SkipReason::Malformed);

    const std::uint8_t version = ip[0] >> 4;
    if ((net.ethertype == kEtherIpv4 && version != 4) || (net.ethertype == kEtherIpv6 && version != 6))
        return skip(SkipReason::Malformed);

    DecodedPacket pkt;
    pkt.timestamp = timestamp;
    pkt.link_type = link_type;
    pkt.ip_version = version;

    std::size_t header_len = 0;
    std::size_t total_len = 0;
    std::uint8_t proto = 0;

    if (version == 4) {
        if (ip.size() < 20)
            return skip(SkipReason::Malformed);
        header_len = std::size_t(ip[0] & 0x0f) * 4;
        total_len = be16(ip.data() + 2);
        if (header_len < 20 || header_len > ip.size() || total_len < header_len)
            return skip(SkipReason::Malformed);
        const std::uint16_t frag_offset = be16(ip.data() + 6) & 0x1fff;
        if (frag_offset != 0)
            return skip(SkipReason::Fragment);
        proto = ip[9];
        pkt.src_ip = IpAddress::v4(std::span<const std::uint8_t, 4>(ip.data() + 12, 4));
        pkt.dst_ip = IpAddress::v4(std::span<const std::uint8_t, 4>(ip.data() + 16, 4));
    } else if (version == 6) {
        if (ip.size() < 40)
            return skip(SkipReason::Malformed);
        total_len = 40 + std::size_t(be16(ip.data() + 4));
        pkt.src_ip = IpAddress::v6(std::span<const std::uint8_t, 16>(ip.data() + 8, 16));
        pkt.dst_ip = IpAddress::v6(std::span<const std::uint8_t, 16>(ip.data() + 24, 16));
        proto = ip[6];
        header_len = 40;
        while (is_ipv6_extension(proto)) {
            if (header_len + 8 > ip.size() || header_len + 8 > total_len)
                return skip(SkipReason::Malformed);
            const std::uint8_t* ext = ip.data() + header_len;
            std::size_t ext_len = 0;
            if (proto == 44) {
                if ((be16(ext + 2) >> 3) != 0)
                    return skip(SkipReason::Fragment);
                ext_len = 8;
            } else if (proto == 51) {
                ext_len = (std::size_t(ext[1]) + 2) * 4;
            } else {
                ext_len = (std::size_t(ext[1]) + 1) * 8;
            }
            proto = ext[0];
            header_len += ext_len;
        }
        if (header_len > ip.size() || header_len > total_len)
            return skip(SkipReason::Malformed);
    } else {
        return skip(SkipReason::NonIp);
    }

    pkt.ip_protocol = proto;
    pkt.ip_total_length = static_cast<std::uint32_t>(total_len);
    pkt.ip_header_length = static_cast<std::uint32_t>(header_len);

    // Ethernet padding lies past total_len; snaplen cuts lie before it.
    const std::size_t available = std::min(total_len, ip.size());
    std::span<const std::uint8_t> transport = ip.subspan(header_len, available - header_len);

    if (proto == ip_proto::tcp) {
        if (transport.size() < 20)
            return skip(SkipReason::Malformed);
        const std::size_t data_offset = std::size_t(transport[12] >> 4) * 4;
        if (data_offset < 20 || data_offset > transport.size())
            return skip(SkipReason::Malformed);
        pkt.src_port = be16(transport.data());
        pkt.dst_port = be16(transport.data() + 2);
        pkt.tcp_seq = be32(transport.data() + 4);
        pkt.tcp_flags = static_cast<std::uint8_t>(transport[13] & 0x3f);
        pkt.tcp_window = be16(transport.data() + 14);
        pkt.transport_header_length = static_cast<std::uint32_t>(data_offset);
        transport = transport.subspan(data_offset);
    } else if (proto == ip_proto::udp) {
        if (transport.size() < 8)
            return skip(SkipReason::Malformed);
        pkt.src_port = be16(transport.data());
        pkt.dst_port = be16(transport.data() + 2);
        pkt.transport_header_length = 8;
        transport = transport.subspan(8);
    }

    pkt.payload.assign(transport.begin(), transport.end());
    return pkt;
}

} // namespace netfeat::capture
