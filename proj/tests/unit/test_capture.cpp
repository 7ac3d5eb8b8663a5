#include "frames.hpp"

#include "netfeat/capture/decoder.hpp"
#include "netfeat/capture/ip_address.hpp"
#include "netfeat/capture/reader.hpp"
#include "netfeat/capture/writer.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>

using namespace netfeat::capture;
using namespace netfeat::testing;
namespace fs = std::filesystem;

namespace {

DecodedPacket as_packet(DecodeResult r)
{
    EXPECT_TRUE(std::holds_alternative<DecodedPacket>(r));
    return std::get<DecodedPacket>(std::move(r));
}

SkipReason as_skip(const DecodeResult& r)
{
    EXPECT_TRUE(std::holds_alternative<Skip>(r));
    return std::get<Skip>(r).reason;
}

std::vector<PacketSpec> three_udp()
{
    std::vector<PacketSpec> out;
    for (int i = 0; i < 3; ++i) {
        PacketSpec s;
        s.time = 1'500'000'000.0 + i * 0.25;
        s.protocol = ip_proto::udp;
        s.sport = static_cast<std::uint16_t>(5000 + i);
        s.dport = 53;
        s.payload = bytes_of("packet-" + std::to_string(i));
        out.push_back(s);
    }
    return out;
}

} // namespace

TEST(IpAddress, ParseAndFormatRoundTrip)
{
    for (const char* text : {"131.202.240.87", "0.0.0.0", "255.255.255.255", "2001:db8::1", "::"}) {
        const auto a = IpAddress::parse(text);
        ASSERT_TRUE(a) << text;
        EXPECT_EQ(a->to_string(), text);
    }
    EXPECT_FALSE(IpAddress::parse("300.1.1.1"));
    EXPECT_FALSE(IpAddress::parse("not-an-ip"));
}

TEST(IpAddress, IntegerValueIsBigEndian)
{
    EXPECT_EQ(IpAddress::parse("1.2.3.4")->to_integer(), static_cast<unsigned __int128>(0x01020304));
    EXPECT_EQ(IpAddress::v4(0x0a000001u).to_string(), "10.0.0.1");
    const auto v6 = IpAddress::parse("::1");
    EXPECT_EQ(v6->to_integer(), static_cast<unsigned __int128>(1));
}

TEST(Decoder, EthernetIpv4TcpSynWithoutPayload)
{
    // Hand-assembled: 14 B Ethernet, 20 B IPv4 (total 40), 20 B TCP with SYN.
    const Bytes frame = {
        0x00, 0x11, 0x22, 0x33, 0x44, 0x55, 0x66, 0x77, 0x88, 0x99, 0xaa, 0xbb, 0x08, 0x00, // eth
        0x45, 0x00, 0x00, 0x28, 0x00, 0x01, 0x40, 0x00, 0x40, 0x06, 0x00, 0x00,             // ip
        0x0a, 0x00, 0x00, 0x01, 0x0a, 0x00, 0x00, 0x02,                                     // addrs
        0x30, 0x39, 0x01, 0xbb, 0x00, 0x00, 0x00, 0x64, 0x00, 0x00, 0x00, 0x00,             // tcp
        0x50, 0x02, 0x72, 0x10, 0x00, 0x00, 0x00, 0x00};
    const auto r = decode_packet(frame, LinkType::Ethernet, Timestamp{42});
    const DecodedPacket p = as_packet(r);
    EXPECT_EQ(p.ip_protocol, ip_proto::tcp);
    EXPECT_EQ(p.ip_version, 4);
    EXPECT_EQ(p.src_ip.to_string(), "10.0.0.1");
    EXPECT_EQ(p.dst_ip.to_string(), "10.0.0.2");
    EXPECT_EQ(p.src_port, 12345);
    EXPECT_EQ(p.dst_port, 443);
    EXPECT_EQ(p.tcp_seq, 100u);
    EXPECT_EQ(p.tcp_window, 0x7210);
    EXPECT_TRUE(p.has_flag(tcp_flag::syn));
    EXPECT_FALSE(p.has_flag(tcp_flag::ack));
    EXPECT_TRUE(p.payload.empty());
    EXPECT_EQ(p.ip_total_length, 40u);
    EXPECT_EQ(p.timestamp.micros, 42);
}

TEST(Decoder, Ipv4UdpPayloadBytes)
{
    const Bytes frame = {
        0x00, 0x11, 0x22, 0x33, 0x44, 0x55, 0x66, 0x77, 0x88, 0x99, 0xaa, 0xbb, 0x08, 0x00,
        0x45, 0x00, 0x00, 0x24, 0x00, 0x00, 0x00, 0x00, 0x40, 0x11, 0x00, 0x00,
        0xc0, 0xa8, 0x01, 0x01, 0xc0, 0xa8, 0x01, 0x02,
        0x13, 0x88, 0x00, 0x35, 0x00, 0x10, 0x00, 0x00,
        'a', 'b', 'c', 'd', 'e', 'f', 'g', 'h'};
    const DecodedPacket p = as_packet(decode_packet(frame, LinkType::Ethernet, {}));
    EXPECT_EQ(p.payload, bytes_of("abcdefgh"));
    EXPECT_EQ(p.src_port, 5000);
    EXPECT_EQ(p.dst_port, 53);
    EXPECT_FALSE(p.tcp_flags);
}

TEST(Decoder, ArpIsNonIp)
{
    Bytes frame = ethernet_frame(0x0806, Bytes(28, 0));
    EXPECT_EQ(as_skip(decode_packet(frame, LinkType::Ethernet, {})), SkipReason::NonIp);
}

TEST(Decoder, VlanTagsAreSkippedOver)
{
    const Bytes ip = ipv4_packet("10.1.1.1", "10.1.1.2", ip_proto::udp, udp_datagram(1, 2, bytes_of("x")));
    Bytes inner = {0x00, 0x05, 0x08, 0x00}; // TCI, then IPv4
    inner.insert(inner.end(), ip.begin(), ip.end());
    Bytes outer = {0x00, 0x07, 0x81, 0x00}; // QinQ: outer tag wraps an 802.1Q tag
    outer.insert(outer.end(), inner.begin(), inner.end());
    const Bytes frame = ethernet_frame(0x88a8, outer);
    const DecodedPacket p = as_packet(decode_packet(frame, LinkType::Ethernet, {}));
    EXPECT_EQ(p.src_ip.to_string(), "10.1.1.1");
    EXPECT_EQ(p.payload, bytes_of("x"));
}

TEST(Decoder, EthernetPaddingIsNotPayload)
{
    Bytes frame = frame_of({.protocol = ip_proto::tcp, .payload = {}});
    frame.resize(60, 0xee); // minimum Ethernet frame size
    const DecodedPacket p = as_packet(decode_packet(frame, LinkType::Ethernet, {}));
    EXPECT_TRUE(p.payload.empty());
}

TEST(Decoder, RawAndCookedLinkTypes)
{
    const Bytes ip = ipv4_packet("1.1.1.1", "2.2.2.2", ip_proto::udp, udp_datagram(7, 8, bytes_of("hi")));
    for (LinkType lt : {LinkType::Raw, LinkType::Ipv4}) {
        const DecodedPacket p = as_packet(decode_packet(ip, lt, {}));
        EXPECT_EQ(p.payload, bytes_of("hi"));
    }

    Bytes sll(16, 0);
    sll[14] = 0x08;
    sll.insert(sll.end(), ip.begin(), ip.end());
    EXPECT_EQ(as_packet(decode_packet(sll, LinkType::LinuxSll, {})).payload, bytes_of("hi"));

    Bytes sll2(20, 0);
    sll2[0] = 0x08;
    sll2.insert(sll2.end(), ip.begin(), ip.end());
    EXPECT_EQ(as_packet(decode_packet(sll2, LinkType::LinuxSll2, {})).payload, bytes_of("hi"));

    const Bytes ip6 = ipv6_packet("2001:db8::1", "2001:db8::2", ip_proto::udp, udp_datagram(7, 8, bytes_of("v6")));
    EXPECT_EQ(as_packet(decode_packet(ip6, LinkType::Ipv6, {})).payload, bytes_of("v6"));
    EXPECT_EQ(as_packet(decode_packet(ip6, LinkType::Raw, {})).ip_version, 6);

    EXPECT_EQ(as_skip(decode_packet(ip, static_cast<LinkType>(105), {})), SkipReason::UnsupportedLink);
}

TEST(Decoder, Ipv6ExtensionHeadersAreWalked)
{
    Bytes l4 = udp_datagram(53, 5353, bytes_of("ext"));
    Bytes hop = {ip_proto::udp, 0, 0, 0, 0, 0, 0, 0}; // hop-by-hop, 8 bytes
    hop.insert(hop.end(), l4.begin(), l4.end());
    const Bytes frame = ethernet_frame(0x86dd, ipv6_packet("fe80::1", "fe80::2", 0, hop));
    const DecodedPacket p = as_packet(decode_packet(frame, LinkType::Ethernet, {}));
    EXPECT_EQ(p.ip_protocol, ip_proto::udp);
    EXPECT_EQ(p.ip_header_length, 48u);
    EXPECT_EQ(p.payload, bytes_of("ext"));
}

TEST(Decoder, NonFirstFragmentsAreSkipped)
{
    const Bytes l4 = udp_datagram(1, 2, bytes_of("frag"));
    const Bytes first = ethernet_frame(0x0800, ipv4_packet("1.1.1.1", "2.2.2.2", ip_proto::udp, l4, 0x2000));
    EXPECT_TRUE(std::holds_alternative<DecodedPacket>(decode_packet(first, LinkType::Ethernet, {})));
    const Bytes later = ethernet_frame(0x0800, ipv4_packet("1.1.1.1", "2.2.2.2", ip_proto::udp, l4, 0x0010));
    EXPECT_EQ(as_skip(decode_packet(later, LinkType::Ethernet, {})), SkipReason::Fragment);

    Bytes frag_hdr = {ip_proto::udp, 0, 0x00, 0x08, 0, 0, 0, 1}; // offset 1
    frag_hdr.insert(frag_hdr.end(), l4.begin(), l4.end());
    const Bytes v6 = ethernet_frame(0x86dd, ipv6_packet("::1", "::2", 44, frag_hdr));
    EXPECT_EQ(as_skip(decode_packet(v6, LinkType::Ethernet, {})), SkipReason::Fragment);
}

TEST(Decoder, MalformedLengthsAreSkipped)
{
    Bytes frame = frame_of({.payload = bytes_of("data")});
    frame[14] = 0x44; // IHL 16 bytes
    EXPECT_EQ(as_skip(decode_packet(frame, LinkType::Ethernet, {})), SkipReason::Malformed);

    frame = frame_of({.payload = bytes_of("data")});
    frame[14 + 20 + 12] = 0x20; // TCP data offset 8 bytes
    EXPECT_EQ(as_skip(decode_packet(frame, LinkType::Ethernet, {})), SkipReason::Malformed);

    EXPECT_EQ(as_skip(decode_packet(Bytes{0x00, 0x01}, LinkType::Ethernet, {})), SkipReason::Malformed);
}

TEST(Decoder, PayloadLengthLaw)
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        PacketSpec s;
        s.protocol = i % 2 ? ip_proto::tcp : ip_proto::udp;
        s.src = i % 3 ? "10.0.0.1" : "2001:db8::1";
        s.dst = i % 3 ? "10.0.0.2" : "2001:db8::2";
        s.payload.resize(rng() % 1400);
        const DecodedPacket p = decoded_of(s);
        EXPECT_EQ(p.payload.size(), p.ip_total_length - p.ip_header_length - p.transport_header_length);
    }
}

TEST(Decoder, TotalOnArbitraryBytes)
{
    std::mt19937_64 rng(99);
    for (int i = 0; i < 20000; ++i) {
        Bytes junk(rng() % 120);
        for (auto& b : junk)
            b = static_cast<std::uint8_t>(rng());
        if (!junk.empty() && i % 2)
            junk[0] = 0x45;
        for (LinkType lt : {LinkType::Ethernet, LinkType::Raw, LinkType::LinuxSll, LinkType::LinuxSll2})
            (void)decode_packet(junk, lt, {});
    }
    SUCCEED();
}

TEST(Reader, EmptyCaptureYieldsNothing)
{
    TempDir dir;
    { PcapWriter w(dir / "empty.pcap"); }
    CaptureReader r(dir / "empty.pcap");
    EXPECT_FALSE(r.next());
    EXPECT_FALSE(r.truncated());
    EXPECT_EQ(r.link_types(), std::vector<LinkType>{LinkType::Ethernet});
}

TEST(Reader, ThreeUdpPacketsInWriteOrder)
{
    TempDir dir;
    const auto specs = three_udp();
    write_pcap(dir / "udp.pcap", specs);
    const auto records = read_all(dir / "udp.pcap");
    ASSERT_EQ(records.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(records[i].timestamp, ts_of(specs[i].time));
        const DecodedPacket p = as_packet(decode_packet(records[i].data, records[i].link_type, records[i].timestamp));
        EXPECT_EQ(p.payload, specs[i].payload);
    }
}

TEST(Reader, PcapByteOrdersAndResolutions)
{
    TempDir dir;
    const auto specs = three_udp();
    for (bool big : {false, true}) {
        for (bool nano : {false, true}) {
            const fs::path path = dir / ("v" + std::to_string(big) + std::to_string(nano) + ".pcap");
            {
                PcapWriter w(path, {.link_type = LinkType::Ethernet, .nanosecond = nano, .big_endian = big});
                for (const auto& s : specs)
                    w.write(ts_of(s.time), frame_of(s));
            }
            const auto records = read_all(path);
            ASSERT_EQ(records.size(), 3u);
            for (std::size_t i = 0; i < 3; ++i) {
                EXPECT_EQ(records[i].timestamp, ts_of(specs[i].time)) << big << nano;
                EXPECT_EQ(records[i].data, frame_of(specs[i]));
            }
        }
    }
}

TEST(Reader, TruncatedThirdRecordKeepsFirstTwo)
{
    TempDir dir;
    write_pcap(dir / "full.pcap", three_udp());
    std::string bytes = read_file(dir / "full.pcap");
    bytes.resize(bytes.size() - 5);
    write_file(dir / "cut.pcap", bytes);

    std::vector<std::string> warnings;
    const auto records = read_all(dir / "cut.pcap", &warnings);
    EXPECT_EQ(records.size(), 2u);
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find("truncated"), std::string::npos);
}

TEST(Reader, UnknownMagicAndMissingFileThrow)
{
    TempDir dir;
    write_file(dir / "junk.pcap", "this is not a capture file");
    EXPECT_THROW(CaptureReader(dir / "junk.pcap"), CaptureError);
    EXPECT_THROW(CaptureReader(dir / "missing.pcap"), CaptureError);
}

TEST(Reader, PcapNgNanosecondResolutionAndUnknownBlocks)
{
    TempDir dir;
    const auto specs = three_udp();
    {
        PcapNgWriter w(dir / "a.pcapng", LinkType::Ethernet, 9);
        w.write_raw_block(0x0000000b, Bytes(12, 0xab)); // not a block type we read
        for (const auto& s : specs)
            w.write(ts_of(s.time), frame_of(s));
    }
    CaptureReader r(dir / "a.pcapng");
    EXPECT_EQ(r.format(), CaptureFormat::PcapNg);
    for (const auto& s : specs) {
        const auto rec = r.next();
        ASSERT_TRUE(rec);
        EXPECT_EQ(rec->timestamp, ts_of(s.time));
        EXPECT_EQ(rec->data, frame_of(s));
    }
    EXPECT_FALSE(r.next());
    EXPECT_FALSE(r.truncated());
}

TEST(Reader, PcapNgMicrosecondDefault)
{
    TempDir dir;
    const auto specs = three_udp();
    {
        PcapNgWriter w(dir / "b.pcapng", LinkType::Raw, 6);
        for (const auto& s : specs)
            w.write(ts_of(s.time), ipv4_packet(s.src, s.dst, ip_proto::udp, udp_datagram(s.sport, s.dport, s.payload)));
    }
    const auto records = read_all(dir / "b.pcapng");
    ASSERT_EQ(records.size(), 3u);
    EXPECT_EQ(records[1].timestamp, ts_of(specs[1].time));
    EXPECT_EQ(records[1].link_type, LinkType::Raw);
}

TEST(Reader, RoundTripManyPackets)
{
    TempDir dir;
    std::mt19937_64 rng(3);
    std::vector<PacketSpec> specs;
    for (int i = 0; i < 500; ++i) {
        PacketSpec s;
        s.time = 1e9 + i * 0.001 + static_cast<double>(rng() % 1000) * 1e-6;
        s.payload.resize(rng() % 300);
        for (auto& b : s.payload)
            b = static_cast<std::uint8_t>(rng());
        specs.push_back(s);
    }
    write_pcap(dir / "many.pcap", specs);
    const auto records = read_all(dir / "many.pcap");
    ASSERT_EQ(records.size(), specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        EXPECT_EQ(records[i].timestamp, ts_of(specs[i].time));
        EXPECT_EQ(as_packet(decode_packet(records[i].data, records[i].link_type, {})).payload, specs[i].payload);
    }
}
