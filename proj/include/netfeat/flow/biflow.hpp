#pragma once

#include "netfeat/capture/packet.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace netfeat::flow {

using capture::IpAddress;
using capture::Timestamp;

/// Which canonical endpoint of a FlowKey a packet was sent from.
enum class Side : std::uint8_t { Lo, Hi };

/// Direction relative to the flow initiator. The numeric values are the
/// encoding used by the per-packet header features.
enum class Direction : std::int8_t { Forward = 1, Backward = -1 };

/// Direction-invariant 5-tuple: (ip_lo, port_lo) <= (ip_hi, port_hi).
struct FlowKey {
    IpAddress ip_lo;
    IpAddress ip_hi;
    std::uint16_t port_lo = 0;
    std::uint16_t port_hi = 0;
    std::uint8_t protocol = 0;

    friend auto operator<=>(const FlowKey&, const FlowKey&) = default;
    friend bool operator==(const FlowKey&, const FlowKey&) = default;
};

struct FlowKeyHash {
    std::size_t operator()(const FlowKey& key) const noexcept;
};

/// Canonical key of a packet plus the side it travels from. Portless
/// protocols use port 0 on both sides.
std::pair<FlowKey, Side> canonical_key(const capture::DecodedPacket& pkt);

struct PacketRecord {
    /// Seconds since the flow's first packet.
    double rel_time = 0.0;
    Direction direction = Direction::Forward;
    std::uint32_t ip_size = 0;
    std::uint32_t payload_size = 0;
    std::vector<std::uint8_t> payload;
    std::optional<std::uint16_t> tcp_window;
    std::optional<std::uint8_t> tcp_flags;
};

/// Observed TCP three-way handshake. Only the strict order
/// SYN (fwd) -> SYN+ACK (bwd) -> ACK (fwd) sets all three flags; any other
/// packet in between marks the handshake as broken.
struct TcpState {
    bool syn_fwd = false;
    bool synack_bwd = false;
    bool ack_fwd = false;
    bool broken = false;

    bool handshake_seen() const { return syn_fwd && synack_bwd && ack_fwd; }
};

/// Why a flow left the flow table.
enum class EndReason : std::uint8_t { IdleTimeout, ActiveTimeout, Closed, PacketCap, Evicted, Flushed };

std::string_view to_string(EndReason reason);

/// In-order TCP payload of one direction, up to the first gap.
struct ByteStream {
    struct Run {
        std::size_t offset = 0;
        double rel_time = 0.0;
    };

    std::vector<std::uint8_t> bytes;
    /// Arrival time of stream bytes, as runs starting at `offset` (ascending).
    std::vector<Run> times;

    /// Relative arrival time of the first packet carrying byte `offset`.
    double time_at(std::size_t offset) const;
};

struct BiFlow {
    FlowKey key;
    /// Canonical side of the endpoint that sent the first packet (FORWARD).
    Side initiator = Side::Lo;
    std::vector<PacketRecord> packets;
    Timestamp first_ts;
    Timestamp last_ts;
    TcpState tcp_state;
    std::string source_file;
    /// DNS messages in arrival order (UDP datagrams, or length-delimited TCP messages).
    std::vector<std::vector<std::uint8_t>> dns_payloads;
    ByteStream tls_stream_fwd;
    ByteStream tls_stream_bwd;
    EndReason end_reason = EndReason::Flushed;

    std::uint8_t protocol() const { return key.protocol; }
    const IpAddress& src_ip() const { return initiator == Side::Lo ? key.ip_lo : key.ip_hi; }
    const IpAddress& dst_ip() const { return initiator == Side::Lo ? key.ip_hi : key.ip_lo; }
    std::uint16_t src_port() const { return initiator == Side::Lo ? key.port_lo : key.port_hi; }
    std::uint16_t dst_port() const { return initiator == Side::Lo ? key.port_hi : key.port_lo; }

    std::size_t forward_count() const;
    std::size_t backward_count() const;
    /// Seconds between first and last packet; empty for single-packet flows.
    std::optional<double> duration() const;
    /// TCP flow whose three-way handshake was not fully observed.
    bool unopened_tcp() const;
};

} // namespace netfeat::flow
