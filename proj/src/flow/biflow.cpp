#include "netfeat/flow/biflow.hpp"

#include <algorithm>
#include <functional>
#include <tuple>

namespace netfeat::flow {

std::size_t FlowKeyHash::operator()(const FlowKey& key) const noexcept
{
    // FNV-1a over the key fields.
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::uint8_t b) {
        h ^= b;
        h *= 0x100000001b3ull;
    };
    for (auto b : key.ip_lo.bytes)
        mix(b);
    for (auto b : key.ip_hi.bytes)
        mix(b);
    mix(key.ip_lo.version);
    mix(static_cast<std::uint8_t>(key.port_lo));
    mix(static_cast<std::uint8_t>(key.port_lo >> 8));
    mix(static_cast<std::uint8_t>(key.port_hi));
    mix(static_cast<std::uint8_t>(key.port_hi >> 8));
    mix(key.protocol);
    return static_cast<std::size_t>(h);
}

std::pair<FlowKey, Side> canonical_key(const capture::DecodedPacket& pkt)
{
    const std::uint16_t sport = pkt.src_port.value_or(0);
    const std::uint16_t dport = pkt.dst_port.value_or(0);
    FlowKey key;
    key.protocol = pkt.ip_protocol;
    const bool src_is_lo = std::tie(pkt.src_ip, sport) <= std::tie(pkt.dst_ip, dport);
    if (src_is_lo) {
        key.ip_lo = pkt.src_ip;
        key.port_lo = sport;
        key.ip_hi = pkt.dst_ip;
        key.port_hi = dport;
        return {key, Side::Lo};
    }
    key.ip_lo = pkt.dst_ip;
    key.port_lo = dport;
    key.ip_hi = pkt.src_ip;
    key.port_hi = sport;
    return {key, Side::Hi};
}

std::string_view to_string(EndReason reason)
{
    switch (reason) {
    case EndReason::IdleTimeout:
        return "idle";
    case EndReason::ActiveTimeout:
        return "active";
    case EndReason::Closed:
        return "closed";
    case EndReason::PacketCap:
        return "packet-cap";
    case EndReason::Evicted:
        return "evicted";
    case EndReason::Flushed:
        return "flushed";
    }
    return "unknown";
}

double ByteStream::time_at(std::size_t offset) const
{
    auto it = std::upper_bound(times.begin(), times.end(), offset,
                               [](std::size_t off, const Run& run) { return off < run.offset; });
    if (it == times.begin())
        return times.empty() ? 0.0 : times.front().rel_time;
    return std::prev(it)->rel_time;
}

std::size_t BiFlow::forward_count() const
{
    return static_cast<std::size_t>(std::count_if(packets.begin(), packets.end(), [](const PacketRecord& p) {
        return p.direction == Direction::Forward;
    }));
}

std::size_t BiFlow::backward_count() const { return packets.size() - forward_count(); }

std::optional<double> BiFlow::duration() const
{
    if (packets.size() < 2)
        return std::nullopt;
    return static_cast<double>(last_ts.micros - first_ts.micros) / 1e6;
}

bool BiFlow::unopened_tcp() const
{
    return key.protocol == capture::ip_proto::tcp && !tcp_state.handshake_seen();
}

} // namespace netfeat::flow
