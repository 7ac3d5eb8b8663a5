#include "netfeat/flow/flow_table.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace netfeat::flow {

namespace {

constexpr std::uint16_t kDnsPort = 53;
constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

std::int64_t to_micros(double seconds) { return static_cast<std::int64_t>(std::llround(seconds * 1e6)); }

std::int64_t saturating_add(std::int64_t a, std::int64_t b)
{
    if (b > 0 && a > kNever - b)
        return kNever;
    return a + b;
}

bool is_dns(const FlowKey& key)
{
    return (key.protocol == capture::ip_proto::udp || key.protocol == capture::ip_proto::tcp) &&
           (key.port_lo == kDnsPort || key.port_hi == kDnsPort);
}

} // namespace

void FlowTable::Assembler::add(std::uint32_t seq, bool syn, std::span<const std::uint8_t> payload,
                               double rel_time, std::size_t limit)
{
    if (syn && !has_base) {
        has_base = true;
        base = seq + 1;
    }
    if (payload.empty())
        return;
    const std::uint32_t data_seq = syn ? seq + 1 : seq;
    if (!has_base) {
        has_base = true;
        base = data_seq;
    }
    const auto rel = static_cast<std::int32_t>(data_seq - base);
    if (rel < 0)
        return;
    const auto offset = static_cast<std::size_t>(rel);
    if (offset >= limit)
        return;
    const std::size_t n = std::min(payload.size(), limit - offset);
    if (data.size() < offset + n) {
        data.resize(offset + n, 0);
        filled.resize(offset + n, false);
    }
    // Overlapping retransmissions overwrite earlier bytes.
    std::copy_n(payload.begin(), n, data.begin() + static_cast<std::ptrdiff_t>(offset));
    std::fill_n(filled.begin() + static_cast<std::ptrdiff_t>(offset), n, true);
    writes.push_back({offset, n, rel_time});
}

ByteStream FlowTable::Assembler::finish() const
{
    ByteStream out;
    const auto gap = std::find(filled.begin(), filled.end(), false);
    const auto len = static_cast<std::size_t>(gap - filled.begin());
    out.bytes.assign(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(len));
    if (len == 0)
        return out;

    // First arrival time of every byte, compressed into runs.
    std::vector<double> first_seen(len, std::numeric_limits<double>::quiet_NaN());
    for (const Write& w : writes) {
        const std::size_t end = std::min(w.offset + w.length, len);
        for (std::size_t i = w.offset; i < end; ++i)
            if (std::isnan(first_seen[i]))
                first_seen[i] = w.rel_time;
    }
    for (std::size_t i = 0; i < len; ++i)
        if (out.times.empty() || out.times.back().rel_time != first_seen[i])
            out.times.push_back({i, first_seen[i]});
    return out;
}

FlowTable::FlowTable(FlowTableConfig config, std::string source_file)
    : config_(config), source_file_(std::move(source_file)), idle_us_(to_micros(config.idle_timeout_s)),
      active_us_(to_micros(config.active_timeout_s)), linger_us_(to_micros(config.close_linger_s))
{
}

std::int64_t FlowTable::deadline_of(const Live& live) const
{
    std::int64_t d = std::min(saturating_add(live.flow.last_ts.micros, idle_us_),
                              saturating_add(live.flow.first_ts.micros, active_us_));
    if (live.closed_at)
        d = std::min(d, saturating_add(*live.closed_at, linger_us_));
    return d;
}

EndReason FlowTable::expiry_reason(const Live& live) const
{
    if (live.closed_at && saturating_add(*live.closed_at, linger_us_) == live.deadline)
        return EndReason::Closed;
    if (saturating_add(live.flow.first_ts.micros, active_us_) == live.deadline)
        return EndReason::ActiveTimeout;
    return EndReason::IdleTimeout;
}

void FlowTable::update_indexes(Live& live, std::int64_t old_deadline, std::int64_t old_last)
{
    by_deadline_.erase({old_deadline, live.seq});
    by_last_seen_.erase({old_last, live.seq});
    live.deadline = deadline_of(live);
    by_deadline_.insert({live.deadline, live.seq});
    by_last_seen_.insert({live.flow.last_ts.micros, live.seq});
}

BiFlow FlowTable::complete(std::uint64_t seq, EndReason reason)
{
    auto it = live_.find(seq);
    Live& live = it->second;
    by_deadline_.erase({live.deadline, seq});
    by_last_seen_.erase({live.flow.last_ts.micros, seq});
    index_.erase(live.flow.key);

    BiFlow flow = std::move(live.flow);
    flow.end_reason = reason;
    if (flow.key.protocol == capture::ip_proto::tcp && config_.stream_limit_bytes > 0) {
        flow.tls_stream_fwd = live.fwd_stream.finish();
        flow.tls_stream_bwd = live.bwd_stream.finish();
        if (is_dns(flow.key)) {
            struct Msg {
                double time;
                int dir;
                std::vector<std::uint8_t> bytes;
            };
            std::vector<Msg> msgs;
            auto collect = [&msgs](const ByteStream& s, int dir) {
                std::size_t off = 0;
                for (auto& m : split_tcp_dns(s.bytes)) {
                    msgs.push_back({s.time_at(off), dir, m});
                    off += m.size() + 2;
                }
            };
            collect(flow.tls_stream_fwd, 0);
            collect(flow.tls_stream_bwd, 1);
            std::stable_sort(msgs.begin(), msgs.end(), [](const Msg& a, const Msg& b) {
                return std::tie(a.time, a.dir) < std::tie(b.time, b.dir);
            });
            for (auto& m : msgs)
                flow.dns_payloads.push_back(std::move(m.bytes));
        }
    }
    live_.erase(it);
    return flow;
}

void FlowTable::append(Live& live, const capture::DecodedPacket& pkt, Side from)
{
    BiFlow& flow = live.flow;
    const Direction dir = from == flow.initiator ? Direction::Forward : Direction::Backward;
    const double rel = static_cast<double>(pkt.timestamp.micros - flow.first_ts.micros) / 1e6;

    PacketRecord rec;
    rec.rel_time = rel;
    rec.direction = dir;
    rec.ip_size = pkt.ip_total_length;
    rec.payload_size = static_cast<std::uint32_t>(pkt.payload.size());
    rec.payload = pkt.payload;
    rec.tcp_window = pkt.tcp_window;
    rec.tcp_flags = pkt.tcp_flags;
    flow.packets.push_back(std::move(rec));
    flow.last_ts = pkt.timestamp;

    if (pkt.ip_protocol == capture::ip_proto::udp && is_dns(flow.key) && !pkt.payload.empty())
        flow.dns_payloads.push_back(pkt.payload);

    if (pkt.ip_protocol != capture::ip_proto::tcp || !pkt.tcp_flags)
        return;

    using namespace capture::tcp_flag;
    const std::uint8_t flags = *pkt.tcp_flags;
    const bool is_syn = flags & syn;
    const bool is_ack = flags & ack;
    const bool fwd = dir == Direction::Forward;

    TcpState& st = flow.tcp_state;
    if (!st.broken && !st.handshake_seen()) {
        const bool syn_only = is_syn && !is_ack;
        const bool syn_ack = is_syn && is_ack;
        const bool plain_ack = is_ack && !(flags & (syn | fin | rst));
        if (!st.syn_fwd) {
            if (fwd && syn_only)
                st.syn_fwd = true;
            else
                st.broken = true;
        } else if (!st.synack_bwd) {
            if (!fwd && syn_ack)
                st.synack_bwd = true;
            else if (!(fwd && syn_only))
                st.broken = true;
        } else {
            if (fwd && plain_ack)
                st.ack_fwd = true;
            else if (!(!fwd && syn_ack))
                st.broken = true;
        }
    }

    if (flags & fin)
        (fwd ? live.fin_fwd : live.fin_bwd) = true;
    if (!live.closed_at && ((live.fin_fwd && live.fin_bwd) || (flags & rst)))
        live.closed_at = pkt.timestamp.micros;

    if (config_.stream_limit_bytes > 0 && pkt.tcp_seq) {
        Assembler& a = fwd ? live.fwd_stream : live.bwd_stream;
        a.add(*pkt.tcp_seq, is_syn, pkt.payload, rel, config_.stream_limit_bytes);
    }
}

std::vector<BiFlow> FlowTable::ingest(const capture::DecodedPacket& pkt)
{
    std::vector<BiFlow> out;
    const std::int64_t now = pkt.timestamp.micros;
    while (!by_deadline_.empty() && by_deadline_.begin()->first < now) {
        const std::uint64_t seq = by_deadline_.begin()->second;
        out.push_back(complete(seq, expiry_reason(live_.at(seq))));
    }

    auto [key, side] = canonical_key(pkt);
    auto found = index_.find(key);
    std::uint64_t seq = 0;
    if (found == index_.end()) {
        if (config_.max_flows > 0 && live_.size() >= config_.max_flows && !by_last_seen_.empty())
            out.push_back(complete(by_last_seen_.begin()->second, EndReason::Evicted));
        seq = next_seq_++;
        Live& live = live_[seq];
        live.seq = seq;
        live.flow.key = key;
        live.flow.initiator = side;
        live.flow.first_ts = pkt.timestamp;
        live.flow.last_ts = pkt.timestamp;
        live.flow.source_file = source_file_;
        live.deadline = deadline_of(live);
        index_.emplace(key, seq);
        by_deadline_.insert({live.deadline, seq});
        by_last_seen_.insert({live.flow.last_ts.micros, seq});
    } else {
        seq = found->second;
    }

    Live& live = live_.at(seq);
    const std::int64_t old_deadline = live.deadline;
    const std::int64_t old_last = live.flow.last_ts.micros;
    append(live, pkt, side);
    update_indexes(live, old_deadline, old_last);

    if (config_.max_packets_per_flow > 0 && live.flow.packets.size() >= config_.max_packets_per_flow)
        out.push_back(complete(seq, EndReason::PacketCap));
    return out;
}

std::vector<BiFlow> FlowTable::flush()
{
    std::vector<std::pair<std::int64_t, std::uint64_t>> order;
    order.reserve(live_.size());
    for (const auto& [seq, live] : live_)
        order.emplace_back(live.flow.first_ts.micros, seq);
    std::sort(order.begin(), order.end());

    std::vector<BiFlow> out;
    out.reserve(order.size());
    for (const auto& [first, seq] : order)
        out.push_back(complete(seq, EndReason::Flushed));
    return out;
}

std::vector<std::vector<std::uint8_t>> split_tcp_dns(std::span<const std::uint8_t> stream)
{
    std::vector<std::vector<std::uint8_t>> out;
    std::size_t pos = 0;
    while (pos + 2 <= stream.size()) {
        const std::size_t len = std::size_t(stream[pos]) << 8 | stream[pos + 1];
        if (len == 0 || pos + 2 + len > stream.size())
            break;
        out.emplace_back(stream.begin() + static_cast<std::ptrdiff_t>(pos + 2),
                         stream.begin() + static_cast<std::ptrdiff_t>(pos + 2 + len));
        pos += 2 + len;
    }
    return out;
}

} // namespace netfeat::flow
