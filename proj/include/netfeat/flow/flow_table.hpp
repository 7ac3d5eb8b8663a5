#pragma once

#include "netfeat/flow/biflow.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace netfeat::flow {

struct FlowTableConfig {
    double idle_timeout_s = 120.0;
    double active_timeout_s = 1800.0;
    /// Time a flow is kept after FIN in both directions or a RST.
    double close_linger_s = 5.0;
    std::size_t max_packets_per_flow = 100'000;
    std::size_t max_flows = 1'000'000;
    /// Per-direction cap on reassembled TCP stream bytes (0 disables reassembly).
    std::size_t stream_limit_bytes = 1 << 20;
};

/// Groups decoded packets of one capture into bidirectional flows.
///
/// A flow expires when a later packet (of any flow) arrives after its
/// deadline: min(last + idle, first + active, closed + linger). Expired flows
/// are emitted in deadline order before the new packet is placed.
class FlowTable {
public:
    explicit FlowTable(FlowTableConfig config = {}, std::string source_file = {});

    std::vector<BiFlow> ingest(const capture::DecodedPacket& pkt);
    /// Emits every live flow, ordered by first timestamp.
    std::vector<BiFlow> flush();

    std::size_t live_flows() const { return live_.size(); }

private:
    struct Assembler {
        bool has_base = false;
        std::uint32_t base = 0;
        std::vector<std::uint8_t> data;
        std::vector<bool> filled;
        struct Write {
            std::size_t offset;
            std::size_t length;
            double rel_time;
        };
        std::vector<Write> writes;

        void add(std::uint32_t seq, bool syn, std::span<const std::uint8_t> payload, double rel_time,
                 std::size_t limit);
        ByteStream finish() const;
    };

    struct Live {
        BiFlow flow;
        std::uint64_t seq = 0;
        std::int64_t deadline = 0;
        bool fin_fwd = false;
        bool fin_bwd = false;
        std::optional<std::int64_t> closed_at;
        Assembler fwd_stream;
        Assembler bwd_stream;
    };

    std::int64_t deadline_of(const Live& live) const;
    EndReason expiry_reason(const Live& live) const;
    void update_indexes(Live& live, std::int64_t old_deadline, std::int64_t old_last);
    BiFlow complete(std::uint64_t seq, EndReason reason);
    void append(Live& live, const capture::DecodedPacket& pkt, Side from);

    FlowTableConfig config_;
    std::string source_file_;
    std::int64_t idle_us_;
    std::int64_t active_us_;
    std::int64_t linger_us_;
    std::uint64_t next_seq_ = 0;
    std::unordered_map<FlowKey, std::uint64_t, FlowKeyHash> index_;
    std::map<std::uint64_t, Live> live_;
    std::set<std::pair<std::int64_t, std::uint64_t>> by_deadline_;
    std::set<std::pair<std::int64_t, std::uint64_t>> by_last_seen_;
};

/// Splits a TCP DNS stream into messages using the 2-byte length prefix.
std::vector<std::vector<std::uint8_t>> split_tcp_dns(std::span<const std::uint8_t> stream);

} // namespace netfeat::flow
