#include "netfeat/plugins/packet_features.hpp"

#include "netfeat/plugins/stats.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace netfeat::plugins {

using flow::BiFlow;
using flow::Direction;
using flow::PacketRecord;

FeatureRecord n_bytes(const BiFlow& flow, std::size_t n)
{
    FeatureRecord rec;
    rec.plugin = "n_bytes";
    rec.shape = Shape::flat(n);
    rec.names.reserve(n);
    rec.values.reserve(n);
    for (const PacketRecord& p : flow.packets) {
        for (std::uint8_t b : p.payload) {
            if (rec.values.size() == n)
                break;
            rec.push("byte_" + std::to_string(rec.values.size()), static_cast<double>(b));
        }
        if (rec.values.size() == n)
            break;
    }
    while (rec.values.size() < n)
        rec.push("byte_" + std::to_string(rec.values.size()), 0.0);
    return rec;
}

FeatureRecord byte_frequency(const BiFlow& flow, std::size_t packets)
{
    std::vector<double> counts(512, 0.0);
    const std::size_t limit = std::min(packets, flow.packets.size());
    for (std::size_t i = 0; i < limit; ++i) {
        const PacketRecord& p = flow.packets[i];
        const std::size_t base = p.direction == Direction::Forward ? 0 : 256;
        for (std::uint8_t b : p.payload)
            counts[base + b] += 1.0;
    }
    FeatureRecord rec;
    rec.plugin = "byte_frequency";
    rec.shape = Shape::flat(512);
    for (std::size_t i = 0; i < 512; ++i)
        rec.push((i < 256 ? "bf_fwd_" : "bf_bwd_") + std::to_string(i % 256), counts[i]);
    return rec;
}

FeatureRecord small_packet_ratio(const BiFlow& flow, std::size_t threshold)
{
    std::size_t small[3] = {0, 0, 0};
    std::size_t total[3] = {0, 0, 0};
    for (const PacketRecord& p : flow.packets) {
        const std::size_t d = p.direction == Direction::Forward ? 1 : 2;
        const bool is_small = p.payload_size <= threshold;
        for (std::size_t scope : {std::size_t{0}, d}) {
            ++total[scope];
            if (is_small)
                ++small[scope];
        }
    }
    auto ratio = [&](std::size_t s) {
        return total[s] == 0 ? kUndefined : static_cast<double>(small[s]) / static_cast<double>(total[s]);
    };
    FeatureRecord rec;
    rec.plugin = "small_packet_ratio";
    rec.shape = Shape::flat(3);
    rec.push("small_ratio_all", ratio(0));
    rec.push("small_ratio_fwd", ratio(1));
    rec.push("small_ratio_bwd", ratio(2));
    return rec;
}

FeatureRecord protocol_headers(const BiFlow& flow, std::size_t n)
{
    FeatureRecord rec;
    rec.plugin = "protocol_headers";
    rec.shape = Shape::matrix(n, 4);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string p = "ph" + std::to_string(i) + "_";
        if (i < flow.packets.size()) {
            const PacketRecord& pkt = flow.packets[i];
            const double iat = i == 0 ? 0.0 : (pkt.rel_time - flow.packets[i - 1].rel_time) * 1000.0;
            rec.push(p + "iat_ms", iat);
            rec.push(p + "size", static_cast<double>(pkt.ip_size));
            rec.push(p + "dir", static_cast<double>(static_cast<int>(pkt.direction)));
            rec.push(p + "win", static_cast<double>(pkt.tcp_window.value_or(0)));
        } else {
            for (const char* f : {"iat_ms", "size", "dir", "win"})
                rec.push(p + f, 0.0);
        }
    }
    return rec;
}

FeatureRecord packet_relative_time(const BiFlow& flow)
{
    std::vector<double> times;
    times.reserve(flow.packets.size());
    for (const PacketRecord& p : flow.packets)
        times.push_back(p.rel_time);
    FeatureRecord rec;
    rec.plugin = "packet_relative_time";
    rec.shape = Shape::flat(3);
    rec.push("rel_time_last", times.size() >= 2 ? times.back() : kUndefined);
    rec.push("rel_time_mean", summarize(times).mean);
    rec.push("rel_time_median", median(times));
    return rec;
}

FeatureRecord res_req_diff_time(const BiFlow& flow)
{
    std::vector<double> gaps;
    bool have_fwd = false;
    double last_fwd = 0.0;
    for (const PacketRecord& p : flow.packets) {
        if (p.direction == Direction::Forward) {
            have_fwd = true;
            last_fwd = p.rel_time;
        } else if (have_fwd) {
            gaps.push_back(p.rel_time - last_fwd);
        }
    }
    const Summary s = summarize(gaps);
    FeatureRecord rec;
    rec.plugin = "res_req_diff_time";
    rec.shape = Shape::flat(3);
    rec.push("res_req_min", s.min);
    rec.push("res_req_mean", s.mean);
    rec.push("res_req_max", s.max);
    return rec;
}

FeatureRecord deepmal_bytes(const BiFlow& flow, std::size_t m, std::size_t n)
{
    FeatureRecord rec;
    rec.plugin = "deepmal";
    rec.shape = Shape::matrix(m, n);
    rec.names.reserve(m * n);
    rec.values.reserve(m * n);
    for (std::size_t i = 0; i < m; ++i) {
        const std::vector<std::uint8_t>* payload = i < flow.packets.size() ? &flow.packets[i].payload : nullptr;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = payload && j < payload->size() ? static_cast<double>((*payload)[j]) : 0.0;
            rec.push("dm" + std::to_string(i) + "_" + std::to_string(j), v);
        }
    }
    return rec;
}

} // namespace netfeat::plugins
