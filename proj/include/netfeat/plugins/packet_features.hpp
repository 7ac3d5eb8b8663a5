#pragma once

#include "netfeat/flow/biflow.hpp"
#include "netfeat/plugins/feature_record.hpp"

#include <cstddef>

namespace netfeat::plugins {

/// Default payload size (bytes) at or below which a packet counts as small.
inline constexpr std::size_t kDefaultSmallPacketThreshold = 100;

/// First `n` transport-payload bytes of the flow, both directions in arrival
/// order, zero-padded. Shape (n).
FeatureRecord n_bytes(const flow::BiFlow& flow, std::size_t n);

/// Byte-value histogram over the payloads of the first `packets` packets
/// (empty payloads count toward the limit). Values 0..255 are forward,
/// 256..511 backward.
FeatureRecord byte_frequency(const flow::BiFlow& flow, std::size_t packets);

/// Share of packets with payload <= threshold: [overall, forward, backward].
/// A direction without packets is undefined.
FeatureRecord small_packet_ratio(const flow::BiFlow& flow, std::size_t threshold = kDefaultSmallPacketThreshold);

/// Per packet of the first `n`: [IAT ms, IP size, direction (+1/-1), TCP window].
/// Rows past the end of the flow are zero. Shape (n,4).
FeatureRecord protocol_headers(const flow::BiFlow& flow, std::size_t n);

/// [duration s, mean rel_time, median rel_time]; the duration is undefined for
/// single-packet flows.
FeatureRecord packet_relative_time(const flow::BiFlow& flow);

/// [min, mean, max] seconds between each backward packet and the most recent
/// forward packet before it.
FeatureRecord res_req_diff_time(const flow::BiFlow& flow);

/// First `n` payload bytes of each of the first `m` packets. Shape (m,n).
FeatureRecord deepmal_bytes(const flow::BiFlow& flow, std::size_t m, std::size_t n);

} // namespace netfeat::plugins
