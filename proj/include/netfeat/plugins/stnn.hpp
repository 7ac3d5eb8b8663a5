#pragma once

#include "netfeat/flow/biflow.hpp"
#include "netfeat/plugins/feature_record.hpp"
#include "netfeat/plugins/packet_features.hpp"

#include <array>
#include <string_view>

namespace netfeat::plugins {

/// Packet categories (rows), in order.
inline constexpr std::array<std::string_view, 5> kStnnCategories = {"all", "fwd", "bwd", "small", "large"};

/// Statistics per category (columns), in order.
inline constexpr std::array<std::string_view, 14> kStnnStatistics = {
    "count",       "bytes",       "size_min",   "size_max",     "size_mean",
    "size_std",    "iat_ms_min",  "iat_ms_max", "iat_ms_mean",  "iat_ms_std",
    "duration_s",  "bytes_per_s", "pkts_per_s", "packet_share"};

/// (5,14) statistics matrix. Categories: all packets, forward, backward,
/// payload <= threshold, payload > threshold. Sizes are IP lengths, IATs are
/// between consecutive packets of the same category. The record is dense:
/// an empty category is an all-zero row, and quantities needing two packets
/// (IAT, duration, rates) are 0 when the category has fewer.
FeatureRecord stnn_features(const flow::BiFlow& flow, std::size_t small_threshold = kDefaultSmallPacketThreshold);

} // namespace netfeat::plugins
