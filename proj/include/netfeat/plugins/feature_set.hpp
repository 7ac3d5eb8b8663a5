#pragma once

#include "netfeat/flow/biflow.hpp"
#include "netfeat/plugins/feature_record.hpp"
#include "netfeat/plugins/flowpic.hpp"
#include "netfeat/plugins/packet_features.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace netfeat::plugins {

struct FeatureSetConfig {
    std::size_t small_threshold = kDefaultSmallPacketThreshold;
    std::size_t deepmal_packets = 20;
    std::size_t deepmal_bytes = 100;
    FlowPicConfig flowpic;
};

/// Names accepted by feature_set().
const std::vector<std::string>& feature_set_names();

/// Fixed-length model input built by concatenating plugin outputs. Undefined
/// values become 0 so lengths never vary:
///   m1cnn, m2cnn  n_bytes(784)                                   784  (m2cnn shaped 28x28)
///   distiller     n_bytes(784) + protocol_headers(32)            912
///   maldist       distiller + stnn                               982
///   m1cnn_278     n_bytes(200) + stnn + packet_relative_time
///                 + small_packet_ratio(fwd,bwd) + res_req_diff_time  278
///   m1cnn_1296    n_bytes(784) + byte_frequency(6)               1296
///   deepmal       deepmal_bytes(m, n)                            m*n  (shape m x n, default 20x100)
///   flowpic       dense histogram of the first window            size_bins x time_bins
/// Throws std::invalid_argument for an unknown name.
FeatureRecord feature_set(const flow::BiFlow& flow, std::string_view set_name, const FeatureSetConfig& config = {});

} // namespace netfeat::plugins
