#pragma once

#include "netfeat/flow/biflow.hpp"
#include "netfeat/plugins/feature_record.hpp"

#include <span>
#include <string>
#include <vector>

namespace netfeat::plugins {

/// One element of a directional sequence: a packet, or a TLS record.
struct ClumpItem {
    flow::Direction direction = flow::Direction::Forward;
    double bytes = 0.0;
    /// Seconds relative to the flow start.
    double time = 0.0;
};

/// Maximal run of consecutive same-direction items.
struct Clump {
    flow::Direction direction = flow::Direction::Forward;
    std::size_t packet_count = 0;
    double total_bytes = 0.0;
    std::vector<double> sizes;
    double start_time = 0.0;
    double end_time = 0.0;
};

std::vector<Clump> partition_clumps(std::span<const ClumpItem> items);

/// Clump statistics for the scopes all, fwd and bwd. Per scope, in order:
///   count,
///   size_{min,max,mean,std}    packets per clump,
///   length_{min,max,mean,std}  bytes per clump,
///   iat_ms_{min,max,mean,std}  gaps between consecutive clump starts (ms).
/// Names are `<prefix>_<scope>_<stat>`. IAT statistics need two clumps in
/// the scope and are undefined otherwise; size/length are undefined for an
/// empty scope.
FeatureRecord clump_features(std::span<const ClumpItem> items, const std::string& prefix = "clump");

/// Clump features over the flow's packets, using IP size as the byte measure.
FeatureRecord clumps(const flow::BiFlow& flow);

} // namespace netfeat::plugins
