#pragma once

#include "netfeat/flow/biflow.hpp"
#include "netfeat/plugins/feature_record.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace netfeat::plugins {

struct FlowPicConfig {
    double window_seconds = 60.0;
    std::size_t size_bins = 1500;
    std::size_t time_bins = 1500;
    std::uint32_t size_max = 1500;
};

/// Packet-size x arrival-time histogram of one time window. Stored sparsely;
/// cells absent from `cells` are zero.
struct FlowPicHistogram {
    std::size_t window_index = 0;
    std::size_t size_bins = 0;
    std::size_t time_bins = 0;
    std::uint32_t size_range = 0;
    double window_seconds = 0.0;
    /// (size bin, time bin) -> count.
    std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> cells;

    std::uint64_t total() const;
    std::uint64_t at(std::size_t size_bin, std::size_t time_bin) const;
    /// Row-major size_bins x time_bins grid.
    std::vector<double> dense() const;
};

/// Size bin of an IP length: clamp(size, 0, size_max) scaled onto [0, size_bins).
std::size_t flowpic_size_bin(std::uint32_t ip_size, const FlowPicConfig& config);
/// Time bin of an offset (seconds) within its window.
std::size_t flowpic_time_bin(double offset_in_window, const FlowPicConfig& config);

/// One histogram per non-empty window, windows counted from the first packet.
/// Throws std::invalid_argument for a non-positive window or zero bins.
std::vector<FlowPicHistogram> flowpic(const flow::BiFlow& flow, const FlowPicConfig& config = {});

} // namespace netfeat::plugins
