#pragma once

#include "netfeat/flow/biflow.hpp"
#include "netfeat/flow/flow_table.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace netfeat::flow {

struct CaptureStats {
    std::uint64_t records = 0;
    std::uint64_t decoded = 0;
    /// Skip reason name -> count.
    std::map<std::string, std::uint64_t> skipped;
    std::uint64_t flows = 0;
    std::vector<std::string> warnings;
};

using FlowSink = std::function<void(BiFlow&&)>;

/// Reads, decodes and groups one capture file, handing each completed flow
/// to `sink` in emission order (expiries first, then the final flush).
/// Throws capture::CaptureError when the file cannot be read.
CaptureStats process_capture(const std::filesystem::path& path, const FlowTableConfig& config,
                             const std::string& source_name, const FlowSink& sink);

} // namespace netfeat::flow
