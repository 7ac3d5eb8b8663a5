#pragma once

#include "netfeat/cli/pipeline_config.hpp"

#include <filesystem>
#include <ostream>
#include <string>

namespace netfeat::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
/// Some input files failed; see the manifest.
inline constexpr int kExitPartial = 2;

/// Writes to config.output_dir:
///   features.csv       flow_id, source_file, src_ip, src_port, dst_ip, dst_port,
///                      protocol, first_ts, last_ts, packets, end_reason,
///                      label_<dimension>..., then plugin columns in list order
///   flowpic/<instance>/<flow_id>_w<window>.csv   "row,col,count" (size bin, time bin)
///   flowpic/<instance>/manifest.json
///   manifest.json      config hash, inputs with per-file status, counts
/// Rows are ordered by source file, then flow start. Output bytes do not
/// depend on parallelism. Returns kExitOk or kExitPartial; throws FatalError.
int cmd_extract(const PipelineConfig& config, std::ostream& log);

/// Writes label_stats.csv, protocols.csv, unopened_tcp.csv, summary.txt and
/// analysis_manifest.json to config.output_dir.
int cmd_analyze(const PipelineConfig& config, std::ostream& log);

struct EvaluateOptions {
    std::filesystem::path truth;
    std::filesystem::path pred;
    /// "multiclass" or "challenge".
    std::string mode = "multiclass";
    /// Positive class, required in challenge mode.
    std::string positive;
    /// When set, metrics.csv and confusion.csv are written here.
    std::filesystem::path output_dir;
};

/// Prints a text report to `out`. Throws FatalError or evaluation::EvaluationError.
int cmd_evaluate(const EvaluateOptions& options, std::ostream& out);

} // namespace netfeat::cli
