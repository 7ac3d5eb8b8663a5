#pragma once

#include "netfeat/flow/flow_table.hpp"
#include "netfeat/labeling/labels.hpp"
#include "netfeat/plugins/registry.hpp"
#include "netfeat/util/config.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace netfeat::cli {

/// Bad configuration or missing input; the CLI exits with status 1.
class FatalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class LabelMode { None, Filename, Directory };

struct PluginSpec {
    /// Name in [plugins] list; also the [plugin.<instance>] section.
    std::string instance;
    std::string type;
    plugins::PluginParams params;
};

struct PipelineConfig {
    /// Files, directories (searched recursively for .pcap/.pcapng/.cap) or globs.
    std::vector<std::string> inputs;
    LabelMode label_mode = LabelMode::None;
    /// Filename mode scheme; empty means the built-in ISCX scheme.
    std::filesystem::path scheme_path;
    /// Directory mode root and optional dimension names.
    std::filesystem::path label_root;
    std::vector<std::string> directory_dimensions;
    std::vector<PluginSpec> plugins;
    flow::FlowTableConfig flow;
    std::filesystem::path output_dir;
    std::filesystem::path asn_db;
    std::size_t parallelism = 1;
    /// Label dimension the analysis groups by; empty picks the first one.
    std::string analysis_dimension;
    bool per_file_stats = true;

    /// Settings text with parallelism removed; hashed into the manifest.
    std::string canonical;
    /// Relative paths in the config resolve against this directory.
    std::filesystem::path base_dir;
};

/// Config file layout (util::Config syntax). Relative paths are resolved
/// against the config file's directory.
///
///   [input]     paths = [captures/, "extra/*.pcap"]
///   [labels]    mode = filename | directory | none
///               scheme = schemes/iscx.toml        (filename mode, optional)
///               root = captures                   (directory mode, required)
///               dimensions = [traffic]            (directory mode, optional)
///   [flow]      idle_timeout, active_timeout, close_linger (seconds),
///               max_packets, max_flows, stream_limit (bytes)
///   [output]    dir = out                         (required)
///   [asn]       db = ip2asn-v4.tsv
///   [run]       parallelism = 4
///   [analysis]  dimension = app, per_file = true
///   [plugins]   list = [n_bytes, maldist]          (required for extract)
///   [plugin.maldist]
///   type = feature_set                             (defaults to the instance name)
///   set = maldist                                  (other keys are plugin parameters)
///
/// Validates that referenced files exist. Throws FatalError.
PipelineConfig load_pipeline_config(const util::Config& config, const std::filesystem::path& base_dir,
                                    bool require_plugins);

/// Reads the file, applies "section.key=value" overrides, then validates.
PipelineConfig load_pipeline_config_file(const std::filesystem::path& path, const std::vector<std::string>& overrides,
                                         bool require_plugins);

/// Expands inputs to a sorted, de-duplicated list of capture files. Missing
/// plain paths throw FatalError; a glob or directory may match nothing.
std::vector<std::filesystem::path> resolve_inputs(const PipelineConfig& config);

} // namespace netfeat::cli
