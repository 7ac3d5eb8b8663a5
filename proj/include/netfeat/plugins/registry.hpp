#pragma once

#include "netfeat/flow/biflow.hpp"
#include "netfeat/plugins/asn.hpp"
#include "netfeat/plugins/feature_record.hpp"
#include "netfeat/plugins/flowpic.hpp"

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace netfeat::plugins {

class PluginConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using PluginParams = std::map<std::string, std::string>;

/// Shared resources a plugin may need.
struct PluginContext {
    const AsnDatabase* asn_db = nullptr;
};

/// A configured extractor. Feature names and shape do not depend on the flow.
class FeaturePlugin {
public:
    virtual ~FeaturePlugin() = default;

    virtual const std::string& type() const = 0;
    virtual const std::vector<std::string>& feature_names() const = 0;
    virtual const Shape& shape() const = 0;
    virtual FeatureRecord extract(const flow::BiFlow& flow) const = 0;
};

/// FlowPic settings from window/size_bins/time_bins/size_max parameters
/// (other keys are ignored). Throws PluginConfigError on malformed values.
FlowPicConfig flowpic_config_from_params(const PluginParams& params);

/// Plugin types known to make_plugin().
const std::vector<std::string>& plugin_types();

/// Builds a plugin from its type and string parameters:
///   n_bytes             n (784)
///   byte_frequency      packets (6)
///   small_packet_ratio  threshold (100)
///   protocol_headers    packets (32)
///   stnn                threshold (100)
///   deepmal             packets (20), bytes (100)
///   flowpic             window, size_bins, time_bins, size_max; emits the window count
///   feature_set         set (required), threshold, packets, bytes, and the flowpic keys
///   asn_info            needs ctx.asn_db
///   clumps, dns, tls, packet_relative_time, res_req_diff_time   no parameters
/// Throws PluginConfigError for an unknown type, an unknown or malformed
/// parameter, or a missing resource.
std::unique_ptr<FeaturePlugin> make_plugin(const std::string& type, const PluginParams& params = {},
                                           const PluginContext& ctx = {});

} // namespace netfeat::plugins
