#include "netfeat/plugins/registry.hpp"

#include "netfeat/plugins/clumps.hpp"
#include "netfeat/plugins/dns.hpp"
#include "netfeat/plugins/feature_set.hpp"
#include "netfeat/plugins/flowpic.hpp"
#include "netfeat/plugins/packet_features.hpp"
#include "netfeat/plugins/stnn.hpp"
#include "netfeat/plugins/tls.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <optional>
#include <set>

namespace netfeat::plugins {

namespace {

using Extractor = std::function<FeatureRecord(const flow::BiFlow&)>;

class FunctionPlugin final : public FeaturePlugin {
public:
    FunctionPlugin(std::string type, Extractor fn) : type_(std::move(type)), fn_(std::move(fn))
    {
        // Names and shape are flow-independent, so an empty flow yields them.
        const FeatureRecord probe = fn_(flow::BiFlow{});
        names_ = probe.names;
        shape_ = probe.shape;
    }

    const std::string& type() const override { return type_; }
    const std::vector<std::string>& feature_names() const override { return names_; }
    const Shape& shape() const override { return shape_; }

    FeatureRecord extract(const flow::BiFlow& flow) const override
    {
        FeatureRecord rec = fn_(flow);
        if (rec.names.size() != names_.size())
            throw std::logic_error("plugin " + type_ + " produced " + std::to_string(rec.names.size()) +
                                   " features, declared " + std::to_string(names_.size()));
        return rec;
    }

private:
    std::string type_;
    Extractor fn_;
    std::vector<std::string> names_;
    Shape shape_;
};

class Params {
public:
    Params(const std::string& type, const PluginParams& params, std::set<std::string> allowed)
        : type_(type), params_(params)
    {
        for (const auto& [key, value] : params)
            if (!allowed.contains(key))
                throw PluginConfigError("plugin " + type + ": unknown parameter '" + key + "'");
    }

    std::size_t count(const std::string& key, std::size_t fallback, std::size_t minimum = 1) const
    {
        const auto it = params_.find(key);
        if (it == params_.end())
            return fallback;
        std::size_t value = 0;
        const std::string& s = it->second;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc() || ptr != s.data() + s.size() || value < minimum)
            throw PluginConfigError("plugin " + type_ + ": parameter '" + key + "' must be an integer >= " +
                                    std::to_string(minimum) + ", got '" + s + "'");
        return value;
    }

    double positive(const std::string& key, double fallback) const
    {
        const auto it = params_.find(key);
        if (it == params_.end())
            return fallback;
        double value = 0;
        const std::string& s = it->second;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc() || ptr != s.data() + s.size() || !(value > 0))
            throw PluginConfigError("plugin " + type_ + ": parameter '" + key + "' must be a positive number, got '" +
                                    s + "'");
        return value;
    }

    std::optional<std::string> text(const std::string& key) const
    {
        const auto it = params_.find(key);
        if (it == params_.end())
            return std::nullopt;
        return it->second;
    }

private:
    std::string type_;
    const PluginParams& params_;
};

FlowPicConfig flowpic_config(const Params& p)
{
    FlowPicConfig cfg;
    cfg.window_seconds = p.positive("window", cfg.window_seconds);
    cfg.size_bins = p.count("size_bins", cfg.size_bins);
    cfg.time_bins = p.count("time_bins", cfg.time_bins);
    cfg.size_max = static_cast<std::uint32_t>(p.count("size_max", cfg.size_max));
    return cfg;
}

const std::set<std::string> kFlowPicKeys = {"window", "size_bins", "time_bins", "size_max"};

} // namespace

FlowPicConfig flowpic_config_from_params(const PluginParams& params)
{
    PluginParams relevant;
    for (const auto& key : kFlowPicKeys)
        if (const auto it = params.find(key); it != params.end())
            relevant.insert(*it);
    return flowpic_config(Params("flowpic", relevant, kFlowPicKeys));
}

const std::vector<std::string>& plugin_types()
{
    static const std::vector<std::string> types = {
        "asn_info", "byte_frequency", "clumps",         "deepmal",  "dns",
        "feature_set", "flowpic",     "n_bytes",        "packet_relative_time", "protocol_headers",
        "res_req_diff_time", "small_packet_ratio", "stnn", "tls"};
    return types;
}

std::unique_ptr<FeaturePlugin> make_plugin(const std::string& type, const PluginParams& params,
                                           const PluginContext& ctx)
{
    auto make = [&](Extractor fn) { return std::make_unique<FunctionPlugin>(type, std::move(fn)); };

    if (type == "n_bytes") {
        const std::size_t n = Params(type, params, {"n"}).count("n", 784);
        return make([n](const flow::BiFlow& f) { return n_bytes(f, n); });
    }
    if (type == "byte_frequency") {
        const std::size_t packets = Params(type, params, {"packets"}).count("packets", 6);
        return make([packets](const flow::BiFlow& f) { return byte_frequency(f, packets); });
    }
    if (type == "small_packet_ratio") {
        const std::size_t thr =
            Params(type, params, {"threshold"}).count("threshold", kDefaultSmallPacketThreshold, 0);
        return make([thr](const flow::BiFlow& f) { return small_packet_ratio(f, thr); });
    }
    if (type == "protocol_headers") {
        const std::size_t n = Params(type, params, {"packets"}).count("packets", 32);
        return make([n](const flow::BiFlow& f) { return protocol_headers(f, n); });
    }
    if (type == "stnn") {
        const std::size_t thr =
            Params(type, params, {"threshold"}).count("threshold", kDefaultSmallPacketThreshold, 0);
        return make([thr](const flow::BiFlow& f) { return stnn_features(f, thr); });
    }
    if (type == "deepmal") {
        const Params p(type, params, {"packets", "bytes"});
        const std::size_t m = p.count("packets", 20);
        const std::size_t n = p.count("bytes", 100);
        return make([m, n](const flow::BiFlow& f) { return deepmal_bytes(f, m, n); });
    }
    if (type == "flowpic") {
        const FlowPicConfig cfg = flowpic_config(Params(type, params, kFlowPicKeys));
        return make([cfg](const flow::BiFlow& f) {
            FeatureRecord rec;
            rec.plugin = "flowpic";
            rec.push("flowpic_windows", static_cast<double>(flowpic(f, cfg).size()));
            rec.shape = Shape::flat(1);
            return rec;
        });
    }
    if (type == "feature_set") {
        std::set<std::string> allowed = kFlowPicKeys;
        allowed.insert({"set", "threshold", "packets", "bytes"});
        const Params p(type, params, allowed);
        const auto set = p.text("set");
        if (!set)
            throw PluginConfigError("plugin feature_set: parameter 'set' is required");
        const auto& known = feature_set_names();
        if (std::find(known.begin(), known.end(), *set) == known.end())
            throw PluginConfigError("plugin feature_set: unknown set '" + *set + "'");
        FeatureSetConfig cfg;
        cfg.small_threshold = p.count("threshold", cfg.small_threshold, 0);
        cfg.deepmal_packets = p.count("packets", cfg.deepmal_packets);
        cfg.deepmal_bytes = p.count("bytes", cfg.deepmal_bytes);
        cfg.flowpic = flowpic_config(p);
        return make([cfg, name = *set](const flow::BiFlow& f) { return feature_set(f, name, cfg); });
    }
    if (type == "asn_info") {
        Params(type, params, {});
        if (!ctx.asn_db)
            throw PluginConfigError("plugin asn_info: no ASN database configured");
        const AsnDatabase* db = ctx.asn_db;
        return make([db](const flow::BiFlow& f) { return asn_features(f, *db); });
    }

    static const std::map<std::string, FeatureRecord (*)(const flow::BiFlow&)> simple = {
        {"clumps", &clumps},
        {"dns", &dns_features},
        {"tls", &tls_features},
        {"packet_relative_time", &packet_relative_time},
        {"res_req_diff_time", &res_req_diff_time},
    };
    if (const auto it = simple.find(type); it != simple.end()) {
        Params(type, params, {});
        return make(it->second);
    }
    throw PluginConfigError("unknown plugin type: " + type);
}

} // namespace netfeat::plugins
