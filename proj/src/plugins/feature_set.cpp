#include "netfeat/plugins/feature_set.hpp"

#include "netfeat/plugins/stnn.hpp"

#include <stdexcept>

namespace netfeat::plugins {

namespace {

constexpr std::size_t kPayloadBytes = 784;

FeatureRecord start(std::string_view name)
{
    FeatureRecord rec;
    rec.plugin = "feature_set:" + std::string(name);
    return rec;
}

FeatureRecord small_ratio_directional(const flow::BiFlow& flow, std::size_t threshold)
{
    const FeatureRecord all = small_packet_ratio(flow, threshold);
    FeatureRecord out;
    out.plugin = all.plugin;
    for (const char* name : {"small_ratio_fwd", "small_ratio_bwd"})
        out.push(name, all.number(std::string(name)));
    out.shape = Shape::flat(out.size());
    return out;
}

} // namespace

const std::vector<std::string>& feature_set_names()
{
    static const std::vector<std::string> names = {"m1cnn",   "m2cnn",     "deepmal",    "distiller",
                                                   "maldist", "m1cnn_278", "m1cnn_1296", "flowpic"};
    return names;
}

FeatureRecord feature_set(const flow::BiFlow& flow, std::string_view set_name, const FeatureSetConfig& config)
{
    FeatureRecord rec = start(set_name);
    if (set_name == "m1cnn" || set_name == "m2cnn") {
        append_dense(rec, n_bytes(flow, kPayloadBytes));
        if (set_name == "m2cnn")
            rec.shape = Shape::matrix(28, 28);
    } else if (set_name == "deepmal") {
        append_dense(rec, deepmal_bytes(flow, config.deepmal_packets, config.deepmal_bytes));
        rec.shape = Shape::matrix(config.deepmal_packets, config.deepmal_bytes);
    } else if (set_name == "distiller" || set_name == "maldist") {
        append_dense(rec, n_bytes(flow, kPayloadBytes));
        append_dense(rec, protocol_headers(flow, 32));
        if (set_name == "maldist")
            append_dense(rec, stnn_features(flow, config.small_threshold));
    } else if (set_name == "m1cnn_278") {
        append_dense(rec, n_bytes(flow, 200));
        append_dense(rec, stnn_features(flow, config.small_threshold));
        append_dense(rec, packet_relative_time(flow));
        append_dense(rec, small_ratio_directional(flow, config.small_threshold));
        append_dense(rec, res_req_diff_time(flow));
    } else if (set_name == "m1cnn_1296") {
        append_dense(rec, n_bytes(flow, kPayloadBytes));
        append_dense(rec, byte_frequency(flow, 6));
    } else if (set_name == "flowpic") {
        const auto windows = flowpic(flow, config.flowpic);
        const std::size_t rows = config.flowpic.size_bins;
        const std::size_t cols = config.flowpic.time_bins;
        const std::vector<double> grid =
            windows.empty() ? std::vector<double>(rows * cols, 0.0) : windows.front().dense();
        rec.names.reserve(grid.size());
        rec.values.reserve(grid.size());
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                rec.push("fp_" + std::to_string(r) + "_" + std::to_string(c), grid[r * cols + c]);
        rec.shape = Shape::matrix(rows, cols);
    } else {
        throw std::invalid_argument("unknown feature set: " + std::string(set_name));
    }
    return rec;
}

} // namespace netfeat::plugins
