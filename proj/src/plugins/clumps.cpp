#include "netfeat/plugins/clumps.hpp"

#include "netfeat/plugins/stats.hpp"

#include <optional>

namespace netfeat::plugins {

using flow::Direction;

std::vector<Clump> partition_clumps(std::span<const ClumpItem> items)
{
    std::vector<Clump> out;
    for (const ClumpItem& item : items) {
        if (out.empty() || out.back().direction != item.direction) {
            Clump c;
            c.direction = item.direction;
            c.start_time = item.time;
            out.push_back(std::move(c));
        }
        Clump& c = out.back();
        ++c.packet_count;
        c.total_bytes += item.bytes;
        c.sizes.push_back(item.bytes);
        c.end_time = item.time;
    }
    return out;
}

FeatureRecord clump_features(std::span<const ClumpItem> items, const std::string& prefix)
{
    const std::vector<Clump> all = partition_clumps(items);

    FeatureRecord rec;
    rec.plugin = prefix;
    const std::optional<Direction> scopes[] = {std::nullopt, Direction::Forward, Direction::Backward};
    const char* scope_names[] = {"all", "fwd", "bwd"};

    for (std::size_t s = 0; s < 3; ++s) {
        std::vector<double> sizes;
        std::vector<double> lengths;
        std::vector<double> starts;
        for (const Clump& c : all) {
            if (scopes[s] && c.direction != *scopes[s])
                continue;
            sizes.push_back(static_cast<double>(c.packet_count));
            lengths.push_back(c.total_bytes);
            starts.push_back(c.start_time);
        }
        std::vector<double> gaps;
        for (std::size_t i = 1; i < starts.size(); ++i)
            gaps.push_back((starts[i] - starts[i - 1]) * 1000.0);

        const std::string p = prefix + "_" + scope_names[s] + "_";
        rec.push(p + "count", static_cast<double>(sizes.size()));
        for (auto [stat, values] : {std::pair{"size", &sizes}, std::pair{"length", &lengths},
                                    std::pair{"iat_ms", &gaps}}) {
            const Summary sum = summarize(*values);
            rec.push(p + stat + "_min", sum.min);
            rec.push(p + stat + "_max", sum.max);
            rec.push(p + stat + "_mean", sum.mean);
            rec.push(p + stat + "_std", sum.stddev);
        }
    }
    rec.shape = Shape::flat(rec.values.size());
    return rec;
}

FeatureRecord clumps(const flow::BiFlow& flow)
{
    std::vector<ClumpItem> items;
    items.reserve(flow.packets.size());
    for (const auto& p : flow.packets)
        items.push_back({p.direction, static_cast<double>(p.ip_size), p.rel_time});
    FeatureRecord rec = clump_features(items, "clump");
    rec.plugin = "clumps";
    return rec;
}

} // namespace netfeat::plugins
