#include "netfeat/plugins/stnn.hpp"

#include "netfeat/plugins/stats.hpp"

#include <string>
#include <vector>

namespace netfeat::plugins {

namespace {

double or_zero(double v) { return is_undefined(v) ? 0.0 : v; }

} // namespace

FeatureRecord stnn_features(const flow::BiFlow& flow, std::size_t small_threshold)
{
    FeatureRecord rec;
    rec.plugin = "stnn";
    rec.shape = Shape::matrix(kStnnCategories.size(), kStnnStatistics.size());
    const double flow_packets = static_cast<double>(flow.packets.size());

    for (std::size_t cat = 0; cat < kStnnCategories.size(); ++cat) {
        std::vector<double> sizes;
        std::vector<double> times;
        for (const auto& p : flow.packets) {
            bool member = true;
            switch (cat) {
            case 1:
                member = p.direction == flow::Direction::Forward;
                break;
            case 2:
                member = p.direction == flow::Direction::Backward;
                break;
            case 3:
                member = p.payload_size <= small_threshold;
                break;
            case 4:
                member = p.payload_size > small_threshold;
                break;
            default:
                break;
            }
            if (member) {
                sizes.push_back(static_cast<double>(p.ip_size));
                times.push_back(p.rel_time);
            }
        }

        std::vector<double> iats;
        for (std::size_t i = 1; i < times.size(); ++i)
            iats.push_back((times[i] - times[i - 1]) * 1000.0);

        const Summary size = summarize(sizes);
        const Summary iat = summarize(iats);
        double bytes = 0.0;
        for (double s : sizes)
            bytes += s;
        const double count = static_cast<double>(sizes.size());
        const double duration = times.size() >= 2 ? times.back() - times.front() : 0.0;

        const double row[14] = {
            count,
            bytes,
            or_zero(size.min),
            or_zero(size.max),
            or_zero(size.mean),
            or_zero(size.stddev),
            or_zero(iat.min),
            or_zero(iat.max),
            or_zero(iat.mean),
            or_zero(iat.stddev),
            duration,
            duration > 0.0 ? bytes / duration : 0.0,
            duration > 0.0 ? count / duration : 0.0,
            flow_packets > 0.0 ? count / flow_packets : 0.0,
        };
        const std::string prefix = "stnn_" + std::string(kStnnCategories[cat]) + "_";
        for (std::size_t s = 0; s < kStnnStatistics.size(); ++s)
            rec.push(prefix + std::string(kStnnStatistics[s]), row[s]);
    }
    return rec;
}

} // namespace netfeat::plugins
