#include "netfeat/plugins/stats.hpp"

#include "netfeat/plugins/feature_record.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace netfeat::plugins {

Summary summarize(std::span<const double> values)
{
    Summary s{values.size(), kUndefined, kUndefined, kUndefined, kUndefined};
    if (values.empty())
        return s;
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values)
        sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values)
        sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
    return s;
}

double median(std::span<const double> values)
{
    if (values.empty())
        return kUndefined;
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    if (sorted.size() % 2 == 1)
        return sorted[mid];
    return (sorted[mid - 1] + sorted[mid]) / 2.0;
}

} // namespace netfeat::plugins
