#pragma once

#include "netfeat/plugins/feature_record.hpp"

#include <cstddef>
#include <span>

namespace netfeat::plugins {

/// min/max/mean/population stddev of a sample. All four are undefined for an
/// empty sample; the stddev of a single value is 0.
struct Summary {
    std::size_t count = 0;
    double min = kUndefined;
    double max = kUndefined;
    double mean = kUndefined;
    double stddev = kUndefined;
};

Summary summarize(std::span<const double> values);

/// Median (mean of the two middle values for even counts); undefined when empty.
double median(std::span<const double> values);

} // namespace netfeat::plugins
