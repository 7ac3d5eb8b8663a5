#include "netfeat/plugins/flowpic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace netfeat::plugins {

std::uint64_t FlowPicHistogram::total() const
{
    std::uint64_t sum = 0;
    for (const auto& [cell, count] : cells)
        sum += count;
    return sum;
}

std::uint64_t FlowPicHistogram::at(std::size_t size_bin, std::size_t time_bin) const
{
    auto it = cells.find({size_bin, time_bin});
    return it == cells.end() ? 0 : it->second;
}

std::vector<double> FlowPicHistogram::dense() const
{
    std::vector<double> grid(size_bins * time_bins, 0.0);
    for (const auto& [cell, count] : cells)
        grid[cell.first * time_bins + cell.second] = static_cast<double>(count);
    return grid;
}

std::size_t flowpic_size_bin(std::uint32_t ip_size, const FlowPicConfig& config)
{
    const std::uint64_t clamped = std::min(ip_size, config.size_max);
    if (config.size_max == 0)
        return 0;
    const std::uint64_t bin = clamped * config.size_bins / config.size_max;
    return static_cast<std::size_t>(std::min<std::uint64_t>(bin, config.size_bins - 1));
}

std::size_t flowpic_time_bin(double offset_in_window, const FlowPicConfig& config)
{
    const double scaled = std::floor(offset_in_window / config.window_seconds * static_cast<double>(config.time_bins));
    if (scaled <= 0.0)
        return 0;
    return std::min(static_cast<std::size_t>(scaled), config.time_bins - 1);
}

std::vector<FlowPicHistogram> flowpic(const flow::BiFlow& flow, const FlowPicConfig& config)
{
    if (!(config.window_seconds > 0.0) || config.size_bins == 0 || config.time_bins == 0)
        throw std::invalid_argument("flowpic needs a positive window and at least one bin per axis");

    std::map<std::size_t, FlowPicHistogram> windows;
    for (const auto& p : flow.packets) {
        const auto index = static_cast<std::size_t>(std::floor(p.rel_time / config.window_seconds));
        auto [it, inserted] = windows.try_emplace(index);
        FlowPicHistogram& h = it->second;
        if (inserted) {
            h.window_index = index;
            h.size_bins = config.size_bins;
            h.time_bins = config.time_bins;
            h.size_range = config.size_max;
            h.window_seconds = config.window_seconds;
        }
        const double offset = p.rel_time - static_cast<double>(index) * config.window_seconds;
        ++h.cells[{flowpic_size_bin(p.ip_size, config), flowpic_time_bin(offset, config)}];
    }

    std::vector<FlowPicHistogram> out;
    out.reserve(windows.size());
    for (auto& [index, h] : windows)
        out.push_back(std::move(h));
    return out;
}

} // namespace netfeat::plugins
