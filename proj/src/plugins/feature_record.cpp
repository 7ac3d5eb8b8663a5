#include "netfeat/plugins/feature_record.hpp"

#include <charconv>
#include <stdexcept>

namespace netfeat::plugins {

std::size_t Shape::element_count() const
{
    if (dims.empty())
        return 0;
    std::size_t n = 1;
    for (auto d : dims)
        n *= d;
    return n;
}

std::string Shape::to_string() const
{
    std::string s = "(";
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i)
            s += ",";
        s += std::to_string(dims[i]);
    }
    return s + ")";
}

std::vector<double> FeatureRecord::numbers() const
{
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values)
        out.push_back(std::get<double>(v));
    return out;
}

std::size_t FeatureRecord::find(const std::string& name) const
{
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name)
            return i;
    return std::string::npos;
}

double FeatureRecord::number(const std::string& name) const
{
    const std::size_t i = find(name);
    if (i == std::string::npos)
        throw std::out_of_range("no feature named " + name + " in " + plugin);
    return number(i);
}

bool FeatureRecord::well_formed() const
{
    return names.size() == values.size() && shape.element_count() == values.size();
}

void FeatureRecord::push(std::string name, double value)
{
    names.push_back(std::move(name));
    values.emplace_back(value);
}

void FeatureRecord::push(std::string name, std::string value)
{
    names.push_back(std::move(name));
    values.emplace_back(std::move(value));
}

void append_dense(FeatureRecord& into, const FeatureRecord& part)
{
    for (std::size_t i = 0; i < part.values.size(); ++i) {
        double v = std::holds_alternative<double>(part.values[i]) ? std::get<double>(part.values[i]) : 0.0;
        if (is_undefined(v))
            v = 0.0;
        into.names.push_back(part.names[i]);
        into.values.emplace_back(v);
    }
    into.shape = Shape::flat(into.values.size());
}

std::string format_number(double v)
{
    if (is_undefined(v))
        return {};
    if (v == 0.0)
        return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace netfeat::plugins
