#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace netfeat::plugins {

/// Marker for a feature that has no value for this flow (e.g. a duration of a
/// single-packet flow). Serialised as an empty CSV field.
inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

inline bool is_undefined(double v) { return std::isnan(v); }

/// A feature is numeric except for a few text-valued ones (ASN description, JA3).
using FeatureValue = std::variant<double, std::string>;

/// Logical shape of a record's values; the product of dims equals the value count.
struct Shape {
    std::vector<std::size_t> dims;

    static Shape flat(std::size_t n) { return Shape{{n}}; }
    static Shape matrix(std::size_t rows, std::size_t cols) { return Shape{{rows, cols}}; }
    std::size_t element_count() const;
    std::string to_string() const;

    friend bool operator==(const Shape&, const Shape&) = default;
};

struct FeatureRecord {
    std::string plugin;
    std::vector<std::string> names;
    std::vector<FeatureValue> values;
    Shape shape;

    std::size_t size() const { return values.size(); }
    /// Numeric value at `i`; throws std::bad_variant_access for text features.
    double number(std::size_t i) const { return std::get<double>(values[i]); }
    const std::string& text(std::size_t i) const { return std::get<std::string>(values[i]); }
    /// All values as numbers; text features throw.
    std::vector<double> numbers() const;
    /// Index of a named feature, or npos.
    std::size_t find(const std::string& name) const;
    double number(const std::string& name) const;

    /// Names and values have equal length and the shape covers all values.
    bool well_formed() const;

    void push(std::string name, double value);
    void push(std::string name, std::string value);
};

/// Appends `part` to `into`, replacing undefined numbers by 0 and flattening the shape.
void append_dense(FeatureRecord& into, const FeatureRecord& part);

/// Formats a numeric value for CSV: shortest round-trip decimal, empty for undefined.
std::string format_number(double v);

} // namespace netfeat::plugins
