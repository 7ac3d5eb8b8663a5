#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace netfeat::util {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sectioned key/value text in a TOML subset:
///
///   # comment
///   top = 1
///   [section.name]
///   key = value            bare value, trimmed
///   key = "quoted \"x\""    basic string with \\ \" \t \n escapes
///   key = [a, "b", c]      list (also accepted without brackets)
///
/// Values are kept as text; callers convert. Keys keep file order.
class Config {
public:
    struct Entry {
        std::string section;
        std::string key;
        std::string value;
    };

    static Config parse(std::istream& in, const std::string& origin = "<config>");
    static Config parse(std::string_view text, const std::string& origin = "<config>");
    static Config load(const std::filesystem::path& path);

    std::optional<std::string> get(std::string_view section, std::string_view key) const;
    bool has_section(std::string_view section) const;
    /// Section names in first-appearance order ("" is the top level).
    std::vector<std::string> sections() const;
    /// Entries of one section, file order.
    std::vector<std::pair<std::string, std::string>> entries(std::string_view section) const;
    const std::vector<Entry>& all() const { return entries_; }

    /// Sets or replaces a value.
    void set(std::string_view section, std::string_view key, std::string value);
    /// Applies "section.key=value"; the key is the part after the last dot.
    /// A dotless name addresses the top level.
    void apply_override(std::string_view assignment);

    /// Canonical text: sections sorted, keys sorted within each, values quoted.
    /// Two configs with equal content serialise identically.
    std::string canonical() const;

private:
    std::vector<Entry> entries_;
    std::vector<std::string> section_order_;
};

/// Splits a list value: optional surrounding brackets, comma separated,
/// items trimmed and unquoted, empty items dropped.
std::vector<std::string> split_list(std::string_view value);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Parses "true/false/yes/no/1/0" (case-insensitive).
std::optional<bool> parse_bool(std::string_view s);

} // namespace netfeat::util
