#include "netfeat/util/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace netfeat::util {

std::string trim(std::string_view s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<bool> parse_bool(std::string_view s)
{
    const std::string v = to_lower(trim(s));
    if (v == "true" || v == "yes" || v == "1" || v == "on")
        return true;
    if (v == "false" || v == "no" || v == "0" || v == "off")
        return false;
    return std::nullopt;
}

namespace {

// Reads a basic string starting at s[i] == '"'; returns the decoded text and
// leaves i after the closing quote.
std::optional<std::string> read_quoted(std::string_view s, std::size_t& i)
{
    std::string out;
    for (++i; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '"') {
            ++i;
            return out;
        }
        if (c == '\\') {
            if (++i >= s.size())
                return std::nullopt;
            switch (s[i]) {
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            case '\\': out += '\\'; break;
            case '"': out += '"'; break;
            default: return std::nullopt;
            }
        } else {
            out += c;
        }
    }
    return std::nullopt;
}

// Value text up to an unquoted '#'. Quoted scalars are decoded; lists and
// bare values are kept verbatim (trimmed) for split_list.
std::optional<std::string> read_value(std::string_view s)
{
    std::string raw;
    bool in_quote = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (in_quote && c == '\\' && i + 1 < s.size()) {
            raw += c;
            raw += s[++i];
            continue;
        }
        if (c == '"')
            in_quote = !in_quote;
        if (c == '#' && !in_quote)
            break;
        raw += c;
    }
    if (in_quote)
        return std::nullopt;
    raw = trim(raw);
    if (!raw.empty() && raw.front() == '"') {
        std::size_t i = 0;
        auto text = read_quoted(raw, i);
        if (text && trim(std::string_view(raw).substr(i)).empty())
            return text;
    }
    return raw;
}

bool valid_name(std::string_view name)
{
    if (name.empty())
        return false;
    return std::all_of(name.begin(), name.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

std::string quote(std::string_view s)
{
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    return out + "\"";
}

} // namespace

Config Config::parse(std::istream& in, const std::string& origin)
{
    Config cfg;
    std::string section;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text.front() == '#')
            continue;
        const auto fail = [&](const std::string& what) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + what);
        };
        if (text.front() == '[') {
            const auto close = text.find(']');
            if (close == std::string::npos)
                fail("unterminated section header");
            const std::string rest = trim(std::string_view(text).substr(close + 1));
            if (!rest.empty() && rest.front() != '#')
                fail("trailing text after section header");
            section = trim(std::string_view(text).substr(1, close - 1));
            if (!valid_name(section))
                fail("invalid section name '" + section + "'");
            if (std::find(cfg.section_order_.begin(), cfg.section_order_.end(), section) == cfg.section_order_.end())
                cfg.section_order_.push_back(section);
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            fail("expected 'key = value'");
        const std::string key = trim(std::string_view(text).substr(0, eq));
        if (!valid_name(key) || key.find('.') != std::string::npos)
            fail("invalid key '" + key + "'");
        if (cfg.get(section, key))
            fail("duplicate key '" + key + "'");
        const auto value = read_value(std::string_view(text).substr(eq + 1));
        if (!value)
            fail("malformed string value");
        cfg.set(section, key, *value);
    }
    return cfg;
}

Config Config::parse(std::string_view text, const std::string& origin)
{
    std::istringstream in{std::string(text)};
    return parse(in, origin);
}

Config Config::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path.string());
    return parse(in, path.string());
}

std::optional<std::string> Config::get(std::string_view section, std::string_view key) const
{
    for (const Entry& e : entries_)
        if (e.section == section && e.key == key)
            return e.value;
    return std::nullopt;
}

bool Config::has_section(std::string_view section) const
{
    return std::find(section_order_.begin(), section_order_.end(), section) != section_order_.end();
}

std::vector<std::string> Config::sections() const { return section_order_; }

std::vector<std::pair<std::string, std::string>> Config::entries(std::string_view section) const
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const Entry& e : entries_)
        if (e.section == section)
            out.emplace_back(e.key, e.value);
    return out;
}

void Config::set(std::string_view section, std::string_view key, std::string value)
{
    for (Entry& e : entries_) {
        if (e.section == section && e.key == key) {
            e.value = std::move(value);
            return;
        }
    }
    if (!has_section(section))
        section_order_.emplace_back(section);
    entries_.push_back({std::string(section), std::string(key), std::move(value)});
}

void Config::apply_override(std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw ConfigError("override must be 'section.key=value': " + std::string(assignment));
    const std::string name = trim(assignment.substr(0, eq));
    const auto dot = name.rfind('.');
    const std::string section = dot == std::string::npos ? std::string() : name.substr(0, dot);
    const std::string key = dot == std::string::npos ? name : name.substr(dot + 1);
    if (!valid_name(key) || (!section.empty() && !valid_name(section)))
        throw ConfigError("invalid override name: " + name);
    const auto value = read_value(assignment.substr(eq + 1));
    if (!value)
        throw ConfigError("malformed override value: " + std::string(assignment));
    set(section, key, *value);
}

std::string Config::canonical() const
{
    std::map<std::string, std::map<std::string, std::string>> sorted;
    for (const Entry& e : entries_)
        sorted[e.section][e.key] = e.value;
    std::string out;
    for (const auto& [section, keys] : sorted) {
        if (!section.empty())
            out += "[" + section + "]\n";
        for (const auto& [key, value] : keys)
            out += key + " = " + quote(value) + "\n";
    }
    return out;
}

std::vector<std::string> split_list(std::string_view value)
{
    std::string v = trim(value);
    if (v.size() >= 2 && v.front() == '[' && v.back() == ']')
        v = v.substr(1, v.size() - 2);
    std::vector<std::string> out;
    std::string item;
    bool quoted_item = false;
    const auto flush = [&] {
        std::string t = quoted_item ? item : trim(item);
        if (!t.empty())
            out.push_back(std::move(t));
        item.clear();
        quoted_item = false;
    };
    for (std::size_t i = 0; i < v.size();) {
        const char c = v[i];
        if (c == '"' && trim(item).empty()) {
            auto text = read_quoted(v, i);
            if (!text)
                throw ConfigError("malformed list value: " + std::string(value));
            item = *text;
            quoted_item = true;
            continue;
        }
        if (c == ',') {
            flush();
            ++i;
            continue;
        }
        if (!quoted_item)
            item += c;
        else if (!std::isspace(static_cast<unsigned char>(c)))
            throw ConfigError("malformed list value: " + std::string(value));
        ++i;
    }
    flush();
    return out;
}

} // namespace netfeat::util
