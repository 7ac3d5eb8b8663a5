#include "netfeat/labeling/labels.hpp"

#include <algorithm>
#include <cctype>

namespace netfeat::labeling {

namespace fs = std::filesystem;

std::optional<std::string> LabelSet::get(std::string_view dimension) const
{
    for (const auto& [dim, token] : labels)
        if (dim == dimension)
            return token;
    return std::nullopt;
}

bool LabelSet::set(std::string dimension, std::string token)
{
    if (get(dimension))
        return false;
    labels.emplace_back(std::move(dimension), std::move(token));
    return true;
}

const Dimension* NamingScheme::find(std::string_view name) const
{
    for (const Dimension& d : dimensions)
        if (d.name == name)
            return &d;
    return nullptr;
}

namespace {

NamingScheme build_iscx()
{
    const auto dim = [](std::string name, std::vector<std::pair<std::string, std::vector<std::string>>> groups,
                        std::optional<std::string> def = std::nullopt) {
        Dimension d{std::move(name), {}, std::move(def)};
        for (const auto& [label, tokens] : groups) {
            d.tokens[label] = label;
            for (const auto& t : tokens)
                d.tokens[t] = label;
        }
        return d;
    };

    NamingScheme s;
    s.dimensions.push_back(dim("encapsulation", {{"vpn", {}}, {"nonvpn", {"novpn"}}}, "nonvpn"));
    s.dimensions.push_back(dim("app", {
                                          {"aim", {"aimchat"}},
                                          {"bittorrent", {"torrent"}},
                                          {"email", {}},
                                          {"facebook", {"facebookchat"}},
                                          {"ftps", {}},
                                          {"gmail", {"gmailchat"}},
                                          {"hangouts", {"hangout"}},
                                          {"icq", {"icqchat"}},
                                          {"netflix", {}},
                                          {"scp", {"scpdown", "scpup"}},
                                          {"sftp", {"sftpdown", "sftpup"}},
                                          {"skype", {}},
                                          {"spotify", {}},
                                          {"vimeo", {}},
                                          {"voipbuster", {}},
                                          {"youtube", {"youtubehtml5"}},
                                      }));
    s.dimensions.push_back(dim("traffic", {
                                              {"audio", {"voip", "voipbuster"}},
                                              {"chat", {"aimchat", "facebookchat", "gmailchat", "icqchat"}},
                                              {"email", {}},
                                              {"filetransfer",
                                               {"file", "files", "ftps", "sftp", "scp", "down", "up", "scpdown",
                                                "scpup", "sftpdown", "sftpup"}},
                                              {"p2p", {"torrent", "bittorrent"}},
                                              {"streaming", {"netflix", "spotify", "vimeo", "youtube", "youtubehtml5"}},
                                              {"video", {}},
                                          }));
    return s;
}

bool is_capture_extension(const std::string& ext)
{
    static const std::vector<std::string> known = {".pcap", ".pcapng", ".cap", ".gz", ".dmp"};
    return std::find(known.begin(), known.end(), ext) != known.end();
}

} // namespace

const NamingScheme& iscx_scheme()
{
    static const NamingScheme scheme = build_iscx();
    return scheme;
}

NamingScheme parse_scheme(const util::Config& config)
{
    NamingScheme scheme;
    const auto dims = config.get("scheme", "dimensions");
    if (!dims)
        throw LabelError("scheme: missing [scheme] dimensions");
    for (const std::string& name : util::split_list(*dims)) {
        if (scheme.find(name))
            throw LabelError("scheme: duplicate dimension '" + name + "'");
        scheme.dimensions.push_back({name, {}, std::nullopt});
    }
    if (const auto sep = config.get("scheme", "separators"))
        scheme.separators = *sep;
    if (const auto strip = config.get("scheme", "strip_trailing")) {
        const auto b = util::parse_bool(*strip);
        if (!b)
            throw LabelError("scheme: strip_trailing must be a boolean");
        scheme.strip_trailing = *b;
    }
    for (const auto& [key, value] : config.entries("scheme"))
        if (key != "dimensions" && key != "separators" && key != "strip_trailing")
            throw LabelError("scheme: unknown key '" + key + "' in [scheme]");

    const auto dimension = [&](const std::string& name) -> Dimension& {
        for (Dimension& d : scheme.dimensions)
            if (d.name == name)
                return d;
        throw LabelError("scheme: unknown dimension '" + name + "'");
    };
    for (const auto& [name, value] : config.entries("defaults"))
        dimension(name).default_label = util::to_lower(util::trim(value));

    for (const std::string& section : config.sections()) {
        if (section.rfind("tokens.", 0) == 0) {
            Dimension& d = dimension(section.substr(7));
            for (const auto& [label_raw, value] : config.entries(section)) {
                const std::string label = util::to_lower(label_raw);
                auto tokens = util::split_list(value);
                tokens.push_back(label);
                for (const std::string& raw : tokens) {
                    const std::string token = util::to_lower(raw);
                    const auto [it, inserted] = d.tokens.emplace(token, label);
                    if (!inserted && it->second != label)
                        throw LabelError("scheme: token '" + token + "' maps to both '" + it->second + "' and '" +
                                         label + "' in dimension " + d.name);
                }
            }
        } else if (!section.empty() && section != "scheme" && section != "defaults") {
            throw LabelError("scheme: unknown section [" + section + "]");
        }
    }
    return scheme;
}

NamingScheme load_scheme(const fs::path& path)
{
    try {
        return parse_scheme(util::Config::load(path));
    } catch (const util::ConfigError& e) {
        throw LabelError(e.what());
    }
}

std::vector<std::string> filename_tokens(std::string_view name, std::string_view separators)
{
    fs::path p{std::string(name)};
    std::string file = p.filename().string();
    for (;;) {
        const auto dot = file.rfind('.');
        if (dot == std::string::npos || dot == 0 || !is_capture_extension(util::to_lower(file.substr(dot))))
            break;
        file.resize(dot);
    }
    file = util::to_lower(file);

    std::vector<std::string> tokens;
    std::string cur;
    for (char c : file) {
        if (separators.find(c) != std::string_view::npos) {
            if (!cur.empty())
                tokens.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty())
        tokens.push_back(std::move(cur));
    return tokens;
}

std::string strip_trailing_index(std::string_view token)
{
    std::size_t end = token.size();
    if (end > 0 && std::isalpha(static_cast<unsigned char>(token[end - 1])) && end >= 2 &&
        std::isdigit(static_cast<unsigned char>(token[end - 2])))
        --end;
    std::size_t digits_start = end;
    while (digits_start > 0 && std::isdigit(static_cast<unsigned char>(token[digits_start - 1])))
        --digits_start;
    if (digits_start == end)
        return std::string(token);
    return std::string(token.substr(0, digits_start));
}

LabelSet labels_from_filename(std::string_view name, const NamingScheme& scheme)
{
    if (name.empty())
        throw LabelError("empty file name");
    LabelSet found;
    for (const std::string& token : filename_tokens(name, scheme.separators)) {
        std::vector<std::string> candidates = {token};
        if (scheme.strip_trailing) {
            std::string stripped = strip_trailing_index(token);
            if (stripped.empty())
                continue; // pure index such as "2b"
            if (stripped != token)
                candidates.push_back(std::move(stripped));
        }
        bool matched = false;
        for (const std::string& candidate : candidates) {
            for (const Dimension& d : scheme.dimensions) {
                const auto it = d.tokens.find(candidate);
                if (it == d.tokens.end())
                    continue;
                matched = true;
                found.set(d.name, it->second);
            }
            if (matched)
                break;
        }
        if (!matched)
            found.unmatched.push_back(token);
    }

    LabelSet out;
    out.unmatched = std::move(found.unmatched);
    for (const Dimension& d : scheme.dimensions) {
        if (auto token = found.get(d.name))
            out.set(d.name, *token);
        else if (d.default_label)
            out.set(d.name, *d.default_label);
    }
    return out;
}

LabelSet labels_from_directory(const fs::path& file, const fs::path& root,
                               const std::vector<std::string>& dimension_names)
{
    const fs::path f = fs::absolute(file).lexically_normal();
    const fs::path r = fs::absolute(root).lexically_normal();
    const fs::path rel = f.lexically_relative(r);
    if (rel.empty() || *rel.begin() == ".." || rel == ".")
        throw LabelError("file " + file.string() + " is not under root " + root.string());

    std::vector<std::string> parts;
    for (const auto& part : rel)
        if (!part.empty())
            parts.push_back(part.string());
    parts.pop_back(); // the file itself

    LabelSet out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        std::string dim = i < dimension_names.size() ? dimension_names[i] : "dir_" + std::to_string(i);
        out.set(std::move(dim), util::to_lower(parts[i]));
    }
    return out;
}

} // namespace netfeat::labeling
