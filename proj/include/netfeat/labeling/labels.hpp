#pragma once

#include "netfeat/util/config.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace netfeat::labeling {

class LabelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ordered dimension -> token pairs, plus tokens that matched nothing.
struct LabelSet {
    std::vector<std::pair<std::string, std::string>> labels;
    std::vector<std::string> unmatched;

    std::optional<std::string> get(std::string_view dimension) const;
    /// Adds a dimension; an existing dimension is left unchanged and false returned.
    bool set(std::string dimension, std::string token);
    bool empty() const { return labels.empty(); }
    std::size_t size() const { return labels.size(); }

    friend bool operator==(const LabelSet&, const LabelSet&) = default;
};

struct Dimension {
    std::string name;
    /// token -> canonical label.
    std::map<std::string, std::string> tokens;
    std::optional<std::string> default_label;
};

/// Tokens are looked up left to right. A token is tried verbatim first, then
/// with a trailing `[0-9]+[a-z]?` removed ("video2b" -> "video"). It fills
/// every dimension whose dictionary holds it and that is still empty, in
/// dimension order.
struct NamingScheme {
    std::vector<Dimension> dimensions;
    std::string separators = "_-.";
    bool strip_trailing = true;

    const Dimension* find(std::string_view name) const;
};

/// Built-in ISCX VPN/NonVPN 2016 scheme: encapsulation (default nonvpn), app, traffic.
const NamingScheme& iscx_scheme();

/// Scheme file layout (util::Config syntax):
///
///   [scheme]
///   dimensions = [encapsulation, app, traffic]
///   separators = "_-."          # optional
///   strip_trailing = true       # optional
///   [defaults]
///   encapsulation = nonvpn
///   [tokens.app]
///   facebook = [facebook, fb]   # canonical label = tokens that map to it
///
/// Throws LabelError for unknown dimensions or a token claimed twice within one dimension.
NamingScheme parse_scheme(const util::Config& config);
NamingScheme load_scheme(const std::filesystem::path& path);

/// Lower-cased stem tokens of a file name (directories and capture
/// extensions such as .pcap/.pcapng/.cap/.gz removed).
std::vector<std::string> filename_tokens(std::string_view name, std::string_view separators);

/// Removes one trailing `[0-9]+[a-z]?` group; "2b" -> "", "video2b" -> "video".
std::string strip_trailing_index(std::string_view token);

/// Throws LabelError for an empty name.
LabelSet labels_from_filename(std::string_view name, const NamingScheme& scheme);

/// One label per directory between `root` and the file, outermost first.
/// Dimensions are named from `dimension_names`, then dir_<i>. Tokens are
/// lower-cased. Throws LabelError when the file is not under root.
LabelSet labels_from_directory(const std::filesystem::path& file, const std::filesystem::path& root,
                               const std::vector<std::string>& dimension_names = {});

} // namespace netfeat::labeling
