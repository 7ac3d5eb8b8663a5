#include "netfeat/cli/pipeline_config.hpp"

#include <glob.h>

#include <algorithm>
#include <charconv>
#include <set>

namespace netfeat::cli {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kKnownSections = {"input", "labels", "flow", "output", "asn", "run", "analysis", "plugins"};

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"input", {"paths"}},
    {"labels", {"mode", "scheme", "root", "dimensions"}},
    {"flow", {"idle_timeout", "active_timeout", "close_linger", "max_packets", "max_flows", "stream_limit"}},
    {"output", {"dir"}},
    {"asn", {"db"}},
    {"run", {"parallelism"}},
    {"analysis", {"dimension", "per_file"}},
    {"plugins", {"list"}},
};

double positive_seconds(const util::Config& cfg, const std::string& key, double fallback)
{
    const auto v = cfg.get("flow", key);
    if (!v)
        return fallback;
    double out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size() || !(out > 0))
        throw FatalError("flow." + key + " must be a positive number of seconds, got '" + *v + "'");
    return out;
}

std::size_t count(const util::Config& cfg, const std::string& section, const std::string& key, std::size_t fallback,
                  std::size_t minimum)
{
    const auto v = cfg.get(section, key);
    if (!v)
        return fallback;
    std::size_t out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size() || out < minimum)
        throw FatalError(section + "." + key + " must be an integer >= " + std::to_string(minimum) + ", got '" + *v +
                         "'");
    return out;
}

fs::path resolve(const fs::path& base, const std::string& p)
{
    const fs::path path(p);
    return (path.is_absolute() ? path : base / path).lexically_normal();
}

bool has_glob_chars(const std::string& s) { return s.find_first_of("*?[") != std::string::npos; }

bool is_capture_file(const fs::path& p)
{
    const std::string ext = util::to_lower(p.extension().string());
    return ext == ".pcap" || ext == ".pcapng" || ext == ".cap";
}

} // namespace

PipelineConfig load_pipeline_config(const util::Config& cfg, const fs::path& base_dir, bool require_plugins)
{
    PipelineConfig out;
    out.base_dir = base_dir;

    for (const std::string& section : cfg.sections()) {
        if (section.empty()) {
            if (!cfg.entries("").empty())
                throw FatalError("config: keys must be inside a section");
            continue;
        }
        if (section.rfind("plugin.", 0) == 0)
            continue;
        if (!kKnownSections.contains(section))
            throw FatalError("config: unknown section [" + section + "]");
        for (const auto& [key, value] : cfg.entries(section))
            if (!kKnownKeys.at(section).contains(key))
                throw FatalError("config: unknown key " + section + "." + key);
    }

    if (const auto paths = cfg.get("input", "paths"))
        out.inputs = util::split_list(*paths);
    if (out.inputs.empty())
        throw FatalError("config: input.paths lists no inputs");

    const std::string mode = util::to_lower(cfg.get("labels", "mode").value_or("none"));
    if (mode == "none")
        out.label_mode = LabelMode::None;
    else if (mode == "filename")
        out.label_mode = LabelMode::Filename;
    else if (mode == "directory")
        out.label_mode = LabelMode::Directory;
    else
        throw FatalError("config: labels.mode must be filename, directory or none, got '" + mode + "'");
    if (const auto scheme = cfg.get("labels", "scheme")) {
        out.scheme_path = resolve(base_dir, *scheme);
        if (!fs::is_regular_file(out.scheme_path))
            throw FatalError("config: scheme file not found: " + out.scheme_path.string());
    }
    if (const auto root = cfg.get("labels", "root"))
        out.label_root = resolve(base_dir, *root);
    if (const auto dims = cfg.get("labels", "dimensions"))
        out.directory_dimensions = util::split_list(*dims);
    if (out.label_mode == LabelMode::Directory) {
        if (out.label_root.empty())
            throw FatalError("config: labels.root is required in directory mode");
        if (!fs::is_directory(out.label_root))
            throw FatalError("config: label root is not a directory: " + out.label_root.string());
    }

    out.flow.idle_timeout_s = positive_seconds(cfg, "idle_timeout", out.flow.idle_timeout_s);
    out.flow.active_timeout_s = positive_seconds(cfg, "active_timeout", out.flow.active_timeout_s);
    out.flow.close_linger_s = positive_seconds(cfg, "close_linger", out.flow.close_linger_s);
    out.flow.max_packets_per_flow = count(cfg, "flow", "max_packets", out.flow.max_packets_per_flow, 1);
    out.flow.max_flows = count(cfg, "flow", "max_flows", out.flow.max_flows, 1);
    out.flow.stream_limit_bytes = count(cfg, "flow", "stream_limit", out.flow.stream_limit_bytes, 0);

    const auto dir = cfg.get("output", "dir");
    if (!dir || dir->empty())
        throw FatalError("config: output.dir is required");
    out.output_dir = resolve(base_dir, *dir);

    if (const auto db = cfg.get("asn", "db")) {
        out.asn_db = resolve(base_dir, *db);
        if (!fs::is_regular_file(out.asn_db))
            throw FatalError("config: ASN database not found: " + out.asn_db.string());
    }

    out.parallelism = count(cfg, "run", "parallelism", 1, 1);
    out.analysis_dimension = cfg.get("analysis", "dimension").value_or("");
    if (const auto per_file = cfg.get("analysis", "per_file")) {
        const auto b = util::parse_bool(*per_file);
        if (!b)
            throw FatalError("config: analysis.per_file must be a boolean");
        out.per_file_stats = *b;
    }

    std::set<std::string> seen;
    if (const auto list = cfg.get("plugins", "list")) {
        for (const std::string& instance : util::split_list(*list)) {
            if (!seen.insert(instance).second)
                throw FatalError("config: plugin '" + instance + "' listed twice");
            PluginSpec spec;
            spec.instance = instance;
            spec.type = instance;
            for (const auto& [key, value] : cfg.entries("plugin." + instance)) {
                if (key == "type")
                    spec.type = value;
                else
                    spec.params[key] = value;
            }
            out.plugins.push_back(std::move(spec));
        }
    }
    for (const std::string& section : cfg.sections())
        if (section.rfind("plugin.", 0) == 0 && !seen.contains(section.substr(7)))
            throw FatalError("config: [" + section + "] configures a plugin that is not in plugins.list");
    if (require_plugins && out.plugins.empty())
        throw FatalError("config: plugins.list must name at least one plugin");

    util::Config hashed = cfg;
    hashed.set("run", "parallelism", "");
    out.canonical = hashed.canonical();
    return out;
}

PipelineConfig load_pipeline_config_file(const fs::path& path, const std::vector<std::string>& overrides,
                                         bool require_plugins)
{
    try {
        util::Config cfg = util::Config::load(path);
        for (const std::string& o : overrides)
            cfg.apply_override(o);
        return load_pipeline_config(cfg, fs::absolute(path).parent_path(), require_plugins);
    } catch (const util::ConfigError& e) {
        throw FatalError(e.what());
    }
}

std::vector<fs::path> resolve_inputs(const PipelineConfig& config)
{
    std::set<fs::path> files;
    const auto add_dir = [&](const fs::path& dir) {
        for (const auto& entry : fs::recursive_directory_iterator(dir))
            if (entry.is_regular_file() && is_capture_file(entry.path()))
                files.insert(entry.path().lexically_normal());
    };
    for (const std::string& input : config.inputs) {
        const fs::path p = resolve(config.base_dir, input);
        if (has_glob_chars(input)) {
            glob_t g{};
            const int rc = ::glob(p.c_str(), 0, nullptr, &g);
            if (rc == 0) {
                for (std::size_t i = 0; i < g.gl_pathc; ++i) {
                    const fs::path match(g.gl_pathv[i]);
                    if (fs::is_directory(match))
                        add_dir(match);
                    else
                        files.insert(match.lexically_normal());
                }
            }
            globfree(&g);
            if (rc != 0 && rc != GLOB_NOMATCH)
                throw FatalError("input: cannot expand glob " + input);
            continue;
        }
        if (fs::is_directory(p))
            add_dir(p);
        else if (fs::exists(p))
            files.insert(p);
        else
            throw FatalError("input not found: " + p.string());
    }
    return {files.begin(), files.end()};
}

} // namespace netfeat::cli
