#include "netfeat/cli/commands.hpp"

#include "netfeat/analysis/dataset_stats.hpp"
#include "netfeat/capture/reader.hpp"
#include "netfeat/evaluation/metrics.hpp"
#include "netfeat/flow/capture_flows.hpp"
#include "netfeat/plugins/flowpic.hpp"
#include "netfeat/util/csv.hpp"
#include "netfeat/util/hash.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

namespace netfeat::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string display_name(const fs::path& file, const fs::path& base)
{
    const fs::path rel = file.lexically_relative(base);
    if (!rel.empty() && *rel.begin() != "..")
        return rel.generic_string();
    return file.generic_string();
}

std::string format_ts(capture::Timestamp ts)
{
    const std::int64_t sec = ts.micros >= 0 ? ts.micros / 1'000'000 : -((-ts.micros + 999'999) / 1'000'000);
    const std::int64_t frac = ts.micros - sec * 1'000'000;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%" PRId64 ".%06" PRId64, sec, frac);
    return buf;
}

std::string flow_id(const std::string& source, const flow::BiFlow& f)
{
    const std::string text = source + "\n" + f.key.ip_lo.to_string() + "," + std::to_string(f.key.port_lo) + "," +
                             f.key.ip_hi.to_string() + "," + std::to_string(f.key.port_hi) + "," +
                             std::to_string(f.key.protocol) + "\n" + std::to_string(f.first_ts.micros);
    return util::sha256_hex(text).substr(0, 16);
}

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw FatalError("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw FatalError("cannot write " + path.string());
    return out;
}

struct Labeler {
    LabelMode mode = LabelMode::None;
    labeling::NamingScheme scheme;
    fs::path root;
    std::vector<std::string> dims;

    explicit Labeler(const PipelineConfig& cfg) : mode(cfg.label_mode), root(cfg.label_root), dims(cfg.directory_dimensions)
    {
        if (mode == LabelMode::Filename)
            scheme = cfg.scheme_path.empty() ? labeling::iscx_scheme() : labeling::load_scheme(cfg.scheme_path);
    }

    labeling::LabelSet operator()(const fs::path& file) const
    {
        switch (mode) {
        case LabelMode::Filename: return labeling::labels_from_filename(file.filename().string(), scheme);
        case LabelMode::Directory: return labeling::labels_from_directory(file, root, dims);
        case LabelMode::None: break;
        }
        return {};
    }

    std::string default_dimension() const
    {
        if (mode == LabelMode::Filename && !scheme.dimensions.empty())
            return scheme.dimensions.front().name;
        if (mode == LabelMode::Directory)
            return dims.empty() ? "dir_0" : dims.front();
        return {};
    }
};

/// Per-file result of the shared capture -> flow stage.
template <class Item>
struct FileOutcome {
    fs::path path;
    std::string display;
    bool ok = true;
    std::string error;
    flow::CaptureStats stats;
    labeling::LabelSet labels;
    std::vector<Item> items;
};

/// Runs `make(flow, labels, display)` for every flow of every file, using up
/// to config.parallelism threads. Items of each file are ordered by flow
/// start (emission order on ties); files keep the input order.
template <class Item, class Make>
std::vector<FileOutcome<Item>> run_files(const PipelineConfig& config, const std::vector<fs::path>& files,
                                         const Labeler& labeler, Make make)
{
    std::vector<FileOutcome<Item>> out(files.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    const auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= files.size())
                return;
            FileOutcome<Item>& o = out[i];
            o.path = files[i];
            o.display = display_name(files[i], config.base_dir);
            try {
                o.labels = labeler(files[i]);
                std::vector<std::pair<std::int64_t, Item>> items;
                o.stats = flow::process_capture(files[i], config.flow, o.display, [&](flow::BiFlow&& f) {
                    const std::int64_t start = f.first_ts.micros;
                    items.emplace_back(start, make(f, o.labels, o.display));
                });
                std::stable_sort(items.begin(), items.end(),
                                 [](const auto& a, const auto& b) { return a.first < b.first; });
                o.items.reserve(items.size());
                for (auto& [start, item] : items)
                    o.items.push_back(std::move(item));
            } catch (const capture::CaptureError& e) {
                o.ok = false;
                o.error = e.what();
                o.items.clear();
            } catch (const labeling::LabelError& e) {
                o.ok = false;
                o.error = e.what();
                o.items.clear();
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                return;
            }
        }
    };

    const std::size_t threads = std::max<std::size_t>(1, std::min(config.parallelism, files.size()));
    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(work);
        for (auto& th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);
    return out;
}

template <class Item>
json inputs_json(const std::vector<FileOutcome<Item>>& outcomes)
{
    json arr = json::array();
    for (const auto& o : outcomes) {
        json j;
        j["file"] = o.display;
        j["status"] = o.ok ? "ok" : "error";
        if (!o.ok)
            j["error"] = o.error;
        j["records"] = o.stats.records;
        j["decoded_packets"] = o.stats.decoded;
        j["skipped"] = json::object();
        for (const auto& [reason, n] : o.stats.skipped)
            j["skipped"][reason] = n;
        j["flows"] = o.ok ? o.items.size() : 0;
        j["labels"] = json::object();
        for (const auto& [dim, token] : o.labels.labels)
            j["labels"][dim] = token;
        j["unmatched_tokens"] = o.labels.unmatched;
        j["warnings"] = o.stats.warnings;
        arr.push_back(std::move(j));
    }
    return arr;
}

template <class Item>
std::size_t report_failures(const std::vector<FileOutcome<Item>>& outcomes, std::ostream& log)
{
    std::size_t failed = 0;
    for (const auto& o : outcomes) {
        if (!o.ok) {
            ++failed;
            log << "error: " << o.display << ": " << o.error << "\n";
        }
        for (const auto& w : o.stats.warnings)
            log << "warning: " << o.display << ": " << w << "\n";
    }
    return failed;
}

std::unique_ptr<plugins::AsnDatabase> load_asn(const PipelineConfig& config)
{
    if (config.asn_db.empty())
        return nullptr;
    try {
        return std::make_unique<plugins::AsnDatabase>(plugins::AsnDatabase::load(config.asn_db));
    } catch (const plugins::AsnDatabaseError& e) {
        throw FatalError(e.what());
    }
}

struct ExtractRow {
    std::vector<std::string> cells; // meta + features; labels are added per file
    /// Per flowpic instance: the flow's histograms.
    std::vector<std::vector<plugins::FlowPicHistogram>> flowpics;
    std::string id;
};

void write_flowpic_cell_file(const fs::path& path, const plugins::FlowPicHistogram& h)
{
    std::ofstream out = open_out(path);
    out << "row,col,count\n";
    for (const auto& [cell, n] : h.cells)
        out << cell.first << ',' << cell.second << ',' << n << '\n';
}

} // namespace

int cmd_extract(const PipelineConfig& config, std::ostream& log)
{
    const auto asn_db = load_asn(config);
    plugins::PluginContext ctx{asn_db.get()};

    struct Instance {
        const PluginSpec* spec;
        std::unique_ptr<plugins::FeaturePlugin> plugin;
        std::vector<std::string> columns;
        std::optional<plugins::FlowPicConfig> flowpic;
    };
    std::vector<Instance> instances;
    std::set<std::string> used = {"flow_id", "source_file", "src_ip",   "src_port", "dst_ip",    "dst_port",
                                  "protocol", "first_ts",   "last_ts", "packets",  "end_reason"};
    try {
        for (const PluginSpec& spec : config.plugins) {
            Instance inst{&spec, plugins::make_plugin(spec.type, spec.params, ctx), {}, std::nullopt};
            if (spec.type == "flowpic")
                inst.flowpic = plugins::flowpic_config_from_params(spec.params);
            const auto& names = inst.plugin->feature_names();
            const bool clash = std::any_of(names.begin(), names.end(), [&](const auto& n) { return used.contains(n); });
            for (const auto& n : names) {
                std::string col = clash ? spec.instance + "." + n : n;
                if (!used.insert(col).second)
                    throw FatalError("duplicate feature column '" + col + "' from plugin " + spec.instance);
                inst.columns.push_back(std::move(col));
            }
            instances.push_back(std::move(inst));
        }
    } catch (const plugins::PluginConfigError& e) {
        throw FatalError(e.what());
    }

    const Labeler labeler(config);
    const auto files = resolve_inputs(config);

    const auto outcomes = run_files<ExtractRow>(
        config, files, labeler,
        [&](const flow::BiFlow& f, const labeling::LabelSet&, const std::string& display) {
            ExtractRow row;
            row.id = flow_id(display, f);
            row.cells = {row.id,
                         display,
                         f.src_ip().to_string(),
                         std::to_string(f.src_port()),
                         f.dst_ip().to_string(),
                         std::to_string(f.dst_port()),
                         std::to_string(f.protocol()),
                         format_ts(f.first_ts),
                         format_ts(f.last_ts),
                         std::to_string(f.packets.size()),
                         std::string(flow::to_string(f.end_reason))};
            for (const Instance& inst : instances) {
                const plugins::FeatureRecord rec = inst.plugin->extract(f);
                for (const auto& v : rec.values) {
                    if (const double* d = std::get_if<double>(&v))
                        row.cells.push_back(plugins::format_number(*d));
                    else
                        row.cells.push_back(std::get<std::string>(v));
                }
                if (inst.flowpic)
                    row.flowpics.push_back(plugins::flowpic(f, *inst.flowpic));
            }
            return row;
        });

    // Label columns: scheme dimensions, or directory depth.
    std::vector<std::string> label_dims;
    if (config.label_mode == LabelMode::Filename) {
        for (const auto& d : labeler.scheme.dimensions)
            label_dims.push_back(d.name);
    } else if (config.label_mode == LabelMode::Directory) {
        std::size_t depth = config.directory_dimensions.size();
        for (const auto& o : outcomes)
            depth = std::max(depth, o.labels.size());
        for (std::size_t i = 0; i < depth; ++i)
            label_dims.push_back(i < config.directory_dimensions.size() ? config.directory_dimensions[i]
                                                                        : "dir_" + std::to_string(i));
    }

    ensure_dir(config.output_dir);
    std::vector<std::string> header = {"flow_id",  "source_file", "src_ip",  "src_port", "dst_ip",    "dst_port",
                                       "protocol", "first_ts",    "last_ts", "packets",  "end_reason"};
    const std::size_t meta = header.size();
    for (const auto& d : label_dims)
        header.push_back("label_" + d);
    std::size_t feature_columns = 0;
    for (const auto& inst : instances) {
        header.insert(header.end(), inst.columns.begin(), inst.columns.end());
        feature_columns += inst.columns.size();
    }

    std::size_t rows = 0;
    {
        std::ofstream csv = open_out(config.output_dir / "features.csv");
        util::write_csv_row(csv, header);
        std::vector<std::string> line;
        for (const auto& o : outcomes) {
            std::vector<std::string> label_cells;
            for (const auto& d : label_dims)
                label_cells.push_back(o.labels.get(d).value_or(""));
            for (const ExtractRow& r : o.items) {
                line.assign(r.cells.begin(), r.cells.begin() + static_cast<std::ptrdiff_t>(meta));
                line.insert(line.end(), label_cells.begin(), label_cells.end());
                line.insert(line.end(), r.cells.begin() + static_cast<std::ptrdiff_t>(meta), r.cells.end());
                util::write_csv_row(csv, line);
                ++rows;
            }
        }
        if (!csv)
            throw FatalError("error writing features.csv");
    }

    json flowpic_outputs = json::array();
    std::size_t fp_index = 0;
    for (const Instance& inst : instances) {
        if (!inst.flowpic)
            continue;
        const fs::path dir = config.output_dir / "flowpic" / inst.spec->instance;
        if (fs::exists(dir / "manifest.json"))
            fs::remove_all(dir);
        ensure_dir(dir);
        json windows = json::array();
        for (const auto& o : outcomes) {
            for (const ExtractRow& r : o.items) {
                for (const auto& h : r.flowpics[fp_index]) {
                    const std::string name = r.id + "_w" + std::to_string(h.window_index) + ".csv";
                    write_flowpic_cell_file(dir / name, h);
                    windows.push_back({{"flow_id", r.id}, {"window", h.window_index}, {"file", name},
                                       {"packets", h.total()}});
                }
            }
        }
        json m;
        m["instance"] = inst.spec->instance;
        m["rows"] = "size_bin";
        m["cols"] = "time_bin";
        m["size_bins"] = inst.flowpic->size_bins;
        m["time_bins"] = inst.flowpic->time_bins;
        m["size_max"] = inst.flowpic->size_max;
        m["window_seconds"] = inst.flowpic->window_seconds;
        m["windows"] = std::move(windows);
        std::ofstream(dir / "manifest.json", std::ios::binary | std::ios::trunc) << m.dump(2) << "\n";
        flowpic_outputs.push_back("flowpic/" + inst.spec->instance + "/manifest.json");
        ++fp_index;
    }

    const std::size_t failed = report_failures(outcomes, log);
    std::uint64_t records = 0;
    std::uint64_t decoded = 0;
    for (const auto& o : outcomes) {
        records += o.stats.records;
        decoded += o.stats.decoded;
    }

    json manifest;
    manifest["tool"] = "netfeat";
    manifest["version"] = kVersion;
    manifest["command"] = "extract";
    manifest["config_hash"] = util::sha256_hex(config.canonical);
    manifest["config"] = config.canonical;
    manifest["inputs"] = inputs_json(outcomes);
    json plugin_list = json::array();
    for (const Instance& inst : instances) {
        json p;
        p["instance"] = inst.spec->instance;
        p["type"] = inst.spec->type;
        p["params"] = inst.spec->params;
        p["features"] = inst.columns.size();
        p["shape"] = inst.plugin->shape().dims;
        plugin_list.push_back(std::move(p));
    }
    manifest["plugins"] = std::move(plugin_list);
    manifest["counts"] = {{"files", outcomes.size()},  {"failed_files", failed},
                          {"records", records},        {"decoded_packets", decoded},
                          {"flows", rows},             {"columns", header.size()},
                          {"feature_columns", feature_columns}};
    manifest["outputs"] = {{"features", "features.csv"}, {"flowpic", flowpic_outputs}};
    std::ofstream(config.output_dir / "manifest.json", std::ios::binary | std::ios::trunc) << manifest.dump(2) << "\n";

    log << "extract: " << outcomes.size() << " files, " << rows << " flows, " << feature_columns
        << " feature columns -> " << (config.output_dir / "features.csv").string() << "\n";
    return failed > 0 ? kExitPartial : kExitOk;
}

int cmd_analyze(const PipelineConfig& config, std::ostream& log)
{
    const Labeler labeler(config);
    const auto files = resolve_inputs(config);
    const auto outcomes = run_files<analysis::FlowProfile>(
        config, files, labeler, [](const flow::BiFlow& f, const labeling::LabelSet& labels, const std::string&) {
            return analysis::profile_flow(f, labels);
        });

    std::vector<analysis::FlowProfile> profiles;
    for (const auto& o : outcomes)
        profiles.insert(profiles.end(), o.items.begin(), o.items.end());

    const std::string dim = config.analysis_dimension.empty() ? labeler.default_dimension() : config.analysis_dimension;
    const auto stats = analysis::dataset_stats(profiles, dim, config.per_file_stats);
    const auto protocols = analysis::protocol_distribution(profiles, dim);
    const auto unopened = analysis::unopened_tcp(profiles, dim);

    ensure_dir(config.output_dir);
    {
        std::ofstream out = open_out(config.output_dir / "label_stats.csv");
        analysis::write_label_stats_csv(out, stats);
    }
    {
        std::ofstream out = open_out(config.output_dir / "protocols.csv");
        analysis::write_protocol_csv(out, protocols);
    }
    {
        std::ofstream out = open_out(config.output_dir / "unopened_tcp.csv");
        analysis::write_unopened_csv(out, unopened);
    }
    {
        std::ofstream out = open_out(config.output_dir / "summary.txt");
        out << "label dimension: " << (dim.empty() ? "(none)" : dim) << "\nflows: " << profiles.size() << "\n\n";
        analysis::write_text_summary(out, stats, protocols, unopened);
    }

    const std::size_t failed = report_failures(outcomes, log);
    json manifest;
    manifest["tool"] = "netfeat";
    manifest["version"] = kVersion;
    manifest["command"] = "analyze";
    manifest["config_hash"] = util::sha256_hex(config.canonical);
    manifest["config"] = config.canonical;
    manifest["label_dimension"] = dim;
    manifest["inputs"] = inputs_json(outcomes);
    manifest["counts"] = {{"files", outcomes.size()}, {"failed_files", failed}, {"flows", profiles.size()}};
    manifest["outputs"] = {"label_stats.csv", "protocols.csv", "unopened_tcp.csv", "summary.txt"};
    std::ofstream(config.output_dir / "analysis_manifest.json", std::ios::binary | std::ios::trunc)
        << manifest.dump(2) << "\n";

    log << "analyze: " << outcomes.size() << " files, " << profiles.size() << " flows -> "
        << config.output_dir.string() << "\n";
    return failed > 0 ? kExitPartial : kExitOk;
}

int cmd_evaluate(const EvaluateOptions& options, std::ostream& out)
{
    const bool challenge = options.mode == "challenge";
    if (!challenge && options.mode != "multiclass")
        throw FatalError("evaluate: mode must be multiclass or challenge, got '" + options.mode + "'");
    if (challenge && options.positive.empty())
        throw FatalError("evaluate: challenge mode needs --positive <label>");

    const auto truth = evaluation::read_label_csv(options.truth);
    const auto pred = evaluation::read_label_csv(options.pred);
    const auto [t, p] = evaluation::join_labels(truth, pred);
    const auto cm = evaluation::confusion(t, p);
    const auto metrics = evaluation::classification_metrics(cm);
    std::optional<evaluation::ChallengeScore> score;
    if (challenge)
        score = evaluation::challenge_score(cm, options.positive);

    evaluation::write_metrics_text(out, cm, metrics, score ? &*score : nullptr, options.positive);

    if (!options.output_dir.empty()) {
        ensure_dir(options.output_dir);
        {
            std::ofstream csv = open_out(options.output_dir / "metrics.csv");
            evaluation::write_metrics_csv(csv, metrics, score ? &*score : nullptr);
        }
        std::ofstream csv = open_out(options.output_dir / "confusion.csv");
        std::vector<std::string> row = {"truth\\pred"};
        row.insert(row.end(), cm.classes.begin(), cm.classes.end());
        util::write_csv_row(csv, row);
        for (std::size_t i = 0; i < cm.classes.size(); ++i) {
            row = {cm.classes[i]};
            for (auto c : cm.counts[i])
                row.push_back(std::to_string(c));
            util::write_csv_row(csv, row);
        }
    }
    return kExitOk;
}

} // namespace netfeat::cli
