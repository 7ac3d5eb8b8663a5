#include "netfeat/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace netfeat::cli;

// Turns leftover "--section.key=value" / "--section.key value" arguments
// into overrides.
std::vector<std::string> dotted_flags(const std::vector<std::string>& extras)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& arg = extras[i];
        if (arg.rfind("--", 0) != 0 || arg.find('.') == std::string::npos)
            throw std::invalid_argument("unexpected argument: " + arg);
        const std::string body = arg.substr(2);
        if (body.find('=') != std::string::npos) {
            out.push_back(body);
        } else {
            if (i + 1 >= extras.size())
                throw std::invalid_argument("missing value for " + arg);
            out.push_back(body + "=" + extras[++i]);
        }
    }
    return out;
}

int run_pipeline(bool extract, const std::string& config_path, std::vector<std::string> overrides,
                 const std::vector<std::string>& extras)
{
    const auto dotted = dotted_flags(extras);
    overrides.insert(overrides.end(), dotted.begin(), dotted.end());
    const PipelineConfig cfg = load_pipeline_config_file(config_path, overrides, extract);
    return extract ? cmd_extract(cfg, std::cerr) : cmd_analyze(cfg, std::cerr);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"netfeat: traffic feature extraction, dataset analysis and evaluation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "netfeat 1.0.0");

    std::string config_path;
    std::vector<std::string> overrides;

    auto* extract = app.add_subcommand("extract", "Extract per-flow features from captures");
    extract->add_option("--config", config_path, "Pipeline config file")->required()->check(CLI::ExistingFile);
    extract->add_option("--override", overrides, "Override a config value: section.key=value");
    extract->allow_extras();
    extract->footer("Any config key can also be given as --section.key=value.");

    auto* analyze = app.add_subcommand("analyze", "Per-label dataset statistics");
    analyze->add_option("--config", config_path, "Pipeline config file")->required()->check(CLI::ExistingFile);
    analyze->add_option("--override", overrides, "Override a config value: section.key=value");
    analyze->allow_extras();
    analyze->footer("Any config key can also be given as --section.key=value.");

    EvaluateOptions eval;
    auto* evaluate = app.add_subcommand("evaluate", "Score predictions against ground truth");
    evaluate->add_option("--truth", eval.truth, "Ground truth CSV (id,label)")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--pred", eval.pred, "Prediction CSV (id,label)")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--mode", eval.mode, "multiclass or challenge")
        ->check(CLI::IsMember({"multiclass", "challenge"}))
        ->capture_default_str();
    evaluate->add_option("--positive", eval.positive, "Positive class (challenge mode)");
    evaluate->add_option("--out", eval.output_dir, "Directory for metrics.csv and confusion.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitFatal;
    }

    try {
        if (*extract)
            return run_pipeline(true, config_path, overrides, extract->remaining());
        if (*analyze)
            return run_pipeline(false, config_path, overrides, analyze->remaining());
        return cmd_evaluate(eval, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFatal;
    }
}
