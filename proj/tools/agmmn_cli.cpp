#include "agmmn/io.hpp"
#include "agmmn/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <string>

namespace {

using nlohmann::json;

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

void report_error(const std::string& kind, const std::string& message) {
    std::cerr << json{{"status", "error"}, {"kind", kind}, {"message", message}}.dump() << '\n';
}

int run_subcommand(const std::string& experiment, const Options& opt) {
    namespace fs = std::filesystem;
    json doc;
    try {
        doc = json::parse(agmmn::read_text_file(opt.config));
    } catch (const std::exception& e) {
        report_error("config", e.what());
        return 2;
    }
    if (!doc.is_object()) {
        report_error("config", "configuration must be a JSON object");
        return 2;
    }
    if (doc.contains("experiment") && doc["experiment"] != experiment) {
        report_error("config", "config is for experiment " + doc["experiment"].dump() + ", not \"" + experiment + "\"");
        return 2;
    }
    doc["experiment"] = experiment;
    const fs::path base = fs::path(opt.config).parent_path();
    if (opt.seed) doc["seed"] = *opt.seed;
    if (opt.threads) doc["threads"] = *opt.threads;
    if (!opt.out.empty()) doc["output_dir"] = fs::absolute(opt.out).string();

    agmmn::RunConfig cfg;
    try {
        cfg = agmmn::parse_run_config(doc.dump(), base);
    } catch (const agmmn::Unsupported& e) {
        report_error("unsupported", e.what());
        return 2;
    } catch (const std::exception& e) {
        report_error("config", e.what());
        return 2;
    }

    const agmmn::RunResult result = agmmn::run(cfg);
    if (!result.ok) {
        report_error("run", result.error);
        return 1;
    }
    std::cout << experiment << ": wrote";
    for (const auto& f : result.outputs) std::cout << ' ' << f;
    std::cout << " manifest.json to " << cfg.output_dir.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive generative moment matching networks: training, sampling and estimator studies"};
    app.require_subcommand(1);
    Options opt;
    int status = 0;

    for (const char* name : {"train", "sample", "estimate", "evaluate", "sobol-study"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config,-c", opt.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out,-o", opt.out, "output directory (overrides output_dir)");
        sub->add_option("--seed", opt.seed, "global seed (overrides seed)");
        sub->add_option("--threads", opt.threads, "worker threads for replications")->check(CLI::PositiveNumber);
        sub->callback([&, name] { status = run_subcommand(name, opt); });
    }
    app.get_subcommand("train")->description("train a generator on copula samples or a CSV dataset");
    app.get_subcommand("sample")->description("draw PRS or QRS samples from a checkpoint");
    app.get_subcommand("estimate")->description("MC / RQMC estimator study over a sample-size grid");
    app.get_subcommand("evaluate")->description("validation MMD and CvM statistics of a checkpoint against data");
    app.get_subcommand("sobol-study")->description("tail-count study with randomized Sobol' points");

    CLI11_PARSE(app, argc, argv);
    return status;
}
