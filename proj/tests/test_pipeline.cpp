#include <doctest.h>

#include "agmmn/io.hpp"
#include "agmmn/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>

using namespace agmmn;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "agmmn_pipeline_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

json small_train_config() {
    return json::parse(R"({
        "schema_version": 1, "experiment": "train", "seed": 7,
        "data": {"copula": {"family": "clayton", "dim": 2, "tau": 0.5}, "n": 200},
        "model": {"hidden": [16]},
        "train": {"batch_size": 100, "max_epochs": 4, "validation_size": 100}
    })");
}

RunConfig with_output(const json& doc, const fs::path& out) {
    RunConfig cfg = parse_run_config(doc.dump());
    cfg.output_dir = out;
    return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
    json doc = small_train_config();
    const RunConfig cfg = parse_run_config(doc.dump());
    CHECK(cfg.experiment == Experiment::Train);
    CHECK(cfg.seed == 7);
    CHECK(cfg.data.copula->dim == 2);
    CHECK(cfg.train.batch_size == 100);
    CHECK(config_hash(cfg).size() == 16);

    json other = doc;
    other["threads"] = 4;
    other["output_dir"] = "/tmp/elsewhere";
    CHECK(config_hash(parse_run_config(other.dump())) == config_hash(cfg));
    other["seed"] = 8;
    CHECK(config_hash(parse_run_config(other.dump())) != config_hash(cfg));

    json missing_seed = doc;
    missing_seed.erase("seed");
    CHECK_THROWS_AS(parse_run_config(missing_seed.dump()), std::invalid_argument);
    json missing_version = doc;
    missing_version.erase("schema_version");
    CHECK_THROWS_AS(parse_run_config(missing_version.dump()), std::invalid_argument);
    json unknown = doc;
    unknown["train"]["learnig_rate"] = 0.1;
    CHECK_THROWS_AS(parse_run_config(unknown.dump()), std::invalid_argument);
    CHECK_THROWS_AS(parse_run_config("{not json"), std::invalid_argument);
    for (const char* name : {"train", "sample", "estimate", "evaluate", "sobol-study"}) {
        CHECK(to_string(parse_experiment(name)) == name);
    }
}

TEST_CASE("training twice gives identical artifacts") {
    const json doc = small_train_config();
    const fs::path a = fresh_dir("train_a");
    const fs::path b = fresh_dir("train_b");
    RunConfig ca = with_output(doc, a);
    RunConfig cb = with_output(doc, b);
    cb.threads = 2;
    const RunResult ra = run(ca);
    const RunResult rb = run(cb);
    REQUIRE(ra.ok);
    REQUIRE(rb.ok);
    for (const char* f : {"train_log.csv", "checkpoint.json", "manifest.json"}) {
        CHECK(read_text_file(a / f) == read_text_file(b / f));
    }
    const json manifest = json::parse(read_text_file(a / "manifest.json"));
    CHECK(manifest["status"] == "complete");
    CHECK(manifest["config_hash"] == config_hash(ca));

    // sample from the trained model
    json sdoc = json::parse(R"({"schema_version": 1, "experiment": "sample", "seed": 3, "sample": {"method": "qrs", "n": 64}})");
    sdoc["model"]["checkpoint"] = (a / "checkpoint.json").string();
    const fs::path s = fresh_dir("sample");
    REQUIRE(run(with_output(sdoc, s)).ok);
    const CsvTable t = read_numeric_csv(s / "samples.csv");
    CHECK(t.data.rows() == 64);
    CHECK(t.data.cols() == 2);
    CHECK(t.data.minCoeff() > 0.0);
    CHECK(t.data.maxCoeff() < 1.0);
}

TEST_CASE("sobol study smoke run") {
    const json doc = json::parse(R"({"schema_version": 1, "experiment": "sobol-study", "seed": 1,
        "sobol_study": {"d_min": 10, "d_max": 12, "n_tail": 1000, "replications": 50}})");
    const fs::path out = fresh_dir("sobol");
    REQUIRE(run(with_output(doc, out)).ok);
    const CsvTable counts = read_numeric_csv(out / "tail_counts.csv");
    CHECK(counts.data.rows() == 150);
    const CsvTable summary = read_numeric_csv(out / "tail_summary.csv");
    CHECK(summary.data.rows() == 3);
}

TEST_CASE("estimate experiment and unsupported combinations") {
    json doc = json::parse(R"({"schema_version": 1, "experiment": "estimate", "seed": 5,
        "data": {"copula": {"family": "gaussian", "dim": 3, "tau": 0.5}},
        "estimate": {"functional": "psi3", "generator": "copula-qrs", "grid": [128, 256, 512], "replications": 3,
                     "margins": {"kind": "lognormal", "spot": [1.0], "sigma": {"from": 0.01, "to": 0.025}}}})");
    const fs::path out = fresh_dir("estimate");
    REQUIRE(run(with_output(doc, out)).ok);
    CHECK(read_numeric_csv(out / "convergence.csv").data.rows() >= 1);
    const std::string est = read_text_file(out / "estimates.csv");
    CHECK(std::count(est.begin(), est.end(), '\n') == 10);

    doc["data"]["copula"] = json::parse(R"({"family": "gumbel", "dim": 3, "tau": 0.5})");
    CHECK_THROWS_AS(parse_run_config(doc.dump()), Unsupported);
}

TEST_CASE("failures are recorded in the manifest") {
    const fs::path out = fresh_dir("fail");
    json doc = json::parse(R"({"schema_version": 1, "experiment": "train", "seed": 1})");
    doc["data"]["path"] = (out / "missing.csv").string();
    RunConfig cfg;
    bool parsed = true;
    try {
        cfg = with_output(doc, out);
    } catch (const std::exception&) {
        parsed = false;
    }
    if (parsed) {
        const RunResult r = run(cfg);
        CHECK_FALSE(r.ok);
        const json manifest = json::parse(read_text_file(out / "manifest.json"));
        CHECK(manifest["status"] == "failed");
    }
}
