#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agmmn/copula.hpp"
#include "agmmn/estimators.hpp"
#include "agmmn/sobol.hpp"
#include "agmmn/trainer.hpp"

namespace agmmn {

enum class Experiment { Train, Sample, Estimate, Evaluate, SobolStudy };

std::string to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

/// Where training / evaluation data comes from.
struct DataSource {
    std::optional<CopulaSpec> copula;  ///< simulate n rows from this copula
    Index n = 0;
    std::filesystem::path path;        ///< or read a CSV dataset
};

struct SampleSettings {
    bool quasi_random = true;
    Index n = 1000;
};

struct EstimateSettings {
    FunctionalSpec functional;
    /// Volatilities equally spaced over [first, second], one per component.
    std::optional<std::pair<double, double>> sigma_range;
    Generator generator = Generator::CopulaPrs;
    std::vector<Index> grid;
    int replications = 25;
};

struct EvaluateSettings {
    int n_rep = 25;
    Index n_gen = 0;  ///< 0: same size as the data
};

struct SobolStudySettings {
    int d_min = 10;
    int d_max = 16;
    std::uint64_t n_tail = 1000;
    int replications = 500;
    TailPointSet point_set = TailPointSet::Sobol;
};

struct RunConfig {
    static constexpr int kSchemaVersion = 1;

    Experiment experiment = Experiment::Train;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir;
    int threads = 1;

    DataSource data;
    std::vector<Index> hidden_sizes{300};
    Index prior_dim = 0;  ///< 0: same as the data dimension
    TrainConfig train;
    std::filesystem::path checkpoint;  ///< model input for sample / estimate / evaluate

    SampleSettings sample;
    EstimateSettings estimate;
    EvaluateSettings evaluate;
    SobolStudySettings sobol_study;

    /// Compact sorted-key JSON of the parsed document without output_dir and
    /// threads (neither changes any artifact). Input of config_hash().
    std::string canonical;
};

/// Parses a JSON configuration. `seed` and `schema_version` are mandatory;
/// relative paths are resolved against `base_dir`. Throws
/// std::invalid_argument on unknown keys, wrong types or missing files.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// 64-bit FNV-1a hash of the canonical configuration, as 16 hex digits.
std::string config_hash(const RunConfig& config);

struct RunResult {
    bool ok = true;
    std::string error;
    std::vector<std::string> outputs;  ///< files written, relative to output_dir
};

/// Runs the configured experiment and writes its artifacts plus
/// manifest.json into config.output_dir. Errors are caught, recorded in the
/// manifest (status "failed", partial outputs listed) and reported in the
/// result.
RunResult run(const RunConfig& config);

}  // namespace agmmn
