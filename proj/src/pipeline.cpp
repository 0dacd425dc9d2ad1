#include "agmmn/pipeline.hpp"

#include "agmmn/checkpoint.hpp"
#include "agmmn/io.hpp"
#include "agmmn/mmd.hpp"
#include "agmmn/random.hpp"
#include "agmmn/sampling.hpp"

#include <json.hpp>

#include <cstdio>
#include <map>
#include <set>
#include <type_traits>
#include <stdexcept>

namespace agmmn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Strict reader over one JSON object: every key must be consumed.
class Reader {
public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) fail("must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    template <class T>
    T get(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) fail("missing required key '" + key + "'");
        return convert<T>(key);
    }

    template <class T>
    T get_or(const std::string& key, T fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        return convert<T>(key);
    }

    void mark(const std::string& key) { seen_.insert(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    Reader sub(const std::string& key) {
        seen_.insert(key);
        return Reader(j_.at(key), where_ + "." + key);
    }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (!seen_.count(item.key())) fail("unknown key '" + item.key() + "'");
        }
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("config " + where_ + ": " + what);
    }

    const std::string& where() const { return where_; }

private:
    template <class T>
    T convert(const std::string& key) {
        const json& v = j_.at(key);
        if constexpr (std::is_same_v<T, std::uint64_t>) {
            if (!v.is_number_unsigned()) fail("'" + key + "' must be a non-negative integer");
        } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
            if (!v.is_number_integer()) fail("'" + key + "' must be an integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) fail("'" + key + "' must be a number");
        }
        try {
            return v.get<T>();
        } catch (const json::exception&) {
            fail("'" + key + "' has the wrong type");
        }
    }

    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

fs::path resolve_path(const fs::path& base, const std::string& p) {
    fs::path path(p);
    if (path.is_relative() && !base.empty()) path = base / path;
    return path.lexically_normal();
}

std::vector<double> number_list(Reader& r, const std::string& key) {
    const json& v = r.raw(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) r.fail("'" + key + "' must be a number or an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) r.fail("'" + key + "' must contain numbers only");
        out.push_back(e.get<double>());
    }
    return out;
}

CopulaSpec parse_copula(Reader r) {
    CopulaSpec spec;
    spec.family = parse_copula_family(r.get<std::string>("family"));
    spec.dim = r.get<Index>("dim");
    if (r.has("tau")) spec.tau = r.get<double>("tau");
    if (r.has("theta")) spec.theta = r.get<double>("theta");
    if (r.has("rho")) spec.rho = r.get<double>("rho");
    spec.df = r.get_or<double>("df", 4.0);
    r.finish();
    if (!spec.tau && !spec.theta && !spec.rho) r.fail("one of tau, theta or rho is required");
    resolve(spec);  // validates parameters early
    return spec;
}

void parse_train(Reader r, TrainConfig& t) {
    t.batch_size = r.get_or<Index>("batch_size", t.batch_size);
    t.max_epochs = r.get_or<int>("max_epochs", t.max_epochs);
    t.delta_train = r.get_or<double>("delta_train", t.delta_train);
    t.delta_val = r.get_or<double>("delta_val", t.delta_val);
    const auto mode = r.get_or<std::string>("mode", "adaptive");
    if (mode == "adaptive") {
        t.mode = BandwidthMode::Adaptive;
    } else if (mode == "fixed") {
        t.mode = BandwidthMode::Fixed;
    } else {
        r.fail("mode must be 'adaptive' or 'fixed'");
    }
    t.kernel_sequence = r.get_or<std::vector<std::size_t>>("kernel_sequence", {});
    if (r.has("fixed_bank")) {
        const json& b = r.raw("fixed_bank");
        if (b.is_string()) {
            if (b.get<std::string>() != "hpz") r.fail("fixed_bank must be \"hpz\" or a list of bandwidths");
            t.fixed_bank = hpz_bank();
        } else {
            t.fixed_bank = KernelBank(number_list(r, "fixed_bank"));
        }
    } else {
        r.mark("fixed_bank");  // explicit null allowed
    }
    t.fixed_kernels = r.get_or<std::size_t>("fixed_kernels", t.fixed_kernels);
    t.pair_row_cap = r.get_or<Index>("pair_row_cap", t.pair_row_cap);
    t.initial_learning_rate = r.get_or<double>("learning_rate", t.initial_learning_rate);
    t.validation_size = r.get_or<Index>("validation_size", t.validation_size);
    t.validation_replications = r.get_or<int>("validation_replications", t.validation_replications);
    t.early_stopping = r.get_or<bool>("early_stopping", t.early_stopping);
    t.full_loss_rows = r.get_or<Index>("full_loss_rows", t.full_loss_rows);
    t.mmd.block_rows = r.get_or<Index>("block_rows", t.mmd.block_rows);
    r.finish();
}

MarginSpec parse_margins(Reader r, std::optional<std::pair<double, double>>& sigma_range) {
    MarginSpec m;
    m.kind = parse_margin_kind(r.get<std::string>("kind"));
    switch (m.kind) {
        case MarginSpec::Kind::Normal: break;
        case MarginSpec::Kind::LogNormal: {
            m.spot = r.has("spot") ? number_list(r, "spot") : std::vector<double>{1.0};
            if (r.has("sigma")) {
                const json& s = r.raw("sigma");
                if (s.is_object()) {
                    Reader range(s, r.where() + ".sigma");
                    sigma_range = std::make_pair(range.get<double>("from"), range.get<double>("to"));
                    range.finish();
                } else {
                    m.sigma = number_list(r, "sigma");
                }
            } else {
                r.fail("log-normal margins need 'sigma'");
            }
            m.rate = r.get_or<double>("rate", 0.01);
            m.maturity = r.get_or<double>("maturity", 1.0);
            break;
        }
        case MarginSpec::Kind::ScaledT:
            m.df = number_list(r, "df");
            m.loc = r.has("loc") ? number_list(r, "loc") : std::vector<double>{0.0};
            m.scale = r.has("scale") ? number_list(r, "scale") : std::vector<double>{1.0};
            break;
    }
    r.finish();
    return m;
}

std::vector<Index> parse_grid(Reader& r) {
    const json& g = r.raw("grid");
    if (g.is_array()) {
        std::vector<Index> grid;
        for (const auto& e : g) {
            if (!e.is_number_integer() || e.get<Index>() < 1) r.fail("grid entries must be positive integers");
            grid.push_back(e.get<Index>());
        }
        return grid;
    }
    Reader gr(g, r.where() + ".grid");
    const double lo = gr.get<double>("log2_min");
    const double hi = gr.get<double>("log2_max");
    const double step = gr.get_or<double>("log2_step", 0.5);
    gr.finish();
    return log2_grid(lo, hi, step);
}

void require_file(const fs::path& p, const std::string& what) {
    if (!fs::is_regular_file(p)) throw std::invalid_argument("config: " + what + " '" + p.string() + "' does not exist");
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::Train: return "train";
        case Experiment::Sample: return "sample";
        case Experiment::Estimate: return "estimate";
        case Experiment::Evaluate: return "evaluate";
        case Experiment::SobolStudy: return "sobol-study";
    }
    return "unknown";
}

Experiment parse_experiment(std::string_view name) {
    if (name == "train") return Experiment::Train;
    if (name == "sample") return Experiment::Sample;
    if (name == "estimate") return Experiment::Estimate;
    if (name == "evaluate") return Experiment::Evaluate;
    if (name == "sobol-study") return Experiment::SobolStudy;
    throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

static RunConfig parse_run_config_impl(const std::string& text, const fs::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
    }
    Reader r(doc, "root");
    RunConfig c;
    const int schema = r.get<int>("schema_version");
    if (schema != RunConfig::kSchemaVersion) {
        r.fail("unsupported schema_version " + std::to_string(schema) + " (expected " +
               std::to_string(RunConfig::kSchemaVersion) + ")");
    }
    c.experiment = parse_experiment(r.get<std::string>("experiment"));
    c.seed = r.get<std::uint64_t>("seed");
    c.output_dir = resolve_path(base_dir, r.get_or<std::string>("output_dir", "."));
    c.threads = r.get_or<int>("threads", 1);
    if (c.threads < 1) r.fail("threads must be >= 1");

    if (r.has("data")) {
        Reader d = r.sub("data");
        if (d.has("copula") == d.has("path")) d.fail("give exactly one of 'copula' and 'path'");
        if (d.has("copula")) {
            c.data.copula = parse_copula(d.sub("copula"));
            // copula generators in `estimate` draw their own samples
            if (c.experiment != Experiment::Estimate || d.has("n")) {
                c.data.n = d.get<Index>("n");
                if (c.data.n < 2) d.fail("n must be >= 2");
            }
        } else {
            c.data.path = resolve_path(base_dir, d.get<std::string>("path"));
            require_file(c.data.path, "data file");
        }
        d.finish();
    }
    if (r.has("model")) {
        Reader m = r.sub("model");
        c.hidden_sizes = m.get_or<std::vector<Index>>("hidden", c.hidden_sizes);
        c.prior_dim = m.get_or<Index>("prior_dim", 0);
        if (m.has("checkpoint")) {
            c.checkpoint = resolve_path(base_dir, m.get<std::string>("checkpoint"));
            require_file(c.checkpoint, "checkpoint");
        }
        m.finish();
    }
    if (r.has("train")) parse_train(r.sub("train"), c.train);
    c.train.seed = c.seed;
    if (r.has("sample")) {
        Reader s = r.sub("sample");
        const auto method = s.get_or<std::string>("method", "qrs");
        if (method != "qrs" && method != "prs") s.fail("method must be 'qrs' or 'prs'");
        c.sample.quasi_random = method == "qrs";
        c.sample.n = s.get_or<Index>("n", c.sample.n);
        s.finish();
    }
    if (r.has("estimate")) {
        Reader e = r.sub("estimate");
        auto& est = c.estimate;
        est.functional.kind = parse_functional(e.get<std::string>("functional"));
        est.generator = parse_generator(e.get<std::string>("generator"));
        est.grid = parse_grid(e);
        est.replications = e.get_or<int>("replications", est.replications);
        est.functional.alpha = e.get_or<double>("alpha", est.functional.alpha);
        est.functional.component = e.get_or<Index>("component", est.functional.component);
        est.functional.strike = e.get_or<double>("strike", est.functional.strike);
        if (e.has("margins")) est.functional.margins = parse_margins(e.sub("margins"), est.sigma_range);
        e.finish();
    }
    if (r.has("evaluate")) {
        Reader e = r.sub("evaluate");
        c.evaluate.n_rep = e.get_or<int>("n_rep", c.evaluate.n_rep);
        c.evaluate.n_gen = e.get_or<Index>("n_gen", c.evaluate.n_gen);
        e.finish();
    }
    if (r.has("sobol_study")) {
        Reader s = r.sub("sobol_study");
        auto& st = c.sobol_study;
        st.d_min = s.get_or<int>("d_min", st.d_min);
        st.d_max = s.get_or<int>("d_max", st.d_max);
        st.n_tail = s.get_or<std::uint64_t>("n_tail", st.n_tail);
        st.replications = s.get_or<int>("replications", st.replications);
        const auto ps = s.get_or<std::string>("point_set", "sobol");
        if (ps == "sobol") {
            st.point_set = TailPointSet::Sobol;
        } else if (ps == "iid") {
            st.point_set = TailPointSet::Iid;
        } else {
            s.fail("point_set must be 'sobol' or 'iid'");
        }
        s.finish();
    }
    // Sections that were null are accepted as absent.
    for (const char* key : {"data", "model", "train", "sample", "estimate", "evaluate", "sobol_study"}) r.mark(key);
    r.finish();

    switch (c.experiment) {
        case Experiment::Train:
            if (!c.data.copula && c.data.path.empty()) r.fail("train needs a 'data' section");
            break;
        case Experiment::Sample:
            if (c.checkpoint.empty()) r.fail("sample needs model.checkpoint");
            break;
        case Experiment::Estimate: {
            const Generator g = c.estimate.generator;
            const bool copula_gen = g == Generator::CopulaPrs || g == Generator::CopulaQrs;
            if (c.estimate.grid.empty()) r.fail("estimate needs an 'estimate' section");
            if (copula_gen && !c.data.copula) r.fail("copula generators need data.copula");
            if (!copula_gen && c.checkpoint.empty()) r.fail("model generators need model.checkpoint");
            if (g == Generator::CopulaQrs && !supports_rosenblatt(c.data.copula->family)) {
                throw Unsupported("copula-qrs is not available for the " + to_string(c.data.copula->family) +
                                  " copula");
            }
            break;
        }
        case Experiment::Evaluate:
            if (c.checkpoint.empty()) r.fail("evaluate needs model.checkpoint");
            if (!c.data.copula && c.data.path.empty()) r.fail("evaluate needs a 'data' section");
            break;
        case Experiment::SobolStudy: break;
    }

    json canon = doc;
    canon.erase("output_dir");
    canon.erase("threads");
    c.canonical = canon.dump();
    return c;
}

RunConfig parse_run_config(const std::string& text, const fs::path& base_dir) {
    try {
        return parse_run_config_impl(text, base_dir);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
}

RunConfig load_run_config(const fs::path& path) {
    return parse_run_config(read_text_file(path), path.parent_path());
}

std::string config_hash(const RunConfig& config) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config.canonical)));
    return buf;
}

namespace {

class Run {
public:
    explicit Run(const RunConfig& c) : c_(c) {
        manifest_["schema_version"] = RunConfig::kSchemaVersion;
        manifest_["experiment"] = to_string(c.experiment);
        manifest_["config_hash"] = config_hash(c);
        manifest_["seed"] = c.seed;
        manifest_["warnings"] = json::array();
        manifest_["summary"] = json::object();
    }

    RunResult execute() {
        RunResult result;
        try {
            fs::create_directories(c_.output_dir);
            switch (c_.experiment) {
                case Experiment::Train: train(); break;
                case Experiment::Sample: sample(); break;
                case Experiment::Estimate: estimate(); break;
                case Experiment::Evaluate: evaluate(); break;
                case Experiment::SobolStudy: sobol_study(); break;
            }
        } catch (const std::exception& e) {
            result.ok = false;
            result.error = e.what();
        }
        if (!failure_.empty() && result.ok) {
            result.ok = false;
            result.error = failure_;
        }
        manifest_["status"] = result.ok ? "complete" : "failed";
        manifest_["partial"] = !result.ok;
        if (!result.ok) manifest_["error"] = result.error;
        manifest_["outputs"] = outputs_;
        manifest_["seeds"] = seeds_;
        try {
            write_text_file(c_.output_dir / "manifest.json", manifest_.dump(2) + "\n");
        } catch (const std::exception& e) {
            if (result.ok) {
                result.ok = false;
                result.error = e.what();
            }
        }
        result.outputs = outputs_;
        return result;
    }

private:
    std::uint64_t seed_for(const std::string& name) {
        const std::uint64_t s = derive_seed(c_.seed, name);
        seeds_[name] = s;
        return s;
    }

    void emit(const std::string& name, const std::string& text) {
        write_text_file(c_.output_dir / name, text);
        outputs_.push_back(name);
    }

    void emit_matrix(const std::string& name, const Matrix& m) {
        std::vector<std::string> header;
        for (Index j = 0; j < m.cols(); ++j) header.push_back("u" + std::to_string(j + 1));
        write_matrix_csv(c_.output_dir / name, header, m);
        outputs_.push_back(name);
    }

    Matrix load_data(const std::string& stream) {
        if (c_.data.copula) {
            const ResolvedCopula cop = resolve(*c_.data.copula);
            return sample_copula(cop, c_.data.n, seed_for(stream));
        }
        IngestResult in = ingest_csv_detailed(c_.data.path);
        if (in.rank_transformed) manifest_["warnings"].push_back("data had values outside (0,1); pseudo-observations used");
        return std::move(in.u);
    }

    void train() {
        const Matrix x = load_data("data");
        MlpArchitecture arch;
        arch.input_dim = c_.prior_dim > 0 ? c_.prior_dim : x.cols();
        arch.hidden_sizes = c_.hidden_sizes;
        arch.output_dim = x.cols();
        arch.validate();
        const MlpModel model = MlpModel::init(arch, seed_for("init"));
        for (const char* s : {"shuffle", "prior", "validation-prior", "validation-subset", "subsample"}) seed_for(s);

        const TrainReport report = agmmn::train(x, c_.train, model);

        std::string log = "epoch,train_loss,val_loss,n_kernels,learning_rate,patience,updated,stopped\n";
        for (const auto& e : report.epochs) {
            log += std::to_string(e.epoch) + ',' + format_double(e.train_loss) + ',' + format_double(e.val_loss) + ',' +
                   std::to_string(e.n_kernels) + ',' + format_double(e.learning_rate) + ',' +
                   std::to_string(e.patience) + ',' + (e.updated ? "1" : "0") + ',' + (e.stopped ? "1" : "0") + '\n';
        }
        emit("train_log.csv", log);

        Checkpoint ck;
        ck.model = report.model;
        ck.meta.final_bandwidths = report.final_bank.bandwidths();
        ck.meta.epochs = static_cast<int>(report.epochs.size());
        ck.meta.stop_reason = to_string(report.stop_reason);
        ck.meta.seed = c_.seed;
        ck.meta.seeds = seeds_;
        emit("checkpoint.json", checkpoint_to_text(ck));

        auto& s = manifest_["summary"];
        s["epochs"] = report.epochs.size();
        s["stop_reason"] = to_string(report.stop_reason);
        s["initial_val_loss"] = report.initial_val_loss;
        s["min_val_loss"] = report.epochs.empty() ? report.initial_val_loss : report.min_val_loss();
        s["update_epochs"] = report.update_epochs;
        s["n_train"] = x.rows();
        s["dim"] = x.cols();
        if (report.stop_reason == StopReason::NumericFailure) failure_ = "training stopped: " + report.failure;
    }

    void sample() {
        const Checkpoint ck = load_checkpoint(c_.checkpoint);
        const Index d_pri = ck.model.architecture().input_dim;
        Matrix u;
        if (c_.sample.quasi_random) {
            SobolStream stream = SobolStream::shifted(d_pri, seed_for("sobol-shift"), 0);
            u = qrs_from_model(ck.model, stream, c_.sample.n);
        } else {
            u = prs_from_model(ck.model, c_.sample.n, seed_for("model-prs"));
        }
        emit_matrix("samples.csv", u);
        manifest_["summary"]["method"] = c_.sample.quasi_random ? "qrs" : "prs";
        manifest_["summary"]["n"] = c_.sample.n;
    }

    void estimate() {
        const auto& est = c_.estimate;
        EstimatorSpec spec;
        spec.functional = est.functional;
        spec.generator = est.generator;
        spec.grid = est.grid;
        spec.replications = est.replications;
        spec.seed = seed_for("estimate");
        spec.threads = c_.threads;
        std::optional<Checkpoint> ck;
        Index d = 0;
        if (est.generator == Generator::CopulaPrs || est.generator == Generator::CopulaQrs) {
            spec.copula = resolve(*c_.data.copula);
            d = spec.copula->dim;
        } else {
            ck = load_checkpoint(c_.checkpoint);
            spec.model = &ck->model;
            d = ck->model.architecture().output_dim;
        }
        if (est.sigma_range) {
            spec.functional.margins.sigma =
                equidistant(est.sigma_range->first, est.sigma_range->second, static_cast<std::size_t>(d));
        }
        const EstimatorRun run = run_estimator(spec);

        const std::string f = to_string(run.functional);
        const std::string g = to_string(run.generator);
        std::string rows = "functional,generator,n_gen,replicate,estimate\n";
        std::string summary = "functional,generator,n_gen,mean,sd\n";
        for (std::size_t i = 0; i < run.grid.size(); ++i) {
            const std::string n = std::to_string(run.grid[i]);
            for (std::size_t b = 0; b < run.estimates[i].size(); ++b) {
                rows += f + ',' + g + ',' + n + ',' + std::to_string(b) + ',' + format_double(run.estimates[i][b]) + '\n';
            }
            summary += f + ',' + g + ',' + n + ',' + format_double(run.means[i]) + ',' + format_double(run.sds[i]) + '\n';
        }
        emit("estimates.csv", rows);
        emit("estimate_summary.csv", summary);
        try {
            const ConvergenceFit fit = convergence_fit(run.grid, run.sds);
            for (const auto& w : fit.warnings) manifest_["warnings"].push_back(w);
            emit("convergence.csv", "log2_slope,log2_intercept,raw_slope,raw_intercept,points_used\n" +
                                        format_double(fit.slope) + ',' + format_double(fit.intercept) + ',' +
                                        format_double(fit.raw_slope) + ',' + format_double(fit.raw_intercept) + ',' +
                                        std::to_string(fit.points_used) + '\n');
            manifest_["summary"]["convergence_rate"] = fit.slope;
        } catch (const DegenerateData& e) {
            manifest_["warnings"].push_back(std::string("no convergence fit: ") + e.what());
        }
    }

    void evaluate() {
        const Checkpoint ck = load_checkpoint(c_.checkpoint);
        const Matrix x = load_data("evaluate-data");
        if (x.cols() != ck.model.architecture().output_dim) throw DimensionError("data dimension differs from the model");
        const Index n_gen = c_.evaluate.n_gen > 0 ? c_.evaluate.n_gen : x.rows();
        const std::uint64_t prior_seed = seed_for("evaluate-prior");
        const Matrix u_dat = pseudo_obs(x);
        std::string rows = "replicate,validation_mmd,cvm\n";
        double mmd_sum = 0.0;
        double cvm_sum = 0.0;
        for (int r = 0; r < c_.evaluate.n_rep; ++r) {
            Rng rng = make_rng(prior_seed, "replicate", static_cast<std::uint64_t>(r));
            const Matrix y = predict(ck.model, standard_normal_matrix(n_gen, ck.model.architecture().input_dim, rng));
            const double v = mmd(x, y, validation_bank());
            const double s = cvm_statistic(u_dat, pseudo_obs(y));
            mmd_sum += v;
            cvm_sum += s;
            rows += std::to_string(r) + ',' + format_double(v) + ',' + format_double(s) + '\n';
        }
        emit("evaluation.csv", rows);
        manifest_["summary"]["mean_validation_mmd"] = mmd_sum / c_.evaluate.n_rep;
        manifest_["summary"]["acvm"] = cvm_sum / c_.evaluate.n_rep;
    }

    void sobol_study() {
        const auto& st = c_.sobol_study;
        const auto results =
            tail_count_study(st.d_min, st.d_max, st.n_tail, st.replications, seed_for("tail-study"), st.point_set);
        std::string rows = "d,n_gen,n_tail,threshold,replicate,count\n";
        std::string summary = "d,n_gen,mean,variance\n";
        for (const auto& res : results) {
            const std::string head = std::to_string(res.dim) + ',' + std::to_string(res.n_gen) + ',' +
                                     std::to_string(res.n_tail) + ',' + format_double(res.threshold) + ',';
            for (std::size_t b = 0; b < res.counts.size(); ++b) {
                rows += head + std::to_string(b) + ',' + std::to_string(res.counts[b]) + '\n';
            }
            summary += std::to_string(res.dim) + ',' + std::to_string(res.n_gen) + ',' + format_double(res.mean()) +
                       ',' + format_double(res.variance()) + '\n';
        }
        emit("tail_counts.csv", rows);
        emit("tail_summary.csv", summary);
    }

    const RunConfig& c_;
    json manifest_;
    std::vector<std::string> outputs_;
    std::map<std::string, std::uint64_t> seeds_;
    std::string failure_;
};

}  // namespace

RunResult run(const RunConfig& config) { return Run(config).execute(); }

}  // namespace agmmn
