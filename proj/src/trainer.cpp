#include "agmmn/trainer.hpp"

#include "agmmn/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace agmmn {

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::EarlyStop: return "early-stop";
        case StopReason::MaxEpochs: return "max-epochs";
        case StopReason::NumericFailure: return "numeric-failure";
    }
    return "unknown";
}

double TrainReport::min_val_loss() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : epochs) best = std::min(best, e.val_loss);
    return best;
}

void TrainConfig::validate(Index n_train) const {
    if (batch_size < 1 || batch_size > n_train) throw std::invalid_argument("batch size must lie in [1, n_trn]");
    if (n_train % batch_size != 0) throw std::invalid_argument("batch size must divide the training sample size");
    if (max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
    if (!(delta_train >= 0.0) || !(delta_val >= 0.0)) throw std::invalid_argument("loss thresholds must be >= 0");
    for (std::size_t i = 1; i < kernel_sequence.size(); ++i) {
        if (kernel_sequence[i] <= kernel_sequence[i - 1]) {
            throw std::invalid_argument("kernel sequence must be strictly increasing");
        }
    }
    if (!kernel_sequence.empty() && kernel_sequence.front() < 1) throw std::invalid_argument("kernel counts must be >= 1");
    if (fixed_kernels < 1) throw std::invalid_argument("fixed_kernels must be >= 1");
    if (validation_size < 1) throw std::invalid_argument("validation size must be >= 1");
    if (validation_replications < 1) throw std::invalid_argument("validation replications must be >= 1");
    if (!(initial_learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (full_loss_rows < 0) throw std::invalid_argument("full_loss_rows must be >= 0");
}

bool training_plateau(const LossHistory& losses, int t, int p_cur, int t_up, double delta) {
    if (p_cur < 1 || t - t_up <= p_cur) return false;
    if (static_cast<std::size_t>(t) >= losses.size()) throw std::out_of_range("training_plateau: epoch beyond history");
    const double baseline = losses[static_cast<std::size_t>(t - p_cur)];
    for (int k = 0; k < p_cur; ++k) {
        if (1.0 - losses[static_cast<std::size_t>(t - k)] / baseline > delta) return false;
    }
    return true;
}

bool validation_plateau(const LossHistory& losses, int t, int p_cur, int t_up, double delta) {
    if (t != t_up + p_cur) return false;
    if (static_cast<std::size_t>(t) >= losses.size()) throw std::out_of_range("validation_plateau: epoch beyond history");
    const double baseline = losses[static_cast<std::size_t>(t_up)];
    for (int k = 0; k < p_cur; ++k) {
        if (1.0 - losses[static_cast<std::size_t>(t - k)] / baseline > delta) return false;
    }
    return true;
}

double compute_epoch_training_loss(std::span<const double> batch_losses) {
    if (batch_losses.empty()) throw std::invalid_argument("training loss of an epoch without batches");
    return std::accumulate(batch_losses.begin(), batch_losses.end(), 0.0) / static_cast<double>(batch_losses.size());
}

double compute_validation_loss(const Matrix& x_val, const MlpModel& model, int replications, Rng& prior_rng,
                               std::optional<double> x_val_self_sum) {
    if (replications < 1) throw std::invalid_argument("validation loss needs at least one replication");
    std::vector<Matrix> samples;
    samples.reserve(static_cast<std::size_t>(replications));
    for (int r = 0; r < replications; ++r) {
        const Matrix z = standard_normal_matrix(x_val.rows(), model.architecture().input_dim, prior_rng);
        samples.push_back(predict(model, z));
    }
    if (x_val_self_sum) return validation_mmd(x_val, *x_val_self_sum, samples);
    return validation_mmd(x_val, samples);
}

namespace {

class Trainer {
public:
    Trainer(const Matrix& x, const TrainConfig& config, MlpModel model)
        : x_(x), config_(config), model_(std::move(model)) {
        config_.validate(x_.rows());
        const auto& arch = model_.architecture();
        if (arch.output_dim != x_.cols()) throw DimensionError("model output dimension differs from data dimension");
        if (!x_.allFinite()) throw NumericFailure("training sample contains non-finite values");

        if (config_.mode == BandwidthMode::Adaptive || !config_.fixed_bank) {
            distances_.emplace(x_, config_.pair_row_cap, derive_seed(config_.seed, "subsample"));
        }
        select_validation_rows();
        if (config_.full_loss_rows > 0) {
            loss_rows_ = x_.topRows(std::min(config_.full_loss_rows, x_.rows()));
        }
    }

    TrainReport run() {
        TrainState& s = state_;
        s.patience = patience(0);
        s.learning_rate = config_.initial_learning_rate;
        s.bank = initial_bank();
        s.adam = AdamState::for_model(model_);
        s.train_losses.assign(1, std::numeric_limits<double>::quiet_NaN());
        s.val_losses.assign(1, validation_loss(0));

        TrainReport report;
        report.initial_val_loss = s.val_losses.front();
        report.stop_reason = StopReason::MaxEpochs;

        for (int t = 1; t <= config_.max_epochs; ++t) {
            s.epoch = t;
            double train_loss = 0.0;
            double val_loss = 0.0;
            try {
                train_loss = run_epoch(t);
                val_loss = validation_loss(t);
                if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) throw NumericFailure("non-finite loss");
            } catch (const NumericFailure& e) {
                report.stop_reason = StopReason::NumericFailure;
                report.failure = "epoch " + std::to_string(t) + ": " + e.what();
                break;
            }
            s.train_losses.push_back(train_loss);
            s.val_losses.push_back(val_loss);

            EpochRecord rec;
            rec.epoch = t;
            rec.train_loss = train_loss;
            rec.val_loss = val_loss;

            bool halt = false;
            if (training_plateau(s.train_losses, t, s.patience, s.update_epoch, config_.delta_train)) {
                if (s.stop) {
                    halt = true;
                } else if (can_update()) {
                    s.n_updates += 1;
                    s.bank = adaptive_bank(static_cast<std::size_t>(s.n_updates));
                    s.update_epoch = t;
                    s.patience = patience(t);
                    s.learning_rate = learning_rate(s.n_updates, config_.initial_learning_rate);
                    rec.updated = true;
                    report.update_epochs.push_back(t);
                }
            }
            if (!halt && config_.early_stopping &&
                validation_plateau(s.val_losses, t, s.patience, s.update_epoch, config_.delta_val)) {
                s.stop = true;
            }

            rec.n_kernels = s.bank.size();
            rec.learning_rate = s.learning_rate;
            rec.patience = s.patience;
            rec.stopped = s.stop;
            report.epochs.push_back(rec);
            if (halt) {
                report.stop_reason = StopReason::EarlyStop;
                break;
            }
        }
        report.final_bank = s.bank;
        report.model = std::move(model_);
        return report;
    }

private:
    std::size_t sequence_entry(std::size_t k) const {
        return config_.kernel_sequence.empty() ? kernel_count(k) : config_.kernel_sequence[k];
    }

    bool can_update() const {
        if (config_.mode != BandwidthMode::Adaptive) return false;
        const auto next = static_cast<std::size_t>(state_.n_updates) + 1;
        return config_.kernel_sequence.empty() ? next <= 40 : next < config_.kernel_sequence.size();
    }

    KernelBank adaptive_bank(std::size_t k) const {
        const auto probs = prob_vector(sequence_entry(k));
        return distances_->quantile_bank(probs);
    }

    KernelBank initial_bank() const {
        if (config_.mode == BandwidthMode::Adaptive) return adaptive_bank(0);
        if (config_.fixed_bank) return *config_.fixed_bank;
        return distances_->quantile_bank(prob_vector(config_.fixed_kernels));
    }

    void select_validation_rows() {
        const Index n_val = std::min(config_.validation_size, x_.rows());
        if (n_val == x_.rows()) {
            x_val_ = x_;
            val_self_sum_ = kernel_sum(x_val_, x_val_, validation_bank(), config_.mmd);
            return;
        }
        std::vector<Index> rows(static_cast<std::size_t>(x_.rows()));
        std::iota(rows.begin(), rows.end(), Index{0});
        Rng rng = make_rng(config_.seed, "validation-subset");
        std::shuffle(rows.begin(), rows.end(), rng);
        rows.resize(static_cast<std::size_t>(n_val));
        std::sort(rows.begin(), rows.end());
        x_val_.resize(n_val, x_.cols());
        for (Index i = 0; i < n_val; ++i) x_val_.row(i) = x_.row(rows[static_cast<std::size_t>(i)]);
        val_self_sum_ = kernel_sum(x_val_, x_val_, validation_bank(), config_.mmd);
    }

    double validation_loss(int epoch) const {
        Rng rng = make_rng(config_.seed, "validation-prior", static_cast<std::uint64_t>(epoch));
        return compute_validation_loss(x_val_, model_, config_.validation_replications, rng, val_self_sum_);
    }

    double run_epoch(int t) {
        const Index n = x_.rows();
        const Index batch = config_.batch_size;
        const Index d_pri = model_.architecture().input_dim;

        std::vector<Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Index{0});
        Rng shuffle_rng = make_rng(config_.seed, "shuffle", static_cast<std::uint64_t>(t));
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        Rng prior_rng = make_rng(config_.seed, "prior", static_cast<std::uint64_t>(t));

        std::vector<double> batch_losses;
        Matrix xb(batch, x_.cols());
        for (Index start = 0; start < n; start += batch) {
            for (Index i = 0; i < batch; ++i) xb.row(i) = x_.row(order[static_cast<std::size_t>(start + i)]);
            const Matrix z = standard_normal_matrix(batch, d_pri, prior_rng);
            ForwardResult fwd = forward(model_, z);
            MmdGradient g = mmd_squared_and_grad(xb, fwd.output, state_.bank, config_.mmd);
            batch_losses.push_back(clamped_sqrt(g.mmd_squared));
            const LayerParams grad = backward(model_, fwd.tape, g.grad_y);
            adam_step(model_, grad, state_.adam, state_.learning_rate);
        }
        if (loss_rows_.rows() > 0) {
            Rng rng = make_rng(config_.seed, "loss-prior", static_cast<std::uint64_t>(t));
            const Matrix y = predict(model_, standard_normal_matrix(loss_rows_.rows(), d_pri, rng));
            return mmd(loss_rows_, y, state_.bank, config_.mmd);
        }
        return compute_epoch_training_loss(batch_losses);
    }

    const Matrix& x_;
    TrainConfig config_;
    MlpModel model_;
    std::optional<PairwiseDistances> distances_;
    Matrix x_val_;
    double val_self_sum_ = 0.0;
    Matrix loss_rows_;
    TrainState state_;
};

}  // namespace

TrainReport train(const Matrix& x, const TrainConfig& config, MlpModel model) {
    return Trainer(x, config, std::move(model)).run();
}

TrainReport train_fixed(const Matrix& x, TrainConfig config, MlpModel model, std::optional<KernelBank> bank,
                        bool early_stopping) {
    config.mode = BandwidthMode::Fixed;
    config.fixed_bank = std::move(bank);
    config.early_stopping = early_stopping;
    return train(x, config, std::move(model));
}

}  // namespace agmmn
