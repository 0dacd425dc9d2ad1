#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agmmn/common.hpp"
#include "agmmn/mmd.hpp"
#include "agmmn/nn.hpp"
#include "agmmn/random.hpp"

namespace agmmn {

enum class BandwidthMode {
    Adaptive,  ///< quantile bandwidths, kernel count grows on training-loss plateaus
    Fixed,     ///< one bank for the whole run (GMMN / AGMMN_fix baselines)
};

struct TrainConfig {
    Index batch_size = 3000;
    int max_epochs = 800;
    double delta_train = 1e-3;
    double delta_val = 1e-3;

    BandwidthMode mode = BandwidthMode::Adaptive;
    /// Kernel counts visited by adaptive training. Empty means the unbounded
    /// sequence 6, 12, 24, ...
    std::vector<std::size_t> kernel_sequence;
    /// Fixed mode: explicit bank (e.g. hpz_bank()); if unset, quantile
    /// bandwidths with `fixed_kernels` kernels.
    std::optional<KernelBank> fixed_bank;
    std::size_t fixed_kernels = 6;

    Index pair_row_cap = 2000;
    double initial_learning_rate = 1e-3;

    /// Rows of the training sample used for the validation MMD (capped at n_trn).
    Index validation_size = 5000;
    int validation_replications = 1;
    bool early_stopping = true;

    /// Report L_trn as the MMD between up to this many training rows and a
    /// fresh generated sample instead of the mean mini-batch MMD. 0 disables.
    Index full_loss_rows = 0;

    std::uint64_t seed = 0;
    MmdOptions mmd;

    /// Throws std::invalid_argument on inconsistent settings for a training
    /// sample with n_train rows.
    void validate(Index n_train) const;
};

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    std::size_t n_kernels = 0;
    double learning_rate = 0.0;
    int patience = 0;
    bool updated = false;
    bool stopped = false;
};

enum class StopReason { EarlyStop, MaxEpochs, NumericFailure };

std::string to_string(StopReason reason);

struct TrainReport {
    std::vector<EpochRecord> epochs;
    MlpModel model;
    StopReason stop_reason = StopReason::MaxEpochs;
    std::string failure;
    KernelBank final_bank;
    double initial_val_loss = 0.0;
    std::vector<int> update_epochs;

    double min_val_loss() const;
};

/// Loss histories indexed by epoch; entry 0 holds the value before training.
using LossHistory = std::vector<double>;

/// Training-loss plateau: the last p_cur epochs (all after the last update
/// at t_up) fail to improve on L(t - p_cur) by more than delta, i.e.
/// 1 - L(t-k)/L(t-p_cur) <= delta for k = 0..p_cur-1. False while
/// t - t_up <= p_cur.
bool training_plateau(const LossHistory& losses, int t, int p_cur, int t_up, double delta);

/// Validation stop criterion: t == t_up + p_cur and
/// 1 - L(t-k)/L(t_up) <= delta for k = 0..p_cur-1.
bool validation_plateau(const LossHistory& losses, int t, int p_cur, int t_up, double delta);

/// Mean of the per-batch MMDs of one epoch.
double compute_epoch_training_loss(std::span<const double> batch_losses);

/// Average validation MMD between x_val and `replications` generated
/// samples of the same size. x_val_self_sum skips recomputing the data term.
double compute_validation_loss(const Matrix& x_val, const MlpModel& model, int replications, Rng& prior_rng,
                               std::optional<double> x_val_self_sum = std::nullopt);

/// Mutable loop state, exposed for inspection in tests.
struct TrainState {
    int epoch = 0;
    int patience = 20;
    double learning_rate = 1e-3;
    int n_updates = 0;
    int update_epoch = 0;
    bool stop = false;
    LossHistory train_losses;
    LossHistory val_losses;
    KernelBank bank;
    AdamState adam;
};

/// Adaptive (or fixed-bank) MMD training of `model` on the rows of x.
TrainReport train(const Matrix& x, const TrainConfig& config, MlpModel model);

/// Fixed-bank baseline: `config` with the bandwidth update disabled.
TrainReport train_fixed(const Matrix& x, TrainConfig config, MlpModel model, std::optional<KernelBank> bank,
                        bool early_stopping);

}  // namespace agmmn
