#pragma once

#include <cstdint>
#include <vector>

#include "agmmn/common.hpp"

namespace agmmn {

/// Fully connected generator topology: input -> hidden (ReLU)... -> output (sigmoid).
struct MlpArchitecture {
    Index input_dim = 0;
    std::vector<Index> hidden_sizes;
    Index output_dim = 0;

    /// Throws DimensionError unless every size is >= 1 and there is at least
    /// one hidden layer.
    void validate() const;

    std::size_t layer_count() const { return hidden_sizes.size() + 1; }
    Index layer_input_dim(std::size_t layer) const;
    Index layer_output_dim(std::size_t layer) const;

    bool operator==(const MlpArchitecture&) const = default;
};

struct DenseLayer {
    Matrix weights;  // [out x in]
    Vector bias;     // [out]
};

/// Parameters (or parameter-shaped quantities such as gradients and Adam
/// moments) of every layer, in forward order.
using LayerParams = std::vector<DenseLayer>;

class MlpModel {
public:
    MlpModel() = default;

    /// All-zero parameters.
    explicit MlpModel(MlpArchitecture arch);

    /// Every weight and bias of a layer with fan-in d_in drawn iid from
    /// U(-1/sqrt(d_in), 1/sqrt(d_in)); deterministic in `seed`.
    static MlpModel init(const MlpArchitecture& arch, std::uint64_t seed);

    const MlpArchitecture& architecture() const { return arch_; }
    const LayerParams& layers() const { return layers_; }
    LayerParams& layers() { return layers_; }

    std::size_t parameter_count() const;

    /// Row-major weights followed by bias, layer by layer.
    std::vector<double> flatten() const;
    static MlpModel unflatten(const MlpArchitecture& arch, const std::vector<double>& params);

    bool all_finite() const;

private:
    MlpArchitecture arch_;
    LayerParams layers_;
};

/// Activations kept by forward() for the reverse pass.
struct ForwardTape {
    std::vector<Matrix> inputs;       // input of each layer [n x in]
    std::vector<Matrix> preactivations;  // W x + b of each layer [n x out]
};

struct ForwardResult {
    Matrix output;  // [n x d], entries in (0,1)
    ForwardTape tape;
};

/// Numerically stable logistic function clamped to the open unit interval.
double sigmoid(double x);

ForwardResult forward(const MlpModel& model, const Matrix& z);

/// forward() without keeping the tape.
Matrix predict(const MlpModel& model, const Matrix& z);

/// Gradient of a scalar loss L w.r.t. every parameter given dL/dY for the
/// batch recorded in `tape`. ReLU'(0) is taken as 0.
LayerParams backward(const MlpModel& model, const ForwardTape& tape, const Matrix& dloss_doutput);

LayerParams zeros_like(const MlpModel& model);

struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t step = 0;
    LayerParams first_moment;
    LayerParams second_moment;

    static AdamState for_model(const MlpModel& model);
};

/// One bias-corrected Adam update. A gradient with non-finite entries is
/// rejected with NumericFailure and leaves model and state untouched.
void adam_step(MlpModel& model, const LayerParams& grad, AdamState& state, double learning_rate);

}  // namespace agmmn
