#include "agmmn/nn.hpp"

#include "agmmn/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace agmmn {

namespace {

constexpr double kSigmoidLow = std::numeric_limits<double>::min();
constexpr double kSigmoidHigh = 1.0 - 0x1.0p-53;

void check_shapes(const MlpModel& model, const LayerParams& other, const char* what) {
    const auto& layers = model.layers();
    if (other.size() != layers.size()) throw DimensionError(std::string(what) + ": layer count mismatch");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (other[l].weights.rows() != layers[l].weights.rows() ||
            other[l].weights.cols() != layers[l].weights.cols() ||
            other[l].bias.size() != layers[l].bias.size()) {
            throw DimensionError(std::string(what) + ": shape mismatch in layer " + std::to_string(l));
        }
    }
}

}  // namespace

void MlpArchitecture::validate() const {
    if (input_dim < 1 || output_dim < 1) throw DimensionError("MLP input and output dimensions must be >= 1");
    if (hidden_sizes.empty()) throw DimensionError("MLP needs at least one hidden layer");
    for (Index h : hidden_sizes)
        if (h < 1) throw DimensionError("MLP hidden sizes must be >= 1");
}

Index MlpArchitecture::layer_input_dim(std::size_t layer) const {
    return layer == 0 ? input_dim : hidden_sizes[layer - 1];
}

Index MlpArchitecture::layer_output_dim(std::size_t layer) const {
    return layer == hidden_sizes.size() ? output_dim : hidden_sizes[layer];
}

MlpModel::MlpModel(MlpArchitecture arch) : arch_(std::move(arch)) {
    arch_.validate();
    layers_.resize(arch_.layer_count());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        layers_[l].weights = Matrix::Zero(arch_.layer_output_dim(l), arch_.layer_input_dim(l));
        layers_[l].bias = Vector::Zero(arch_.layer_output_dim(l));
    }
}

MlpModel MlpModel::init(const MlpArchitecture& arch, std::uint64_t seed) {
    MlpModel model(arch);
    Rng rng(seed);
    for (auto& layer : model.layers_) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weights.cols()));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (Index r = 0; r < layer.weights.rows(); ++r)
            for (Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = dist(rng);
        for (Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = dist(rng);
    }
    return model;
}

std::size_t MlpModel::parameter_count() const {
    std::size_t count = 0;
    for (const auto& layer : layers_) count += layer.weights.size() + layer.bias.size();
    return count;
}

std::vector<double> MlpModel::flatten() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for (const auto& layer : layers_) {
        for (Index r = 0; r < layer.weights.rows(); ++r)
            for (Index c = 0; c < layer.weights.cols(); ++c) out.push_back(layer.weights(r, c));
        for (Index r = 0; r < layer.bias.size(); ++r) out.push_back(layer.bias(r));
    }
    return out;
}

MlpModel MlpModel::unflatten(const MlpArchitecture& arch, const std::vector<double>& params) {
    MlpModel model(arch);
    if (params.size() != model.parameter_count()) {
        throw DimensionError("parameter vector has " + std::to_string(params.size()) + " entries, architecture needs " +
                             std::to_string(model.parameter_count()));
    }
    std::size_t pos = 0;
    for (auto& layer : model.layers_) {
        for (Index r = 0; r < layer.weights.rows(); ++r)
            for (Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = params[pos++];
        for (Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = params[pos++];
    }
    return model;
}

bool MlpModel::all_finite() const {
    for (const auto& layer : layers_)
        if (!layer.weights.allFinite() || !layer.bias.allFinite()) return false;
    return true;
}

double sigmoid(double x) {
    double s;
    if (x >= 0.0) {
        s = 1.0 / (1.0 + std::exp(-x));
    } else {
        const double e = std::exp(x);
        s = e / (1.0 + e);
    }
    return std::clamp(s, kSigmoidLow, kSigmoidHigh);
}

ForwardResult forward(const MlpModel& model, const Matrix& z) {
    const auto& arch = model.architecture();
    if (z.cols() != arch.input_dim) {
        throw DimensionError("forward: input has " + std::to_string(z.cols()) + " columns, model expects " +
                             std::to_string(arch.input_dim));
    }
    const auto& layers = model.layers();
    ForwardResult result;
    result.tape.inputs.reserve(layers.size());
    result.tape.preactivations.reserve(layers.size());

    Matrix current = z;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Matrix pre = current * layers[l].weights.transpose();
        pre.rowwise() += layers[l].bias.transpose();
        result.tape.inputs.push_back(std::move(current));
        if (l + 1 < layers.size()) {
            current = pre.cwiseMax(0.0);
        } else {
            current = pre.unaryExpr([](double x) { return sigmoid(x); });
        }
        result.tape.preactivations.push_back(std::move(pre));
    }
    result.output = std::move(current);
    return result;
}

Matrix predict(const MlpModel& model, const Matrix& z) {
    const auto& arch = model.architecture();
    if (z.cols() != arch.input_dim) throw DimensionError("predict: input dimension mismatch");
    const auto& layers = model.layers();
    Matrix current = z;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Matrix pre = current * layers[l].weights.transpose();
        pre.rowwise() += layers[l].bias.transpose();
        if (l + 1 < layers.size()) {
            current = pre.cwiseMax(0.0);
        } else {
            current = pre.unaryExpr([](double x) { return sigmoid(x); });
        }
    }
    return current;
}

LayerParams backward(const MlpModel& model, const ForwardTape& tape, const Matrix& dloss_doutput) {
    const auto& layers = model.layers();
    if (tape.inputs.size() != layers.size() || tape.preactivations.size() != layers.size()) {
        throw DimensionError("backward: tape does not match model");
    }
    const Index n = tape.inputs.front().rows();
    if (dloss_doutput.rows() != n || dloss_doutput.cols() != model.architecture().output_dim) {
        throw DimensionError("backward: output gradient shape mismatch");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (tape.inputs[l].cols() != layers[l].weights.cols() ||
            tape.preactivations[l].cols() != layers[l].weights.rows()) {
            throw DimensionError("backward: tape does not match model");
        }
    }

    LayerParams grad(layers.size());
    // Gradient w.r.t. the pre-activation of the current layer.
    Matrix delta = dloss_doutput.binaryExpr(tape.preactivations.back(), [](double g, double pre) {
        const double s = sigmoid(pre);
        return g * s * (1.0 - s);
    });
    for (std::size_t l = layers.size(); l-- > 0;) {
        grad[l].weights = delta.transpose() * tape.inputs[l];
        grad[l].bias = delta.colwise().sum().transpose();
        if (l == 0) break;
        Matrix upstream = delta * layers[l].weights;
        delta = upstream.binaryExpr(tape.preactivations[l - 1],
                                    [](double g, double pre) { return pre > 0.0 ? g : 0.0; });
    }
    return grad;
}

LayerParams zeros_like(const MlpModel& model) {
    LayerParams out(model.layers().size());
    for (std::size_t l = 0; l < out.size(); ++l) {
        out[l].weights = Matrix::Zero(model.layers()[l].weights.rows(), model.layers()[l].weights.cols());
        out[l].bias = Vector::Zero(model.layers()[l].bias.size());
    }
    return out;
}

AdamState AdamState::for_model(const MlpModel& model) {
    AdamState state;
    state.first_moment = zeros_like(model);
    state.second_moment = zeros_like(model);
    return state;
}

void adam_step(MlpModel& model, const LayerParams& grad, AdamState& state, double learning_rate) {
    check_shapes(model, grad, "adam_step");
    check_shapes(model, state.first_moment, "adam_step (first moment)");
    check_shapes(model, state.second_moment, "adam_step (second moment)");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("adam_step: learning rate must be positive");
    for (const auto& layer : grad) {
        if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
            throw NumericFailure("adam_step: non-finite gradient");
        }
    }

    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(state.beta1, t);
    const double correction2 = 1.0 - std::pow(state.beta2, t);
    const double b1 = state.beta1;
    const double b2 = state.beta2;
    const double eps = state.epsilon;

    auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
        param.array() -= learning_rate * (m.array() / correction1) /
                         ((v.array() / correction2).sqrt() + eps);
    };
    auto& layers = model.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        update(layers[l].weights, grad[l].weights, state.first_moment[l].weights, state.second_moment[l].weights);
        update(layers[l].bias, grad[l].bias, state.first_moment[l].bias, state.second_moment[l].bias);
    }
}

}  // namespace agmmn
