#include <cmath>

#include "probeflow/errors.hpp"
#include "probeflow/probes.hpp"

namespace probeflow {

struct MlpProbe::Activations {
    std::vector<Matrix> inputs;  // inputs[l] feeds layer l; inputs[0] is the batch
    std::vector<Matrix> pre;     // pre-activations of hidden layers
    std::vector<Matrix> masks;   // scaled dropout masks; empty when dropout is off
    Matrix logits;
};

MlpProbe::MlpProbe(std::size_t input_dim, std::vector<std::size_t> hidden_sizes, std::size_t num_classes,
                   double dropout_rate)
    : input_dim_(input_dim), num_classes_(num_classes), dropout_rate_(dropout_rate) {
    if (input_dim == 0 || num_classes == 0) throw ContractError("MlpProbe: zero-sized shape");
    if (!(dropout_rate >= 0.0 && dropout_rate <= 0.9)) throw ValidationError("MlpProbe: dropout must lie in [0, 0.9]");
    std::size_t fan_in = input_dim;
    for (std::size_t width : hidden_sizes) {
        if (width == 0) throw ValidationError("MlpProbe: hidden layer width must be >= 1");
        params_.emplace_back(width, fan_in);
        params_.emplace_back(1, width);
        fan_in = width;
    }
    params_.emplace_back(num_classes, fan_in);
    params_.emplace_back(1, num_classes);
}

void MlpProbe::initialize(Rng& rng) {
    for (std::size_t layer = 0; layer < num_layers(); ++layer) {
        glorot_uniform(layer_weights(layer), rng);
        layer_bias(layer) = Matrix(1, layer_bias(layer).cols());
    }
}

namespace {

void add_bias_rows(Matrix& m, const Matrix& bias) {
    const auto b = bias.row(0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] += b[c];
    }
}

void accumulate_column_sums(const Matrix& m, Matrix& out) {
    auto dst = out.row(0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) dst[c] += row[c];
    }
}

}  // namespace

MlpProbe::Activations MlpProbe::run_forward(const Matrix& batch, const PassMode& mode) const {
    if (batch.cols() != input_dim_) {
        throw ContractError("MlpProbe::forward: batch width " + std::to_string(batch.cols()) + " != input dim " +
                            std::to_string(input_dim_));
    }
    const bool dropout = mode.dropout_seed.has_value() && dropout_rate_ > 0.0;
    Rng mask_rng(mode.dropout_seed.value_or(0));
    const double keep_scale = 1.0 / (1.0 - dropout_rate_);

    Activations act;
    act.inputs.push_back(batch);
    const std::size_t hidden_layers = num_layers() - 1;
    for (std::size_t layer = 0; layer < hidden_layers; ++layer) {
        Matrix z = matmul_bt(act.inputs.back(), layer_weights(layer));
        add_bias_rows(z, layer_bias(layer));
        Matrix a(z.rows(), z.cols());
        for (std::size_t i = 0; i < z.size(); ++i) a.values()[i] = z.values()[i] > 0.0 ? z.values()[i] : 0.0;
        if (dropout) {
            Matrix mask(z.rows(), z.cols());
            for (double& m : mask.values()) m = mask_rng.uniform01() < dropout_rate_ ? 0.0 : keep_scale;
            for (std::size_t i = 0; i < a.size(); ++i) a.values()[i] *= mask.values()[i];
            act.masks.push_back(std::move(mask));
        }
        act.pre.push_back(std::move(z));
        act.inputs.push_back(std::move(a));
    }
    act.logits = matmul_bt(act.inputs.back(), layer_weights(hidden_layers));
    add_bias_rows(act.logits, layer_bias(hidden_layers));
    return act;
}

Matrix MlpProbe::forward(const Matrix& batch, const PassMode& mode) const {
    return run_forward(batch, mode).logits;
}

double MlpProbe::loss(const Matrix& batch, std::span<const std::size_t> targets, const PassMode& mode) const {
    return softmax_cross_entropy(forward(batch, mode), targets);
}

LossAndGradient MlpProbe::loss_and_gradient(const Matrix& batch, std::span<const std::size_t> targets,
                                            const PassMode& mode) const {
    const Activations act = run_forward(batch, mode);
    LossAndGradient out;
    Matrix delta;  // gradient w.r.t. the current layer's output (pre-activation for hidden layers)
    out.loss = softmax_cross_entropy(act.logits, targets, &delta);
    out.gradients.resize(params_.size());

    for (std::size_t layer = num_layers(); layer-- > 0;) {
        const Matrix& input = act.inputs[layer];
        out.gradients[2 * layer] = matmul_at(delta, input);
        Matrix grad_b(1, layer_bias(layer).cols());
        accumulate_column_sums(delta, grad_b);
        out.gradients[2 * layer + 1] = std::move(grad_b);
        if (layer == 0) break;

        // Back through layer `layer`'s weights into hidden layer `layer - 1`.
        Matrix upstream = matmul(delta, layer_weights(layer));
        const Matrix& z = act.pre[layer - 1];
        const Matrix* mask = act.masks.empty() ? nullptr : &act.masks[layer - 1];
        for (std::size_t i = 0; i < upstream.size(); ++i) {
            double g = z.values()[i] > 0.0 ? upstream.values()[i] : 0.0;
            if (mask) g *= mask->values()[i];
            upstream.values()[i] = g;
        }
        delta = std::move(upstream);
    }
    return out;
}

double MlpProbe::complexity() const {
    double count = 0.0;
    for (const auto& p : params_) count += static_cast<double>(p.size());
    return count;
}

}  // namespace probeflow
