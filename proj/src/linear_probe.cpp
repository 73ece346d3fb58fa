#include <cmath>

#include "probeflow/errors.hpp"
#include "probeflow/probes.hpp"

namespace probeflow {

LinearProbe::LinearProbe(std::size_t input_dim, std::size_t num_classes, double lambda) : lambda_(lambda) {
    if (input_dim == 0 || num_classes == 0) throw ContractError("LinearProbe: zero-sized shape");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("LinearProbe: lambda must be finite and >= 0");
    params_ = {Matrix(num_classes, input_dim), Matrix(1, num_classes)};
}

LinearProbe::LinearProbe(Matrix weights, std::vector<double> bias, double lambda)
    : LinearProbe(weights.cols(), weights.rows(), lambda) {
    if (bias.size() != weights.rows()) throw ContractError("LinearProbe: bias length differs from class count");
    const std::size_t classes = bias.size();
    params_[0] = std::move(weights);
    params_[1] = Matrix(1, classes, std::move(bias));
}

void LinearProbe::initialize(Rng& rng) {
    glorot_uniform(params_[0], rng);
    params_[1] = Matrix(1, num_classes());
}

Matrix LinearProbe::forward(const Matrix& batch, const PassMode&) const {
    if (batch.cols() != input_dim()) {
        throw ContractError("LinearProbe::forward: batch width " + std::to_string(batch.cols()) +
                            " != input dim " + std::to_string(input_dim()));
    }
    Matrix logits = matmul_bt(batch, params_[0]);
    const auto b = params_[1].row(0);
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        auto row = logits.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] += b[c];
    }
    return logits;
}

double LinearProbe::loss(const Matrix& batch, std::span<const std::size_t> targets, const PassMode& mode) const {
    double value = softmax_cross_entropy(forward(batch, mode), targets);
    if (lambda_ > 0.0) value += lambda_ * nuclear_norm(params_[0]);
    return value;
}

LossAndGradient LinearProbe::loss_and_gradient(const Matrix& batch, std::span<const std::size_t> targets,
                                               const PassMode& mode) const {
    Matrix grad_logits;
    LossAndGradient out;
    out.loss = softmax_cross_entropy(forward(batch, mode), targets, &grad_logits);

    Matrix grad_w = matmul_at(grad_logits, batch);
    Matrix grad_b(1, num_classes());
    for (std::size_t r = 0; r < grad_logits.rows(); ++r) {
        auto g = grad_logits.row(r);
        for (std::size_t c = 0; c < g.size(); ++c) grad_b(0, c) += g[c];
    }
    if (lambda_ > 0.0) {
        const NuclearNormTerms penalty = nuclear_norm_terms(params_[0]);
        out.loss += lambda_ * penalty.value;
        grad_w += lambda_ * penalty.subgradient;
    }
    out.gradients = {std::move(grad_w), std::move(grad_b)};
    return out;
}

double LinearProbe::complexity() const { return nuclear_norm(params_[0]); }

}  // namespace probeflow
