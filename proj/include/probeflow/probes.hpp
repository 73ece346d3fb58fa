#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "probeflow/data_model.hpp"
#include "probeflow/linalg.hpp"
#include "probeflow/rng.hpp"

namespace probeflow {

// Forward-pass mode. Dropout is applied only when `dropout_seed` is set; the
// masks are a pure function of the seed, so a training step is reproducible.
struct PassMode {
    std::optional<std::uint64_t> dropout_seed;

    static PassMode eval() { return {}; }
    static PassMode train(std::uint64_t seed) { return {seed}; }
};

struct LossAndGradient {
    double loss = 0.0;
    std::vector<Matrix> gradients;  // same shapes and order as ProbeModel::parameters()
};

// Contract every probe kind implements. Parameters live in the base class as
// a flat list of matrices (biases are 1×n) so the optimizer and checkpointing
// stay generic.
class ProbeModel {
public:
    virtual ~ProbeModel() = default;

    virtual std::string_view kind() const = 0;
    virtual std::size_t input_dim() const = 0;
    virtual std::size_t num_classes() const = 0;

    // Logits, B × num_classes.
    virtual Matrix forward(const Matrix& batch, const PassMode& mode = PassMode::eval()) const = 0;

    // Mean softmax cross-entropy over the batch plus any model-specific penalty.
    virtual double loss(const Matrix& batch, std::span<const std::size_t> targets,
                        const PassMode& mode = PassMode::eval()) const = 0;

    virtual LossAndGradient loss_and_gradient(const Matrix& batch, std::span<const std::size_t> targets,
                                              const PassMode& mode = PassMode::eval()) const = 0;

    // Scalar expressivity proxy plotted on the x axis.
    virtual double complexity() const = 0;

    std::vector<Matrix>& parameters() noexcept { return params_; }
    const std::vector<Matrix>& parameters() const noexcept { return params_; }

protected:
    std::vector<Matrix> params_;
};

// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& logits);

// Mean −log softmax(logits)[target] and its gradient w.r.t. the logits.
double softmax_cross_entropy(const Matrix& logits, std::span<const std::size_t> targets,
                             Matrix* grad_logits = nullptr);

// Ŷ = X·Wᵀ + b with a λ-weighted nuclear-norm penalty on W (|T| × d).
class LinearProbe final : public ProbeModel {
public:
    LinearProbe(std::size_t input_dim, std::size_t num_classes, double lambda);
    LinearProbe(Matrix weights, std::vector<double> bias, double lambda);

    std::string_view kind() const override { return "linear"; }
    std::size_t input_dim() const override { return params_[0].cols(); }
    std::size_t num_classes() const override { return params_[0].rows(); }

    Matrix forward(const Matrix& batch, const PassMode& mode = PassMode::eval()) const override;
    double loss(const Matrix& batch, std::span<const std::size_t> targets,
                const PassMode& mode = PassMode::eval()) const override;
    LossAndGradient loss_and_gradient(const Matrix& batch, std::span<const std::size_t> targets,
                                      const PassMode& mode = PassMode::eval()) const override;
    double complexity() const override;

    const Matrix& weights() const noexcept { return params_[0]; }
    const Matrix& bias() const noexcept { return params_[1]; }
    double lambda() const noexcept { return lambda_; }

    void initialize(Rng& rng);

private:
    double lambda_;
};

// Affine → ReLU (→ inverted dropout) per hidden layer, then an affine output.
class MlpProbe final : public ProbeModel {
public:
    MlpProbe(std::size_t input_dim, std::vector<std::size_t> hidden_sizes, std::size_t num_classes,
             double dropout_rate);

    std::string_view kind() const override { return "mlp"; }
    std::size_t input_dim() const override { return input_dim_; }
    std::size_t num_classes() const override { return num_classes_; }

    Matrix forward(const Matrix& batch, const PassMode& mode = PassMode::eval()) const override;
    double loss(const Matrix& batch, std::span<const std::size_t> targets,
                const PassMode& mode = PassMode::eval()) const override;
    LossAndGradient loss_and_gradient(const Matrix& batch, std::span<const std::size_t> targets,
                                      const PassMode& mode = PassMode::eval()) const override;
    // Total number of trainable scalars.
    double complexity() const override;

    std::size_t num_layers() const noexcept { return params_.size() / 2; }
    const Matrix& layer_weights(std::size_t layer) const { return params_[2 * layer]; }
    const Matrix& layer_bias(std::size_t layer) const { return params_[2 * layer + 1]; }
    Matrix& layer_weights(std::size_t layer) { return params_[2 * layer]; }
    Matrix& layer_bias(std::size_t layer) { return params_[2 * layer + 1]; }
    double dropout_rate() const noexcept { return dropout_rate_; }

    void initialize(Rng& rng);

private:
    struct Activations;
    Activations run_forward(const Matrix& batch, const PassMode& mode) const;

    std::size_t input_dim_;
    std::size_t num_classes_;
    double dropout_rate_;
};

// Weights uniform in ±√(6/(fan_in+fan_out)), biases zero.
void glorot_uniform(Matrix& weights, Rng& rng);

// ---------------------------------------------------------------------------
// Registry of probe kinds
// ---------------------------------------------------------------------------

enum class AxisScale { linear, log };

struct ProbeKind {
    std::string name;
    ModelSearchSpace default_space;
    AxisScale complexity_axis = AxisScale::linear;
    // Throws ValidationError when a user space names unknown parameters or
    // ranges outside what the kind can instantiate.
    std::function<void(const ModelSearchSpace&)> validate_space;
    std::function<std::unique_ptr<ProbeModel>(const ProbeConfig&, std::size_t input_dim,
                                              std::size_t num_classes, Rng& init_rng)>
        create;
};

class ProbeRegistry {
public:
    void add(ProbeKind kind);
    const ProbeKind* find(std::string_view name) const;
    const ProbeKind& at(std::string_view name) const;  // ValidationError listing names if absent
    std::vector<std::string> names() const;

private:
    std::map<std::string, ProbeKind, std::less<>> kinds_;
};

// Built-in kinds "linear" and "mlp".
const ProbeRegistry& default_probe_registry();

ModelSearchSpace default_linear_space();
ModelSearchSpace default_mlp_space();

// Learning rate used when a configuration does not sample one.
inline constexpr double kDefaultLearningRate = 1e-3;

// k configurations. Ranged parameters are Latin-hypercube stratified on their
// declared scale, each dimension permuted independently; categorical values
// are dealt round-robin in a seeded order.
std::vector<ProbeConfig> sample_configs(const ModelSearchSpace& space, std::size_t k, std::uint64_t seed);

}  // namespace probeflow
