#include "probeflow/probes.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "probeflow/errors.hpp"
#include "probeflow/json_format.hpp"

namespace probeflow {

Matrix softmax_rows(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        auto in = logits.row(r);
        auto dst = out.row(r);
        const double peak = *std::max_element(in.begin(), in.end());
        double total = 0.0;
        for (std::size_t c = 0; c < in.size(); ++c) {
            dst[c] = std::exp(in[c] - peak);
            total += dst[c];
        }
        for (double& p : dst) p /= total;
    }
    return out;
}

double softmax_cross_entropy(const Matrix& logits, std::span<const std::size_t> targets, Matrix* grad_logits) {
    if (logits.rows() == 0) throw ValidationError("loss: empty batch");
    if (targets.size() != logits.rows()) throw ContractError("loss: target count differs from batch size");
    const double inv_batch = 1.0 / static_cast<double>(logits.rows());
    if (grad_logits) *grad_logits = Matrix(logits.rows(), logits.cols());
    double total = 0.0;
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const std::size_t t = targets[r];
        if (t >= logits.cols()) throw ContractError("loss: target id out of range");
        auto in = logits.row(r);
        const double peak = *std::max_element(in.begin(), in.end());
        double sum_exp = 0.0;
        for (double z : in) sum_exp += std::exp(z - peak);
        const double log_norm = peak + std::log(sum_exp);
        total += log_norm - in[t];
        if (grad_logits) {
            auto g = grad_logits->row(r);
            for (std::size_t c = 0; c < in.size(); ++c) g[c] = std::exp(in[c] - log_norm) * inv_batch;
            g[t] -= inv_batch;
        }
    }
    return total * inv_batch;
}

void glorot_uniform(Matrix& weights, Rng& rng) {
    const double fan_in = static_cast<double>(weights.cols());
    const double fan_out = static_cast<double>(weights.rows());
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& w : weights.values()) w = rng.uniform(-limit, limit);
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

void ProbeRegistry::add(ProbeKind kind) {
    const std::string name = kind.name;
    kinds_.insert_or_assign(name, std::move(kind));
}

const ProbeKind* ProbeRegistry::find(std::string_view name) const {
    const auto it = kinds_.find(name);
    return it == kinds_.end() ? nullptr : &it->second;
}

const ProbeKind& ProbeRegistry::at(std::string_view name) const {
    if (const ProbeKind* kind = find(name)) return *kind;
    std::string listed;
    for (const auto& n : names()) listed += (listed.empty() ? "\"" : ", \"") + n + "\"";
    throw ValidationError("unknown probe model \"" + std::string(name) + "\"; registered: {" + listed + "}");
}

std::vector<std::string> ProbeRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, kind] : kinds_) out.push_back(name);
    return out;
}

namespace {

struct NumericBounds {
    double min;
    double max;
    bool integer;
};

void check_param_bounds(const std::string& kind, const ParamSpec& p, const NumericBounds& b) {
    const auto fail = [&](const std::string& why) {
        throw ValidationError(kind + " parameter \"" + p.name + "\": " + why);
    };
    const auto in_bounds = [&](double x) { return x >= b.min && x <= b.max; };
    const std::string bounds = "[" + format_double(b.min) + ", " + format_double(b.max) + "]";
    switch (p.kind) {
        case ParamKind::float_range:
            if (b.integer) fail("expects int_range or integer categorical values");
            [[fallthrough]];
        case ParamKind::int_range:
            if (!in_bounds(p.low) || !in_bounds(p.high)) fail("range must lie within " + bounds);
            break;
        case ParamKind::categorical:
            for (const auto& v : p.choices) {
                if (std::holds_alternative<std::string>(v)) fail("expects numeric values");
                if (b.integer && !std::holds_alternative<std::int64_t>(v)) fail("expects integer values");
                const double x = std::holds_alternative<double>(v) ? std::get<double>(v)
                                                                  : static_cast<double>(std::get<std::int64_t>(v));
                if (!in_bounds(x)) fail("values must lie within " + bounds);
            }
            break;
    }
}

std::function<void(const ModelSearchSpace&)> make_space_validator(
    std::string kind, std::map<std::string, NumericBounds> accepted) {
    return [kind = std::move(kind), accepted = std::move(accepted)](const ModelSearchSpace& space) {
        for (const auto& p : space.params) {
            const auto it = accepted.find(p.name);
            if (it == accepted.end()) {
                std::string listed;
                for (const auto& [name, b] : accepted) listed += (listed.empty() ? "" : ", ") + name;
                throw ValidationError(kind + " model does not accept parameter \"" + p.name + "\"; accepted: " +
                                      listed);
            }
            check_param_bounds(kind, p, it->second);
        }
    };
}

ParamSpec range(std::string name, ParamKind kind, double low, double high, RangeScale scale) {
    ParamSpec p;
    p.name = std::move(name);
    p.kind = kind;
    p.low = low;
    p.high = high;
    p.scale = scale;
    return p;
}

ProbeRegistry build_default_registry() {
    ProbeRegistry registry;

    ProbeKind linear;
    linear.name = "linear";
    linear.default_space = default_linear_space();
    linear.complexity_axis = AxisScale::linear;
    linear.validate_space = make_space_validator(
        "linear", {{"lambda", {0.0, 1e6, false}}, {"learning_rate", {1e-12, 10.0, false}}});
    linear.create = [](const ProbeConfig& config, std::size_t input_dim, std::size_t num_classes, Rng& rng) {
        auto probe = std::make_unique<LinearProbe>(input_dim, num_classes,
                                                   hyper_as_double(config.params, "lambda", 0.0));
        probe->initialize(rng);
        return std::unique_ptr<ProbeModel>(std::move(probe));
    };
    registry.add(std::move(linear));

    ProbeKind mlp;
    mlp.name = "mlp";
    mlp.default_space = default_mlp_space();
    mlp.complexity_axis = AxisScale::log;
    mlp.validate_space = make_space_validator("mlp", {{"hidden_size", {1.0, 65536.0, true}},
                                                      {"num_layers", {1.0, 16.0, true}},
                                                      {"dropout", {0.0, 0.9, false}},
                                                      {"learning_rate", {1e-12, 10.0, false}}});
    mlp.create = [](const ProbeConfig& config, std::size_t input_dim, std::size_t num_classes, Rng& rng) {
        const auto hidden = static_cast<std::size_t>(hyper_as_int(config.params, "hidden_size", 64));
        const auto layers = static_cast<std::size_t>(hyper_as_int(config.params, "num_layers", 1));
        auto probe = std::make_unique<MlpProbe>(input_dim, std::vector<std::size_t>(layers, hidden), num_classes,
                                                hyper_as_double(config.params, "dropout", 0.0));
        probe->initialize(rng);
        return std::unique_ptr<ProbeModel>(std::move(probe));
    };
    registry.add(std::move(mlp));

    return registry;
}

}  // namespace

ModelSearchSpace default_linear_space() {
    return {"linear",
            {range("lambda", ParamKind::float_range, 1e-4, 10.0, RangeScale::log),
             range("learning_rate", ParamKind::float_range, 1e-4, 1e-2, RangeScale::log)}};
}

ModelSearchSpace default_mlp_space() {
    ParamSpec layers;
    layers.name = "num_layers";
    layers.kind = ParamKind::categorical;
    layers.choices = {std::int64_t{1}, std::int64_t{2}, std::int64_t{3}};
    return {"mlp",
            {range("hidden_size", ParamKind::int_range, 16, 1024, RangeScale::log), layers,
             range("dropout", ParamKind::float_range, 0.0, 0.5, RangeScale::linear),
             range("learning_rate", ParamKind::float_range, 1e-4, 1e-2, RangeScale::log)}};
}

const ProbeRegistry& default_probe_registry() {
    static const ProbeRegistry registry = build_default_registry();
    return registry;
}

}  // namespace probeflow
