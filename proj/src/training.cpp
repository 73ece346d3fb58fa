#include "probeflow/training.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "probeflow/errors.hpp"
#include "probeflow/rng.hpp"

namespace probeflow {

AdamOptimizer::AdamOptimizer(const std::vector<Matrix>& params, double learning_rate)
    : learning_rate_(learning_rate) {
    for (const auto& p : params) {
        first_moment_.emplace_back(p.rows(), p.cols());
        second_moment_.emplace_back(p.rows(), p.cols());
    }
}

void AdamOptimizer::step(std::vector<Matrix>& params, const std::vector<Matrix>& gradients) {
    if (params.size() != first_moment_.size() || gradients.size() != params.size()) {
        throw ContractError("AdamOptimizer::step: parameter list changed shape");
    }
    ++steps_;
    const double t = static_cast<double>(steps_);
    const double correction1 = 1.0 - std::pow(kBeta1, t);
    const double correction2 = 1.0 - std::pow(kBeta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto p = params[i].values();
        auto g = gradients[i].values();
        auto m = first_moment_[i].values();
        auto v = second_moment_[i].values();
        for (std::size_t j = 0; j < p.size(); ++j) {
            m[j] = kBeta1 * m[j] + (1.0 - kBeta1) * g[j];
            v[j] = kBeta2 * v[j] + (1.0 - kBeta2) * g[j] * g[j];
            const double m_hat = m[j] / correction1;
            const double v_hat = v[j] / correction2;
            p[j] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + kEpsilon);
        }
    }
}

namespace {

bool all_finite(const std::vector<Matrix>& mats) {
    for (const auto& m : mats) {
        if (!m.all_finite()) return false;
    }
    return true;
}

std::vector<std::size_t> gather_labels(std::span<const std::size_t> labels, std::span<const std::size_t> indices) {
    std::vector<std::size_t> out(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) out[i] = labels[indices[i]];
    return out;
}

RunOutcome failed_run(RunOutcome outcome, std::string why) {
    outcome.result.failure = std::move(why);
    outcome.result.complexity = 0.0;
    outcome.result.intra_scores.clear();
    outcome.result.dev_score = 0.0;
    outcome.result.best_epoch = 0;
    outcome.probe.reset();
    return outcome;
}

}  // namespace

RunOutcome train_probe(const ProbeConfig& config, const Matrix& embeddings, std::span<const std::size_t> labels,
                       std::size_t num_classes, const SplitIndices& splits, const TrainingRegime& regime,
                       std::uint64_t run_seed, const ProbeRegistry& probes, const MetricRegistry& metrics) {
    if (regime.epochs == 0 || regime.batch_size == 0) throw ValidationError("train_probe: epochs and batch_size must be >= 1");
    if (labels.size() != embeddings.rows()) throw ContractError("train_probe: label count differs from embedding rows");
    if (splits.train.empty() || splits.dev.empty() || splits.test.empty()) {
        throw ValidationError("train_probe: every split must be non-empty");
    }
    const MetricSpec& selection = metrics.at(regime.intra_metric, MetricArity::intra);

    Rng init_rng(seed_for(run_seed, "init"));
    Rng shuffle_rng(seed_for(run_seed, "shuffle"));
    const std::uint64_t dropout_base = seed_for(run_seed, "dropout");

    RunOutcome outcome;
    outcome.probe = probes.at(config.model_kind).create(config, embeddings.cols(), num_classes, init_rng);
    ProbeModel& probe = *outcome.probe;
    RunResult& result = outcome.result;
    result.hyperparameters = config.params;
    result.num_classes = num_classes;

    const Matrix train_x = gather_rows(embeddings, splits.train);
    const auto train_y = gather_labels(labels, splits.train);
    const Matrix dev_x = gather_rows(embeddings, splits.dev);
    const auto dev_y = gather_labels(labels, splits.dev);

    AdamOptimizer optimizer(probe.parameters(), hyper_as_double(config.params, "learning_rate", kDefaultLearningRate));
    std::vector<std::size_t> order(train_y.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::optional<double> best_score;
    std::vector<Matrix> best_params;
    std::uint64_t step = 0;
    for (std::size_t epoch = 1; epoch <= regime.epochs; ++epoch) {
        shuffle_rng.shuffle(std::span<std::size_t>(order));
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += regime.batch_size) {
            const std::size_t stop = std::min(order.size(), start + regime.batch_size);
            const std::span<const std::size_t> rows(order.data() + start, stop - start);
            const Matrix batch = gather_rows(train_x, rows);
            const auto targets = gather_labels(train_y, rows);
            const LossAndGradient lg = probe.loss_and_gradient(batch, targets, PassMode::train(mix64(dropout_base + step++)));
            if (!std::isfinite(lg.loss) || !all_finite(lg.gradients)) {
                return failed_run(std::move(outcome), "non-finite loss or gradient at epoch " + std::to_string(epoch));
            }
            optimizer.step(probe.parameters(), lg.gradients);
            loss_sum += lg.loss;
            ++batches;
        }
        if (!all_finite(probe.parameters())) {
            return failed_run(std::move(outcome), "non-finite parameters after epoch " + std::to_string(epoch));
        }
        result.train_loss_curve.push_back(loss_sum / static_cast<double>(batches));
        result.train_accuracy_curve.push_back(accuracy(argmax_rows(probe.forward(train_x)), train_y));

        const double dev_score = selection.intra(softmax_rows(probe.forward(dev_x)), dev_y);
        if (!std::isfinite(dev_score)) {
            return failed_run(std::move(outcome), "non-finite dev " + selection.name + " at epoch " + std::to_string(epoch));
        }
        if (!best_score || selection.improves(dev_score, *best_score)) {
            best_score = dev_score;
            best_params = probe.parameters();
            result.best_epoch = epoch;
        }
    }

    probe.parameters() = std::move(best_params);
    result.dev_score = *best_score;
    const Matrix test_probs = softmax_rows(probe.forward(gather_rows(embeddings, splits.test)));
    const auto test_y = gather_labels(labels, splits.test);
    for (const auto& name : metrics.names(MetricArity::intra)) {
        result.intra_scores[name] = metrics.at(name, MetricArity::intra).intra(test_probs, test_y);
    }
    result.complexity = probe.complexity();
    return outcome;
}

RunOutcome train_probe(const ProbeConfig& config, const TaskEntry& task, const RepresentationEntry& rep,
                       const SplitIndices& splits, LabelSource labels, const TrainingRegime& regime,
                       std::uint64_t run_seed, const ProbeRegistry& probes, const MetricRegistry& metrics) {
    const bool control = labels == LabelSource::control;
    const auto& ids = control ? control_labels_for(task, rep) : task.task.label_ids;
    const std::size_t classes = control ? control_vocab_for(task, rep).size() : task.task.vocab.size();
    RunOutcome outcome = train_probe(config, rep.set.embeddings, ids, classes, splits, regime, run_seed, probes, metrics);
    outcome.result.key = {task.task.name, rep.set.name, config.model_kind, 0, control};
    return outcome;
}

std::uint64_t derive_run_seed(std::uint64_t global_seed, const RunKey& key) {
    // Canonical encoding: length-prefixed strings, then index and flag.
    std::vector<unsigned char> bytes;
    const auto put_u64 = [&](std::uint64_t x) {
        for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<unsigned char>(x >> (8 * i)));
    };
    for (const std::string* s : {&key.task_name, &key.representation_name, &key.model_kind}) {
        put_u64(s->size());
        bytes.insert(bytes.end(), s->begin(), s->end());
    }
    put_u64(key.config_index);
    bytes.push_back(key.is_control ? 1 : 0);

    std::uint64_t h = mix64(global_seed);
    for (std::size_t i = 0; i < bytes.size(); i += 8) {
        std::uint64_t chunk = 0;
        for (std::size_t j = 0; j < 8 && i + j < bytes.size(); ++j) chunk |= std::uint64_t{bytes[i + j]} << (8 * j);
        h = mix64(h ^ chunk);
    }
    return mix64(h ^ bytes.size());
}

}  // namespace probeflow
