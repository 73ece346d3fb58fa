#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "probeflow/data_model.hpp"
#include "probeflow/metrics.hpp"
#include "probeflow/probes.hpp"

namespace probeflow {

// Adam with β₁ = 0.9, β₂ = 0.999, ε = 1e-8.
class AdamOptimizer {
public:
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEpsilon = 1e-8;

    AdamOptimizer(const std::vector<Matrix>& params, double learning_rate);

    void step(std::vector<Matrix>& params, const std::vector<Matrix>& gradients);

    std::size_t steps() const noexcept { return steps_; }
    double learning_rate() const noexcept { return learning_rate_; }

private:
    std::vector<Matrix> first_moment_;
    std::vector<Matrix> second_moment_;
    std::size_t steps_ = 0;
    double learning_rate_;
};

struct TrainingRegime {
    std::size_t batch_size = 32;
    std::size_t epochs = 10;
    std::string intra_metric = "accuracy";  // selects the best dev epoch
};

struct RunOutcome {
    RunResult result;                    // key left for the caller to fill
    std::unique_ptr<ProbeModel> probe;   // restored best-dev parameters; null for failed runs
};

// Trains one probe for exactly `regime.epochs` epochs of seeded mini-batches,
// keeps the parameters of the best dev epoch (ties → earlier), and scores
// every registered intra metric on the test split. A non-finite loss marks the
// run failed instead of throwing.
RunOutcome train_probe(const ProbeConfig& config, const Matrix& embeddings, std::span<const std::size_t> labels,
                       std::size_t num_classes, const SplitIndices& splits, const TrainingRegime& regime,
                       std::uint64_t run_seed, const ProbeRegistry& probes = default_probe_registry(),
                       const MetricRegistry& metrics = default_metric_registry());

enum class LabelSource { auxiliary, control };

RunOutcome train_probe(const ProbeConfig& config, const TaskEntry& task, const RepresentationEntry& rep,
                       const SplitIndices& splits, LabelSource labels, const TrainingRegime& regime,
                       std::uint64_t run_seed, const ProbeRegistry& probes = default_probe_registry(),
                       const MetricRegistry& metrics = default_metric_registry());

// Stable 64-bit mix of the global seed and the key's canonical byte encoding.
std::uint64_t derive_run_seed(std::uint64_t global_seed, const RunKey& key);

struct FlowOptions {
    std::size_t workers = 1;
    // Called from worker threads after each run; must be thread-safe.
    std::function<void(const RunResult&, std::size_t completed, std::size_t total)> on_run_complete;
};

// Trains an auxiliary and a control probe for every (task, representation,
// model kind, configuration) and returns the records ordered by task,
// representation, model kind (plan order), config index, aux before control.
std::vector<RunResult> run_flow(const ExperimentPlan& plan, const FlowOptions& options = {},
                                const ProbeRegistry& probes = default_probe_registry(),
                                const MetricRegistry& metrics = default_metric_registry());

}  // namespace probeflow
