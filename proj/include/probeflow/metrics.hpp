#pragma once

#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "probeflow/data_model.hpp"
#include "probeflow/linalg.hpp"

namespace probeflow {

// Fraction of exact matches. Throws on empty or mismatched inputs.
double accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> gold);

// Mean −log p(gold) with probabilities clamped below at 1e-12. Rows must sum
// to 1 within 1e-6.
double cross_entropy(const Matrix& probabilities, std::span<const std::size_t> gold);

// accuracy(aux) − accuracy(control) for runs sharing a key modulo is_control.
double selectivity(const RunResult& aux, const RunResult& control);

// Index of the largest entry per row; ties go to the lowest index.
std::vector<std::size_t> argmax_rows(const Matrix& m);

inline constexpr double kProbabilityFloor = 1e-12;

enum class MetricArity { intra, inter };
enum class Orientation { higher_better, lower_better };

using IntraMetricFn = std::function<double(const Matrix& probabilities, std::span<const std::size_t> gold)>;
using InterMetricFn = std::function<double(const RunResult& aux, const RunResult& control)>;

struct MetricSpec {
    std::string name;
    MetricArity arity = MetricArity::intra;
    Orientation orientation = Orientation::higher_better;
    double min = -std::numeric_limits<double>::infinity();
    double max = std::numeric_limits<double>::infinity();
    IntraMetricFn intra;
    InterMetricFn inter;

    bool improves(double candidate, double incumbent) const {
        return orientation == Orientation::higher_better ? candidate > incumbent : candidate < incumbent;
    }
    bool in_range(double value) const { return value >= min && value <= max; }
};

// New metrics are added by registering a MetricSpec; the pipeline looks
// metrics up by the names used in the probing configuration.
class MetricRegistry {
public:
    void add(MetricSpec spec);
    const MetricSpec* find(std::string_view name) const;
    // ValidationError listing the registered names of that arity when absent.
    const MetricSpec& at(std::string_view name, MetricArity arity) const;
    std::vector<std::string> names(MetricArity arity) const;

private:
    std::map<std::string, MetricSpec, std::less<>> metrics_;
};

// accuracy, cross_entropy (intra); selectivity (inter).
const MetricRegistry& default_metric_registry();

struct MetricsOutcome {
    std::vector<RunResult> results;
    // Auxiliary runs left without an inter-metric because their control run failed.
    std::vector<RunKey> unpaired;
};

MetricsOutcome calculate_metrics(const MetricRegistry& registry, const std::string& inter_metric,
                                 std::vector<RunResult> results);
MetricsOutcome calculate_metrics(const MetricRegistry& registry, const ExperimentPlan& plan,
                                 std::vector<RunResult> results);

}  // namespace probeflow
