#include "probeflow/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "probeflow/errors.hpp"
#include "probeflow/json_format.hpp"

namespace probeflow {

double accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> gold) {
    if (predicted.empty()) throw ValidationError("accuracy: empty input");
    if (predicted.size() != gold.size()) {
        throw ValidationError("accuracy: " + std::to_string(predicted.size()) + " predictions for " +
                              std::to_string(gold.size()) + " gold labels");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) hits += predicted[i] == gold[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(gold.size());
}

double cross_entropy(const Matrix& probabilities, std::span<const std::size_t> gold) {
    if (probabilities.rows() == 0) throw ValidationError("cross_entropy: empty input");
    if (probabilities.rows() != gold.size()) throw ValidationError("cross_entropy: row count differs from gold count");
    double total = 0.0;
    for (std::size_t r = 0; r < probabilities.rows(); ++r) {
        auto row = probabilities.row(r);
        double sum = 0.0;
        for (double p : row) sum += p;
        if (std::abs(sum - 1.0) > 1e-6) {
            throw ValidationError("cross_entropy: row " + std::to_string(r) + " sums to " + format_double(sum));
        }
        if (gold[r] >= row.size()) throw ValidationError("cross_entropy: gold id out of range");
        total -= std::log(std::max(row[gold[r]], kProbabilityFloor));
    }
    return total / static_cast<double>(probabilities.rows());
}

std::vector<std::size_t> argmax_rows(const Matrix& m) {
    std::vector<std::size_t> out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        out[r] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return out;
}

namespace {

bool same_pair(const RunKey& a, const RunKey& b) {
    return a.task_name == b.task_name && a.representation_name == b.representation_name &&
           a.model_kind == b.model_kind && a.config_index == b.config_index;
}

double require_score(const RunResult& r, const std::string& metric) {
    const auto it = r.intra_scores.find(metric);
    if (it == r.intra_scores.end()) {
        throw PairingError("run " + to_string(r.key) + " carries no " + metric + " score");
    }
    return it->second;
}

}  // namespace

double selectivity(const RunResult& aux, const RunResult& control) {
    if (aux.key.is_control || !control.key.is_control || !same_pair(aux.key, control.key)) {
        throw PairingError("selectivity: runs " + to_string(aux.key) + " and " + to_string(control.key) +
                           " are not an auxiliary/control pair");
    }
    return require_score(aux, "accuracy") - require_score(control, "accuracy");
}

// ---------------------------------------------------------------------------

void MetricRegistry::add(MetricSpec spec) {
    const std::string name = spec.name;
    metrics_.insert_or_assign(name, std::move(spec));
}

const MetricSpec* MetricRegistry::find(std::string_view name) const {
    const auto it = metrics_.find(name);
    return it == metrics_.end() ? nullptr : &it->second;
}

const MetricSpec& MetricRegistry::at(std::string_view name, MetricArity arity) const {
    const MetricSpec* spec = find(name);
    if (spec && spec->arity == arity) return *spec;
    std::string listed;
    for (const auto& n : names(arity)) listed += (listed.empty() ? "\"" : ", \"") + n + "\"";
    throw ValidationError("unknown " + std::string(arity == MetricArity::intra ? "intra" : "inter") + " metric \"" +
                          std::string(name) + "\"; registered: {" + listed + "}");
}

std::vector<std::string> MetricRegistry::names(MetricArity arity) const {
    std::vector<std::string> out;
    for (const auto& [name, spec] : metrics_) {
        if (spec.arity == arity) out.push_back(name);
    }
    return out;
}

namespace {

MetricRegistry build_default_metrics() {
    MetricRegistry registry;
    registry.add({.name = "accuracy",
                  .arity = MetricArity::intra,
                  .orientation = Orientation::higher_better,
                  .min = 0.0,
                  .max = 1.0,
                  .intra = [](const Matrix& probs, std::span<const std::size_t> gold) {
                      return accuracy(argmax_rows(probs), gold);
                  },
                  .inter = {}});
    registry.add({.name = "cross_entropy",
                  .arity = MetricArity::intra,
                  .orientation = Orientation::lower_better,
                  .min = 0.0,
                  .max = std::numeric_limits<double>::infinity(),
                  .intra = [](const Matrix& probs, std::span<const std::size_t> gold) {
                      return cross_entropy(probs, gold);
                  },
                  .inter = {}});
    registry.add({.name = "selectivity",
                  .arity = MetricArity::inter,
                  .orientation = Orientation::higher_better,
                  .min = -1.0,
                  .max = 1.0,
                  .intra = {},
                  .inter = [](const RunResult& aux, const RunResult& control) { return selectivity(aux, control); }});
    return registry;
}

}  // namespace

const MetricRegistry& default_metric_registry() {
    static const MetricRegistry registry = build_default_metrics();
    return registry;
}

// ---------------------------------------------------------------------------

MetricsOutcome calculate_metrics(const MetricRegistry& registry, const std::string& inter_metric,
                                 std::vector<RunResult> results) {
    const MetricSpec& inter = registry.at(inter_metric, MetricArity::inter);

    std::map<RunKey, std::size_t> index;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!index.emplace(results[i].key, i).second) {
            throw PairingError("duplicate run " + to_string(results[i].key));
        }
        if (results[i].failed()) continue;
        for (const auto& [name, value] : results[i].intra_scores) {
            const MetricSpec* spec = registry.find(name);
            if (spec && !spec->in_range(value)) {
                throw ValidationError("run " + to_string(results[i].key) + ": " + name + " = " + format_double(value) +
                                      " outside its declared range");
            }
        }
    }

    MetricsOutcome out;
    for (const auto& r : results) {
        RunKey partner = r.key;
        partner.is_control = !partner.is_control;
        if (!index.contains(partner)) {
            throw PairingError("run " + to_string(r.key) + " has no " + (r.key.is_control ? "auxiliary" : "control") +
                               " partner");
        }
    }
    for (auto& r : results) {
        if (r.key.is_control || r.failed()) continue;
        RunKey partner = r.key;
        partner.is_control = true;
        const RunResult& control = results[index.at(partner)];
        if (control.failed()) {
            out.unpaired.push_back(r.key);
            continue;
        }
        r.inter_scores[inter.name] = inter.inter(r, control);
    }
    out.results = std::move(results);
    return out;
}

MetricsOutcome calculate_metrics(const MetricRegistry& registry, const ExperimentPlan& plan,
                                 std::vector<RunResult> results) {
    return calculate_metrics(registry, plan.inter_metric, std::move(results));
}

}  // namespace probeflow
