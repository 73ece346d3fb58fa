#include "probeflow/data_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "probeflow/errors.hpp"
#include "probeflow/json_format.hpp"
#include "probeflow/rng.hpp"

namespace probeflow {

double hyper_as_double(const Hyperparameters& params, const std::string& name, double fallback) {
    const auto it = params.find(name);
    if (it == params.end()) return fallback;
    if (const auto* d = std::get_if<double>(&it->second)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
    throw ValidationError("hyperparameter '" + name + "' must be numeric, got \"" +
                          std::get<std::string>(it->second) + "\"");
}

std::int64_t hyper_as_int(const Hyperparameters& params, const std::string& name, std::int64_t fallback) {
    const auto it = params.find(name);
    if (it == params.end()) return fallback;
    if (const auto* i = std::get_if<std::int64_t>(&it->second)) return *i;
    if (const auto* d = std::get_if<double>(&it->second)) return static_cast<std::int64_t>(std::llround(*d));
    throw ValidationError("hyperparameter '" + name + "' must be numeric, got \"" +
                          std::get<std::string>(it->second) + "\"");
}

std::string hyper_to_string(const HyperValue& value) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&value)) return format_double(*d, 6);
    return std::get<std::string>(value);
}

const std::vector<std::size_t>& control_labels_for(const TaskEntry& task, const RepresentationEntry& rep) {
    return rep.control_override ? rep.control_override->label_ids : task.task.control_label_ids;
}

const LabelVocab& control_vocab_for(const TaskEntry& task, const RepresentationEntry& rep) {
    return rep.control_override ? rep.control_override->vocab : task.task.control_vocab;
}

std::string to_string(const RunKey& key) {
    return key.task_name + "/" + key.representation_name + "/" + key.model_kind + "/#" +
           std::to_string(key.config_index) + (key.is_control ? "/control" : "/aux");
}

std::size_t plan_cardinality(const ExperimentPlan& plan) {
    std::size_t total = 0;
    for (const auto& task : plan.tasks) {
        for (const auto& model : plan.probing_models) {
            total += task.representations.size() * model.num_configs;
        }
    }
    return total;
}

void validate_fractions(const SplitFractions& f) {
    for (double x : {f.train, f.dev, f.test}) {
        if (!(x > 0.0 && x < 1.0)) {
            throw ValidationError("split fractions must lie in (0, 1), got " + format_double(x));
        }
    }
    const double sum = f.train + f.dev + f.test;
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError("split fractions must sum to 1, got " + format_double(sum));
    }
}

SplitIndices make_splits(std::size_t n_examples, const SplitFractions& fractions, std::uint64_t seed) {
    validate_fractions(fractions);
    if (n_examples < kMinExamples) {
        throw ValidationError("at least " + std::to_string(kMinExamples) + " examples are required, got " +
                              std::to_string(n_examples));
    }

    const std::array<double, 3> f{fractions.train, fractions.dev, fractions.test};
    std::array<std::size_t, 3> sizes{};
    std::array<double, 3> remainders{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double exact = f[i] * static_cast<double>(n_examples);
        // Absorb representation error such as 0.7 * 100 = 70.00000000000001.
        const double floored = std::floor(exact + 1e-9);
        sizes[i] = static_cast<std::size_t>(floored);
        remainders[i] = std::max(0.0, exact - floored);
        assigned += sizes[i];
    }
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
    for (std::size_t leftover = n_examples - assigned, i = 0; leftover > 0; --leftover, ++i) {
        ++sizes[order[i % 3]];
    }
    static constexpr std::array<const char*, 3> kNames{"train", "dev", "test"};
    for (std::size_t i = 0; i < 3; ++i) {
        if (sizes[i] == 0) {
            throw ValidationError(std::string(kNames[i]) + " split is empty for " + std::to_string(n_examples) +
                                  " examples");
        }
    }

    std::vector<std::size_t> perm(n_examples);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(perm));

    SplitIndices out;
    const auto begin = perm.begin();
    out.train.assign(begin, begin + static_cast<std::ptrdiff_t>(sizes[0]));
    out.dev.assign(begin + static_cast<std::ptrdiff_t>(sizes[0]),
                   begin + static_cast<std::ptrdiff_t>(sizes[0] + sizes[1]));
    out.test.assign(begin + static_cast<std::ptrdiff_t>(sizes[0] + sizes[1]), perm.end());
    return out;
}

}  // namespace probeflow
