#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "probeflow/linalg.hpp"

namespace probeflow {

// Distinct labels in order of first appearance; a label's id is its position.
struct LabelVocab {
    std::vector<std::string> labels;

    std::size_t size() const noexcept { return labels.size(); }
    friend bool operator==(const LabelVocab&, const LabelVocab&) = default;
};

struct AuxiliaryTask {
    std::string name;
    std::vector<std::size_t> label_ids;
    LabelVocab vocab;
    // Generated control labels, shared by every representation of the task
    // unless a representation brings its own control file.
    std::vector<std::size_t> control_label_ids;
    LabelVocab control_vocab;

    std::size_t num_examples() const noexcept { return label_ids.size(); }
    friend bool operator==(const AuxiliaryTask&, const AuxiliaryTask&) = default;
};

struct RepresentationSet {
    std::string name;
    Matrix embeddings;  // N × d

    std::size_t dim() const noexcept { return embeddings.cols(); }
    friend bool operator==(const RepresentationSet&, const RepresentationSet&) = default;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> dev;
    std::vector<std::size_t> test;

    friend bool operator==(const SplitIndices&, const SplitIndices&) = default;
};

struct SplitFractions {
    double train = 0.0;
    double dev = 0.0;
    double test = 0.0;

    friend bool operator==(const SplitFractions&, const SplitFractions&) = default;
};

// ---------------------------------------------------------------------------
// Hyperparameter search spaces
// ---------------------------------------------------------------------------

using HyperValue = std::variant<std::int64_t, double, std::string>;
using Hyperparameters = std::map<std::string, HyperValue>;

enum class ParamKind { float_range, int_range, categorical };
enum class RangeScale { linear, log };

struct ParamSpec {
    std::string name;
    ParamKind kind = ParamKind::float_range;
    double low = 0.0;
    double high = 0.0;
    RangeScale scale = RangeScale::linear;
    std::vector<HyperValue> choices;  // categorical only

    friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

struct ModelSearchSpace {
    std::string model_kind;
    std::vector<ParamSpec> params;

    friend bool operator==(const ModelSearchSpace&, const ModelSearchSpace&) = default;
};

struct ProbeConfig {
    std::string model_kind;
    Hyperparameters params;

    friend bool operator==(const ProbeConfig&, const ProbeConfig&) = default;
};

// Numeric view of a hyperparameter, or `fallback` when absent.
double hyper_as_double(const Hyperparameters& params, const std::string& name, double fallback);
std::int64_t hyper_as_int(const Hyperparameters& params, const std::string& name, std::int64_t fallback);
std::string hyper_to_string(const HyperValue& value);

// ---------------------------------------------------------------------------
// Probing configuration document (mirrors the JSON schema)
// ---------------------------------------------------------------------------

struct RepresentationConfig {
    std::string representation_name;
    std::string file_location;
    std::optional<std::string> control_location;

    friend bool operator==(const RepresentationConfig&, const RepresentationConfig&) = default;
};

struct TaskConfig {
    std::string task_name;
    std::string label_location;
    std::vector<RepresentationConfig> representations;

    friend bool operator==(const TaskConfig&, const TaskConfig&) = default;
};

struct ProbingModelConfig {
    std::string probing_model_name;
    std::optional<std::size_t> batch_size;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> number_of_models;
    // Either a path to a model configuration file or the configuration inline.
    std::variant<std::monostate, std::string, ModelSearchSpace> model_config;

    friend bool operator==(const ProbingModelConfig&, const ProbingModelConfig&) = default;
};

struct ProbingSetupConfig {
    double train_size = 0.0;
    double dev_size = 0.0;
    double test_size = 0.0;
    std::string intra_metric;
    std::string inter_metric;
    std::vector<ProbingModelConfig> probing_models;
    // Plan-level defaults for entries that omit them.
    std::optional<std::size_t> batch_size;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> number_of_models;

    friend bool operator==(const ProbingSetupConfig&, const ProbingSetupConfig&) = default;
};

struct ProbingConfig {
    std::vector<TaskConfig> tasks;
    ProbingSetupConfig probing_setup;
    std::uint64_t seed = 0;

    friend bool operator==(const ProbingConfig&, const ProbingConfig&) = default;
};

// ---------------------------------------------------------------------------
// Experiment plan: the configuration with every file loaded and validated
// ---------------------------------------------------------------------------

struct ControlLabels {
    std::vector<std::size_t> label_ids;
    LabelVocab vocab;

    friend bool operator==(const ControlLabels&, const ControlLabels&) = default;
};

struct RepresentationEntry {
    RepresentationSet set;
    std::optional<ControlLabels> control_override;

    friend bool operator==(const RepresentationEntry&, const RepresentationEntry&) = default;
};

struct TaskEntry {
    AuxiliaryTask task;
    std::vector<RepresentationEntry> representations;

    friend bool operator==(const TaskEntry&, const TaskEntry&) = default;
};

struct ProbingModelSetup {
    ModelSearchSpace space;
    std::size_t batch_size = 1;
    std::size_t epochs = 1;
    std::size_t num_configs = 1;  // k

    friend bool operator==(const ProbingModelSetup&, const ProbingModelSetup&) = default;
};

struct ExperimentPlan {
    ProbingConfig config;  // the document the plan was built from
    std::vector<TaskEntry> tasks;
    std::vector<ProbingModelSetup> probing_models;
    SplitFractions split_fractions;
    std::string intra_metric;
    std::string inter_metric;
    std::uint64_t global_seed = 0;

    friend bool operator==(const ExperimentPlan&, const ExperimentPlan&) = default;
};

// Control labels a (task, representation) pair trains on.
const std::vector<std::size_t>& control_labels_for(const TaskEntry& task, const RepresentationEntry& rep);
const LabelVocab& control_vocab_for(const TaskEntry& task, const RepresentationEntry& rep);

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

struct RunKey {
    std::string task_name;
    std::string representation_name;
    std::string model_kind;
    std::size_t config_index = 0;
    bool is_control = false;

    friend bool operator==(const RunKey&, const RunKey&) = default;
    friend auto operator<=>(const RunKey&, const RunKey&) = default;
};

std::string to_string(const RunKey& key);

struct RunResult {
    RunKey key;
    double complexity = 0.0;
    Hyperparameters hyperparameters;
    std::map<std::string, double> intra_scores;  // on the test split
    std::map<std::string, double> inter_scores;  // attached to auxiliary runs by calculate_metrics
    double dev_score = 0.0;
    std::size_t best_epoch = 0;  // 1-based epoch whose parameters were evaluated
    std::vector<double> train_loss_curve;
    std::vector<double> train_accuracy_curve;
    std::size_t num_classes = 0;
    std::optional<std::string> failure;

    bool failed() const noexcept { return failure.has_value(); }
    friend bool operator==(const RunResult&, const RunResult&) = default;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Σ over tasks of (#representations × #model kinds × k), honoring per-kind k.
std::size_t plan_cardinality(const ExperimentPlan& plan);

// Minimum number of examples accepted anywhere in the pipeline.
inline constexpr std::size_t kMinExamples = 10;

void validate_fractions(const SplitFractions& fractions);

// Seeded shuffle of 0..n-1 partitioned by fraction. Sizes are ⌊f·n⌋ plus
// leftovers by largest fractional remainder (ties: train, dev, test).
SplitIndices make_splits(std::size_t n_examples, const SplitFractions& fractions, std::uint64_t seed);

}  // namespace probeflow
