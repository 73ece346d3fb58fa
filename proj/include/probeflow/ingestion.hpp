#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "probeflow/data_model.hpp"
#include "probeflow/json_format.hpp"
#include "probeflow/metrics.hpp"
#include "probeflow/probes.hpp"

namespace probeflow {

// Schema-level parse of a probing configuration: keys, types, registered
// names. Errors name the offending JSON path. No files are touched.
ProbingConfig parse_probing_config_document(std::string_view text,
                                            const ProbeRegistry& probes = default_probe_registry(),
                                            const MetricRegistry& metrics = default_metric_registry());

// Loads every referenced file (paths relative to `base_dir`) and checks
// label/representation alignment.
ExperimentPlan build_plan(const ProbingConfig& config, const std::filesystem::path& base_dir,
                          const ProbeRegistry& probes = default_probe_registry(),
                          const MetricRegistry& metrics = default_metric_registry());

ExperimentPlan parse_probing_config(std::string_view text, const std::filesystem::path& base_dir,
                                    const ProbeRegistry& probes = default_probe_registry(),
                                    const MetricRegistry& metrics = default_metric_registry());

// Reads `path` and resolves relative file locations against its directory.
ExperimentPlan load_probing_config(const std::filesystem::path& path,
                                   const ProbeRegistry& probes = default_probe_registry(),
                                   const MetricRegistry& metrics = default_metric_registry());

Json to_json(const ProbingConfig& config);

ModelSearchSpace parse_model_config(std::string_view text, const ProbeRegistry& probes = default_probe_registry());
Json to_json(const ModelSearchSpace& space);

RepresentationSet load_representations_tsv(const std::filesystem::path& path, std::string name = {});

struct LoadedLabels {
    std::vector<std::size_t> ids;
    LabelVocab vocab;
};

LoadedLabels load_labels_tsv(const std::filesystem::path& path);
void write_labels_tsv(const std::filesystem::path& path, std::span<const std::size_t> ids, const LabelVocab& vocab);

// n ids drawn i.i.d. uniform over {0, ..., vocab_size-1}.
std::vector<std::size_t> generate_control_labels(std::size_t n_examples, std::size_t vocab_size, std::uint64_t seed);

// Seeds the plan builder and flow use for per-task randomness.
std::uint64_t control_seed(std::uint64_t global_seed, std::string_view task_name);
std::uint64_t split_seed(std::uint64_t global_seed, std::string_view task_name);
std::uint64_t config_seed(std::uint64_t global_seed, std::string_view model_kind);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace probeflow
