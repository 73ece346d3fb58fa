#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "probeflow/data_model.hpp"
#include "probeflow/json_format.hpp"
#include "probeflow/metrics.hpp"
#include "probeflow/probes.hpp"

namespace probeflow {

struct CurvePoint {
    double complexity = 0.0;
    double value = 0.0;
    std::size_t config_index = 0;

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

// One representation's metric-vs-complexity points, ascending by complexity
// (ties by config index).
struct Curve {
    std::string representation;
    std::vector<CurvePoint> points;

    friend bool operator==(const Curve&, const Curve&) = default;
};

// All curves for one (task, model kind, metric).
struct Panel {
    std::string task;
    std::string model_kind;
    std::string metric;  // "accuracy", "control_accuracy" or the inter metric
    AxisScale x_scale = AxisScale::linear;
    double y_min = 0.0;
    double y_max = 1.0;
    std::vector<Curve> curves;

    friend bool operator==(const Panel&, const Panel&) = default;
};

struct ReportWarning {
    std::string code;  // RUN_FAILED, UNPAIRED, CONTROL_VOCAB_DIFFERS, LOW_SELECTIVITY, SELECTIVITY_DROP, DIM_MISMATCH
    std::string message;
    std::string task;
    std::string model_kind;
    std::string representation;
    std::optional<std::size_t> config_index;
    std::optional<bool> is_control;

    friend bool operator==(const ReportWarning&, const ReportWarning&) = default;
};

struct RepresentationInfo {
    std::string task;
    std::string representation;
    std::size_t dim = 0;
    std::size_t num_classes = 0;
    std::size_t control_num_classes = 0;

    friend bool operator==(const RepresentationInfo&, const RepresentationInfo&) = default;
};

struct ReportModel {
    Json plan;  // echo of the probing configuration
    std::string inter_metric = "selectivity";
    std::vector<RepresentationInfo> representations;
    std::vector<RunResult> runs;
    std::vector<Panel> panels;
    std::vector<ReportWarning> warnings;

    friend bool operator==(const ReportModel&, const ReportModel&) = default;
};

// What aggregation needs to know beyond the run records.
struct ReportContext {
    Json plan = Json::object();
    std::string inter_metric = "selectivity";
    std::vector<RepresentationInfo> representations;  // plan order
    std::vector<std::string> model_kinds;              // plan order
    std::map<std::string, AxisScale> complexity_axes;  // by model kind; linear when absent
};

ReportContext make_report_context(const ExperimentPlan& plan, const ProbeRegistry& probes = default_probe_registry());

// Groups runs into accuracy, control-accuracy and inter-metric panels. Failed
// runs and aux runs listed in `unpaired` become warnings.
ReportModel aggregate(const std::vector<RunResult>& results, const ReportContext& context,
                      const std::vector<RunKey>& unpaired = {});

inline constexpr double kDefaultSelectivityThreshold = 0.1;

// LOW_SELECTIVITY per point below `threshold`; SELECTIVITY_DROP per curve whose
// value at the highest complexity is more than `threshold` below the value at
// the lowest; DIM_MISMATCH per task mixing representation sizes.
std::vector<ReportWarning> guidance_flags(const ReportModel& report,
                                          double threshold = kDefaultSelectivityThreshold);

std::string report_to_json_text(const ReportModel& report);
ReportModel report_from_json(std::string_view text);
void emit_json(const ReportModel& report, const std::filesystem::path& destination);

// `<task>__<model_kind>__<metric>.svg`, each part percent-encoded.
std::string svg_file_name(const Panel& panel);
std::string render_panel_svg(const Panel& panel);
// One SVG per panel; returns the written paths in panel order.
std::vector<std::filesystem::path> render_svg(const ReportModel& report, const std::filesystem::path& destination_dir);

}  // namespace probeflow
