#include "probeflow/reporting.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "probeflow/errors.hpp"
#include "probeflow/ingestion.hpp"

namespace probeflow {

namespace fs = std::filesystem;

ReportContext make_report_context(const ExperimentPlan& plan, const ProbeRegistry& probes) {
    ReportContext ctx;
    ctx.plan = to_json(plan.config);
    ctx.inter_metric = plan.inter_metric;
    for (const auto& task : plan.tasks) {
        for (const auto& rep : task.representations) {
            ctx.representations.push_back({task.task.name, rep.set.name, rep.set.dim(), task.task.vocab.size(),
                                           control_vocab_for(task, rep).size()});
        }
    }
    for (const auto& setup : plan.probing_models) {
        ctx.model_kinds.push_back(setup.space.model_kind);
        if (const ProbeKind* kind = probes.find(setup.space.model_kind)) {
            ctx.complexity_axes[kind->name] = kind->complexity_axis;
        }
    }
    return ctx;
}

namespace {

void append_unique(std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

std::string chance_text(std::size_t classes) {
    return "1/" + std::to_string(classes) + " = " + format_double(1.0 / static_cast<double>(classes), 4);
}

ReportWarning warning_for(std::string code, std::string message, const RunKey& key, bool with_run) {
    ReportWarning w;
    w.code = std::move(code);
    w.message = std::move(message);
    w.task = key.task_name;
    w.model_kind = key.model_kind;
    w.representation = key.representation_name;
    if (with_run) {
        w.config_index = key.config_index;
        w.is_control = key.is_control;
    }
    return w;
}

}  // namespace

ReportModel aggregate(const std::vector<RunResult>& results, const ReportContext& context,
                      const std::vector<RunKey>& unpaired) {
    ReportModel report;
    report.plan = context.plan;
    report.inter_metric = context.inter_metric;
    report.representations = context.representations;
    report.runs = results;

    std::vector<std::string> tasks;
    std::map<std::string, std::vector<std::string>> reps_by_task;
    for (const auto& info : context.representations) {
        append_unique(tasks, info.task);
        append_unique(reps_by_task[info.task], info.representation);
    }
    std::vector<std::string> kinds = context.model_kinds;
    for (const auto& r : results) {
        append_unique(tasks, r.key.task_name);
        append_unique(reps_by_task[r.key.task_name], r.key.representation_name);
        append_unique(kinds, r.key.model_kind);
    }

    for (const auto& info : context.representations) {
        if (info.num_classes != info.control_num_classes && info.control_num_classes > 0) {
            ReportWarning w;
            w.code = "CONTROL_VOCAB_DIFFERS";
            w.message = "auxiliary chance " + chance_text(info.num_classes) + ", control chance " +
                        chance_text(info.control_num_classes) + "; selectivity is the raw accuracy difference";
            w.task = info.task;
            w.representation = info.representation;
            report.warnings.push_back(std::move(w));
        }
    }

    using PanelKey = std::tuple<std::string, std::string, std::string>;  // task, kind, metric
    std::map<PanelKey, std::map<std::string, std::vector<CurvePoint>>> points;
    const std::set<RunKey> unpaired_set(unpaired.begin(), unpaired.end());
    for (const auto& r : results) {
        if (r.failed()) {
            report.warnings.push_back(warning_for("RUN_FAILED", "run " + to_string(r.key) + " failed: " + *r.failure, r.key, true));
            continue;
        }
        const std::string& task = r.key.task_name;
        const std::string& kind = r.key.model_kind;
        const std::string& rep = r.key.representation_name;
        const auto acc = r.intra_scores.find("accuracy");
        if (acc != r.intra_scores.end()) {
            const std::string metric = r.key.is_control ? "control_accuracy" : "accuracy";
            points[{task, kind, metric}][rep].push_back({r.complexity, acc->second, r.key.config_index});
        }
        if (r.key.is_control) continue;
        const auto inter = r.inter_scores.find(context.inter_metric);
        if (inter != r.inter_scores.end()) {
            points[{task, kind, context.inter_metric}][rep].push_back({r.complexity, inter->second, r.key.config_index});
        } else if (unpaired_set.contains(r.key)) {
            report.warnings.push_back(warning_for("UNPAIRED",
                                                  "run " + to_string(r.key) + " has no " + context.inter_metric +
                                                      " because its control run failed",
                                                  r.key, true));
        }
    }

    const std::vector<std::string> metrics{"accuracy", "control_accuracy", context.inter_metric};
    for (const auto& task : tasks) {
        for (const auto& kind : kinds) {
            for (const auto& metric : metrics) {
                const auto found = points.find({task, kind, metric});
                if (found == points.end()) continue;
                Panel panel;
                panel.task = task;
                panel.model_kind = kind;
                panel.metric = metric;
                const auto axis = context.complexity_axes.find(kind);
                panel.x_scale = axis == context.complexity_axes.end() ? AxisScale::linear : axis->second;
                if (metric == "accuracy" || metric == "control_accuracy") {
                    panel.y_min = -0.1;
                    panel.y_max = 1.05;
                } else if (metric == "selectivity") {
                    panel.y_min = -1.0;
                    panel.y_max = 1.0;
                } else {
                    double lo = 0.0, hi = 1.0;
                    for (const auto& [rep, pts] : found->second)
                        for (const auto& p : pts) lo = std::min(lo, p.value), hi = std::max(hi, p.value);
                    panel.y_min = lo;
                    panel.y_max = hi;
                }
                for (const auto& rep : reps_by_task[task]) {
                    const auto curve = found->second.find(rep);
                    if (curve == found->second.end()) continue;
                    Curve c{rep, curve->second};
                    std::sort(c.points.begin(), c.points.end(), [](const CurvePoint& a, const CurvePoint& b) {
                        return a.complexity != b.complexity ? a.complexity < b.complexity : a.config_index < b.config_index;
                    });
                    panel.curves.push_back(std::move(c));
                }
                report.panels.push_back(std::move(panel));
            }
        }
    }
    return report;
}

std::vector<ReportWarning> guidance_flags(const ReportModel& report, double threshold) {
    std::vector<ReportWarning> flags;
    for (const auto& panel : report.panels) {
        if (panel.metric != "selectivity") continue;
        for (const auto& curve : panel.curves) {
            for (const auto& p : curve.points) {
                if (p.value < threshold) {
                    ReportWarning w;
                    w.code = "LOW_SELECTIVITY";
                    w.message = "selectivity " + format_double(p.value, 4) + " below " + format_double(threshold, 4) +
                                " at complexity " + format_double(p.complexity, 6) +
                                "; the auxiliary accuracy here is less trustworthy";
                    w.task = panel.task;
                    w.model_kind = panel.model_kind;
                    w.representation = curve.representation;
                    w.config_index = p.config_index;
                    w.is_control = false;
                    flags.push_back(std::move(w));
                }
            }
            if (curve.points.size() >= 2) {
                const double at_min = curve.points.front().value;
                const double at_max = curve.points.back().value;
                if (at_min - at_max > threshold) {
                    ReportWarning w;
                    w.code = "SELECTIVITY_DROP";
                    w.message = "selectivity falls from " + format_double(at_min, 4) + " to " + format_double(at_max, 4) +
                                " across the complexity range; the probe may be expressive enough to fit the control task";
                    w.task = panel.task;
                    w.model_kind = panel.model_kind;
                    w.representation = curve.representation;
                    flags.push_back(std::move(w));
                }
            }
        }
    }

    std::vector<std::string> tasks;
    for (const auto& info : report.representations) append_unique(tasks, info.task);
    for (const auto& task : tasks) {
        std::set<std::size_t> dims;
        std::string listing;
        for (const auto& info : report.representations) {
            if (info.task != task) continue;
            dims.insert(info.dim);
            listing += (listing.empty() ? "" : ", ") + info.representation + " (d=" + std::to_string(info.dim) + ")";
        }
        if (dims.size() > 1) {
            ReportWarning w;
            w.code = "DIM_MISMATCH";
            w.message = "representations of different sizes are compared: " + listing;
            w.task = task;
            flags.push_back(std::move(w));
        }
    }
    return flags;
}

// ---------------------------------------------------------------------------
// results.json
// ---------------------------------------------------------------------------

namespace {

Json hyper_json(const HyperValue& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    if (const auto* d = std::get_if<double>(&v)) return *d;
    return std::get<std::string>(v);
}

Json key_json(const RunKey& k) {
    return {{"task", k.task_name},
            {"representation", k.representation_name},
            {"model_kind", k.model_kind},
            {"config_index", k.config_index},
            {"is_control", k.is_control}};
}

Json run_json(const RunResult& r) {
    Json hp = Json::object();
    for (const auto& [name, value] : r.hyperparameters) hp[name] = hyper_json(value);
    Json intra = Json::object();
    for (const auto& [name, value] : r.intra_scores) intra[name] = value;
    Json inter = Json::object();
    for (const auto& [name, value] : r.inter_scores) inter[name] = value;
    return {{"key", key_json(r.key)},
            {"complexity", r.complexity},
            {"hyperparameters", hp},
            {"intra_scores", intra},
            {"inter_scores", inter},
            {"dev_score", r.dev_score},
            {"best_epoch", r.best_epoch},
            {"train_loss_curve", r.train_loss_curve},
            {"train_accuracy_curve", r.train_accuracy_curve},
            {"num_classes", r.num_classes},
            {"failure", r.failure ? Json(*r.failure) : Json(nullptr)}};
}

Json panel_json(const Panel& p) {
    Json curves = Json::array();
    for (const auto& c : p.curves) {
        Json pts = Json::array();
        for (const auto& pt : c.points) {
            pts.push_back({{"complexity", pt.complexity}, {"value", pt.value}, {"config_index", pt.config_index}});
        }
        curves.push_back({{"representation", c.representation}, {"points", pts}});
    }
    return {{"task", p.task},
            {"model_kind", p.model_kind},
            {"metric", p.metric},
            {"x_scale", p.x_scale == AxisScale::log ? "log" : "linear"},
            {"y_range", {p.y_min, p.y_max}},
            {"curves", curves}};
}

Json warning_json(const ReportWarning& w) {
    return {{"code", w.code},
            {"message", w.message},
            {"task", w.task},
            {"model_kind", w.model_kind},
            {"representation", w.representation},
            {"config_index", w.config_index ? Json(*w.config_index) : Json(nullptr)},
            {"is_control", w.is_control ? Json(*w.is_control) : Json(nullptr)}};
}

// Accessors that report the JSON path on mismatch.
const Json& field(const Json& obj, const std::string& path, const char* key) {
    if (!obj.is_object()) throw ValidationError("results.json: " + path + " is not an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw ValidationError("results.json: missing key " + path + "." + key);
    return *it;
}

std::string str_field(const Json& obj, const std::string& path, const char* key) {
    const Json& v = field(obj, path, key);
    if (!v.is_string()) throw ValidationError("results.json: " + path + "." + key + " must be a string");
    return v.get<std::string>();
}

double num_field(const Json& obj, const std::string& path, const char* key) {
    const Json& v = field(obj, path, key);
    if (!v.is_number()) throw ValidationError("results.json: " + path + "." + key + " must be a number");
    return v.get<double>();
}

std::size_t count_field(const Json& obj, const std::string& path, const char* key) {
    const Json& v = field(obj, path, key);
    if (!v.is_number_unsigned()) throw ValidationError("results.json: " + path + "." + key + " must be a non-negative integer");
    return v.get<std::size_t>();
}

const Json& array_field(const Json& obj, const std::string& path, const char* key) {
    const Json& v = field(obj, path, key);
    if (!v.is_array()) throw ValidationError("results.json: " + path + "." + key + " must be an array");
    return v;
}

std::vector<double> double_list(const Json& obj, const std::string& path, const char* key) {
    std::vector<double> out;
    for (const auto& v : array_field(obj, path, key)) {
        if (!v.is_number()) throw ValidationError("results.json: " + path + "." + key + " must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::map<std::string, double> score_map(const Json& obj, const std::string& path, const char* key) {
    const Json& v = field(obj, path, key);
    if (!v.is_object()) throw ValidationError("results.json: " + path + "." + key + " must be an object");
    std::map<std::string, double> out;
    for (auto it = v.begin(); it != v.end(); ++it) {
        if (!it.value().is_number()) throw ValidationError("results.json: " + path + "." + key + " must hold numbers");
        out[it.key()] = it.value().get<double>();
    }
    return out;
}

RunResult run_from_json(const Json& j, const std::string& path) {
    RunResult r;
    const Json& key = field(j, path, "key");
    const std::string kp = path + ".key";
    r.key.task_name = str_field(key, kp, "task");
    r.key.representation_name = str_field(key, kp, "representation");
    r.key.model_kind = str_field(key, kp, "model_kind");
    r.key.config_index = count_field(key, kp, "config_index");
    const Json& control = field(key, kp, "is_control");
    if (!control.is_boolean()) throw ValidationError("results.json: " + kp + ".is_control must be a boolean");
    r.key.is_control = control.get<bool>();
    r.complexity = num_field(j, path, "complexity");
    const Json& hp = field(j, path, "hyperparameters");
    if (!hp.is_object()) throw ValidationError("results.json: " + path + ".hyperparameters must be an object");
    for (auto it = hp.begin(); it != hp.end(); ++it) {
        const Json& v = it.value();
        if (v.is_number_integer()) r.hyperparameters[it.key()] = v.get<std::int64_t>();
        else if (v.is_number_float()) r.hyperparameters[it.key()] = v.get<double>();
        else if (v.is_string()) r.hyperparameters[it.key()] = v.get<std::string>();
        else throw ValidationError("results.json: " + path + ".hyperparameters." + it.key() + " has an unsupported type");
    }
    r.intra_scores = score_map(j, path, "intra_scores");
    r.inter_scores = score_map(j, path, "inter_scores");
    r.dev_score = num_field(j, path, "dev_score");
    r.best_epoch = count_field(j, path, "best_epoch");
    r.train_loss_curve = double_list(j, path, "train_loss_curve");
    r.train_accuracy_curve = double_list(j, path, "train_accuracy_curve");
    r.num_classes = count_field(j, path, "num_classes");
    const Json& failure = field(j, path, "failure");
    if (failure.is_string()) r.failure = failure.get<std::string>();
    else if (!failure.is_null()) throw ValidationError("results.json: " + path + ".failure must be a string or null");
    return r;
}

}  // namespace

std::string report_to_json_text(const ReportModel& report) {
    Json reps = Json::array();
    for (const auto& info : report.representations) {
        reps.push_back({{"task", info.task},
                        {"representation", info.representation},
                        {"dim", info.dim},
                        {"num_classes", info.num_classes},
                        {"control_num_classes", info.control_num_classes}});
    }
    Json runs = Json::array();
    for (const auto& r : report.runs) runs.push_back(run_json(r));
    Json panels = Json::array();
    for (const auto& p : report.panels) panels.push_back(panel_json(p));
    Json warnings = Json::array();
    for (const auto& w : report.warnings) warnings.push_back(warning_json(w));
    const Json doc = {{"format", "probeflow-results/1"},
                      {"plan", report.plan},
                      {"inter_metric", report.inter_metric},
                      {"representations", reps},
                      {"runs", runs},
                      {"panels", panels},
                      {"warnings", warnings}};
    return dump_canonical(doc);
}

ReportModel report_from_json(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ValidationError(std::string("results.json: malformed JSON: ") + e.what());
    }
    if (str_field(doc, "<root>", "format") != "probeflow-results/1") {
        throw ValidationError("results.json: unsupported format tag");
    }
    ReportModel report;
    report.plan = field(doc, "<root>", "plan");
    report.inter_metric = str_field(doc, "<root>", "inter_metric");

    const Json& reps = array_field(doc, "<root>", "representations");
    for (std::size_t i = 0; i < reps.size(); ++i) {
        const std::string p = "representations[" + std::to_string(i) + "]";
        report.representations.push_back({str_field(reps[i], p, "task"), str_field(reps[i], p, "representation"),
                                          count_field(reps[i], p, "dim"), count_field(reps[i], p, "num_classes"),
                                          count_field(reps[i], p, "control_num_classes")});
    }
    const Json& runs = array_field(doc, "<root>", "runs");
    for (std::size_t i = 0; i < runs.size(); ++i) {
        report.runs.push_back(run_from_json(runs[i], "runs[" + std::to_string(i) + "]"));
    }
    const Json& panels = array_field(doc, "<root>", "panels");
    for (std::size_t i = 0; i < panels.size(); ++i) {
        const std::string p = "panels[" + std::to_string(i) + "]";
        const Json& pj = panels[i];
        Panel panel;
        panel.task = str_field(pj, p, "task");
        panel.model_kind = str_field(pj, p, "model_kind");
        panel.metric = str_field(pj, p, "metric");
        const std::string scale = str_field(pj, p, "x_scale");
        if (scale != "log" && scale != "linear") throw ValidationError("results.json: " + p + ".x_scale must be log or linear");
        panel.x_scale = scale == "log" ? AxisScale::log : AxisScale::linear;
        const auto y = double_list(pj, p, "y_range");
        if (y.size() != 2) throw ValidationError("results.json: " + p + ".y_range must have two entries");
        panel.y_min = y[0];
        panel.y_max = y[1];
        const Json& curves = array_field(pj, p, "curves");
        for (std::size_t c = 0; c < curves.size(); ++c) {
            const std::string cp = p + ".curves[" + std::to_string(c) + "]";
            Curve curve;
            curve.representation = str_field(curves[c], cp, "representation");
            const Json& pts = array_field(curves[c], cp, "points");
            for (std::size_t k = 0; k < pts.size(); ++k) {
                const std::string pp = cp + ".points[" + std::to_string(k) + "]";
                curve.points.push_back({num_field(pts[k], pp, "complexity"), num_field(pts[k], pp, "value"),
                                        count_field(pts[k], pp, "config_index")});
            }
            panel.curves.push_back(std::move(curve));
        }
        report.panels.push_back(std::move(panel));
    }
    const Json& warnings = array_field(doc, "<root>", "warnings");
    for (std::size_t i = 0; i < warnings.size(); ++i) {
        const std::string p = "warnings[" + std::to_string(i) + "]";
        const Json& wj = warnings[i];
        ReportWarning w;
        w.code = str_field(wj, p, "code");
        w.message = str_field(wj, p, "message");
        w.task = str_field(wj, p, "task");
        w.model_kind = str_field(wj, p, "model_kind");
        w.representation = str_field(wj, p, "representation");
        if (!field(wj, p, "config_index").is_null()) w.config_index = count_field(wj, p, "config_index");
        const Json& control = field(wj, p, "is_control");
        if (control.is_boolean()) w.is_control = control.get<bool>();
        report.warnings.push_back(std::move(w));
    }
    return report;
}

void emit_json(const ReportModel& report, const fs::path& destination) {
    const std::string text = report_to_json_text(report);
    std::ofstream out(destination, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + destination.string());
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing " + destination.string());
}

}  // namespace probeflow
