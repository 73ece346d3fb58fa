#include "probeflow/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "probeflow/errors.hpp"
#include "probeflow/rng.hpp"

namespace probeflow {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// JSON helpers. Every error names the JSON path of the offending value.
// ---------------------------------------------------------------------------

namespace {

std::string join_path(const std::string& parent, std::string_view key) {
    return parent.empty() ? std::string(key) : parent + "." + std::string(key);
}

std::string index_path(const std::string& parent, std::size_t i) {
    return parent + "[" + std::to_string(i) + "]";
}

[[noreturn]] void fail_at(const std::string& path, const std::string& why) {
    throw ValidationError(path + ": " + why);
}

void expect_object(const Json& j, const std::string& path) {
    if (!j.is_object()) fail_at(path.empty() ? "<root>" : path, "expected a JSON object");
}

void expect_array(const Json& j, const std::string& path) {
    if (!j.is_array()) fail_at(path, "expected a JSON array");
}

void reject_unknown_keys(const Json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
            std::string listed;
            for (auto a : allowed) listed += (listed.empty() ? "" : ", ") + std::string(a);
            fail_at(join_path(path, it.key()), "unknown key; accepted keys here: " + listed);
        }
    }
}

const Json& require_key(const Json& obj, const std::string& path, std::string_view key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ValidationError("missing key " + join_path(path, key));
    return *it;
}

const Json* optional_key(const Json& obj, std::string_view key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

std::string as_string(const Json& j, const std::string& path) {
    if (!j.is_string()) fail_at(path, "expected a string");
    std::string s = j.get<std::string>();
    if (s.empty()) fail_at(path, "must not be empty");
    return s;
}

double as_number(const Json& j, const std::string& path) {
    if (!j.is_number()) fail_at(path, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) fail_at(path, "expected a finite number");
    return x;
}

std::size_t as_positive_count(const Json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 1) fail_at(path, "expected a positive integer");
    return static_cast<std::size_t>(j.get<std::int64_t>());
}

std::uint64_t as_seed(const Json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
    fail_at(path, "expected a non-negative integer");
}

Json parse_json_text(std::string_view text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ValidationError(what + ": malformed JSON: " + e.what());
    }
}

Json hyper_to_json(const HyperValue& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    if (const auto* d = std::get_if<double>(&v)) return *d;
    return std::get<std::string>(v);
}

HyperValue hyper_from_json(const Json& j, const std::string& path) {
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number_float()) return as_number(j, path);
    if (j.is_string()) return j.get<std::string>();
    fail_at(path, "categorical options must be numbers or strings");
}

const char* param_kind_name(ParamKind k) {
    switch (k) {
        case ParamKind::float_range: return "float_range";
        case ParamKind::int_range: return "int_range";
        case ParamKind::categorical: return "categorical";
    }
    return "";
}

ParamSpec parse_param(const Json& j, const std::string& path) {
    expect_object(j, path);
    reject_unknown_keys(j, path, {"name", "type", "options"});
    ParamSpec p;
    p.name = as_string(require_key(j, path, "name"), join_path(path, "name"));
    const std::string type = as_string(require_key(j, path, "type"), join_path(path, "type"));
    const std::string opt_path = join_path(path, "options");
    const Json& options = require_key(j, path, "options");
    expect_array(options, opt_path);

    if (type == "categorical") {
        p.kind = ParamKind::categorical;
        if (options.empty()) fail_at(opt_path, "categorical options must not be empty");
        for (std::size_t i = 0; i < options.size(); ++i) p.choices.push_back(hyper_from_json(options[i], index_path(opt_path, i)));
        return p;
    }
    if (type == "float_range") p.kind = ParamKind::float_range;
    else if (type == "int_range") p.kind = ParamKind::int_range;
    else fail_at(join_path(path, "type"), "unknown type \"" + type + "\"; expected float_range, int_range or categorical");

    if (options.size() != 2 && options.size() != 3) fail_at(opt_path, "expected [low, high] or [low, high, scale]");
    for (std::size_t i = 0; i < 2; ++i) {
        if (p.kind == ParamKind::int_range && !options[i].is_number_integer()) {
            fail_at(index_path(opt_path, i), "int_range bounds must be integers");
        }
    }
    p.low = as_number(options[0], index_path(opt_path, 0));
    p.high = as_number(options[1], index_path(opt_path, 1));
    if (options.size() == 3) {
        const std::string scale = as_string(options[2], index_path(opt_path, 2));
        if (scale == "log") p.scale = RangeScale::log;
        else if (scale != "linear") fail_at(index_path(opt_path, 2), "scale must be \"linear\" or \"log\"");
    }
    if (!(p.low < p.high)) fail_at(opt_path, "range requires low < high");
    if (p.scale == RangeScale::log && !(p.low > 0.0)) fail_at(opt_path, "log scale requires low > 0");
    return p;
}

ModelSearchSpace model_space_from_json(const Json& j, const std::string& path, const ProbeRegistry& probes) {
    expect_object(j, path);
    reject_unknown_keys(j, path, {"model_class", "params"});
    ModelSearchSpace space;
    const std::string class_path = join_path(path, "model_class");
    space.model_kind = as_string(require_key(j, path, "model_class"), class_path);
    const ProbeKind* kind = probes.find(space.model_kind);
    if (!kind) {
        try {
            probes.at(space.model_kind);
        } catch (const ValidationError& e) {
            fail_at(class_path, e.what());
        }
    }
    const std::string params_path = join_path(path, "params");
    const Json& params = require_key(j, path, "params");
    expect_array(params, params_path);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < params.size(); ++i) {
        ParamSpec p = parse_param(params[i], index_path(params_path, i));
        if (!seen.insert(p.name).second) fail_at(index_path(params_path, i), "duplicate parameter \"" + p.name + "\"");
        space.params.push_back(std::move(p));
    }
    try {
        if (kind->validate_space) kind->validate_space(space);
    } catch (const ValidationError& e) {
        fail_at(params_path, e.what());
    }
    return space;
}

}  // namespace

// ---------------------------------------------------------------------------
// Model configuration
// ---------------------------------------------------------------------------

ModelSearchSpace parse_model_config(std::string_view text, const ProbeRegistry& probes) {
    return model_space_from_json(parse_json_text(text, "model configuration"), "", probes);
}

Json to_json(const ModelSearchSpace& space) {
    Json params = Json::array();
    for (const auto& p : space.params) {
        Json options = Json::array();
        if (p.kind == ParamKind::categorical) {
            for (const auto& c : p.choices) options.push_back(hyper_to_json(c));
        } else if (p.kind == ParamKind::int_range) {
            options = {static_cast<std::int64_t>(p.low), static_cast<std::int64_t>(p.high),
                       p.scale == RangeScale::log ? "log" : "linear"};
        } else {
            options = {p.low, p.high, p.scale == RangeScale::log ? "log" : "linear"};
        }
        params.push_back({{"name", p.name}, {"type", param_kind_name(p.kind)}, {"options", options}});
    }
    return {{"model_class", space.model_kind}, {"params", params}};
}

// ---------------------------------------------------------------------------
// Probing configuration
// ---------------------------------------------------------------------------

ProbingConfig parse_probing_config_document(std::string_view text, const ProbeRegistry& probes,
                                            const MetricRegistry& metrics) {
    const Json root = parse_json_text(text, "probing configuration");
    expect_object(root, "");
    reject_unknown_keys(root, "", {"tasks", "probing_setup", "seed"});

    ProbingConfig config;
    if (const Json* seed = optional_key(root, "seed")) config.seed = as_seed(*seed, "seed");

    const Json& tasks = require_key(root, "", "tasks");
    expect_array(tasks, "tasks");
    if (tasks.empty()) fail_at("tasks", "at least one task is required");
    std::set<std::string> task_names;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        const std::string tp = index_path("tasks", t);
        const Json& tj = tasks[t];
        expect_object(tj, tp);
        reject_unknown_keys(tj, tp, {"task_name", "label_location", "representations"});
        TaskConfig task;
        task.task_name = as_string(require_key(tj, tp, "task_name"), join_path(tp, "task_name"));
        if (!task_names.insert(task.task_name).second) {
            fail_at(join_path(tp, "task_name"), "duplicate task name \"" + task.task_name + "\"");
        }
        task.label_location = as_string(require_key(tj, tp, "label_location"), join_path(tp, "label_location"));
        const std::string rsp = join_path(tp, "representations");
        const Json& reps = require_key(tj, tp, "representations");
        expect_array(reps, rsp);
        if (reps.empty()) fail_at(rsp, "at least one representation is required");
        std::set<std::string> rep_names;
        for (std::size_t r = 0; r < reps.size(); ++r) {
            const std::string rp = index_path(rsp, r);
            const Json& rj = reps[r];
            expect_object(rj, rp);
            reject_unknown_keys(rj, rp, {"representation_name", "file_location", "control_location"});
            RepresentationConfig rep;
            rep.representation_name =
                as_string(require_key(rj, rp, "representation_name"), join_path(rp, "representation_name"));
            if (!rep_names.insert(rep.representation_name).second) {
                fail_at(join_path(rp, "representation_name"),
                        "duplicate representation name \"" + rep.representation_name + "\"");
            }
            rep.file_location = as_string(require_key(rj, rp, "file_location"), join_path(rp, "file_location"));
            if (const Json* control = optional_key(rj, "control_location")) {
                rep.control_location = as_string(*control, join_path(rp, "control_location"));
            }
            task.representations.push_back(std::move(rep));
        }
        config.tasks.push_back(std::move(task));
    }

    const std::string sp = "probing_setup";
    const Json& setup = require_key(root, "", sp);
    expect_object(setup, sp);
    reject_unknown_keys(setup, sp,
                        {"train_size", "dev_size", "test_size", "intra_metric", "inter_metric", "probing_models",
                         "batch_size", "epochs", "number_of_models"});
    ProbingSetupConfig& ps = config.probing_setup;
    ps.train_size = as_number(require_key(setup, sp, "train_size"), join_path(sp, "train_size"));
    ps.dev_size = as_number(require_key(setup, sp, "dev_size"), join_path(sp, "dev_size"));
    ps.test_size = as_number(require_key(setup, sp, "test_size"), join_path(sp, "test_size"));
    ps.intra_metric = as_string(require_key(setup, sp, "intra_metric"), join_path(sp, "intra_metric"));
    ps.inter_metric = as_string(require_key(setup, sp, "inter_metric"), join_path(sp, "inter_metric"));
    if (const Json* v = optional_key(setup, "batch_size")) ps.batch_size = as_positive_count(*v, join_path(sp, "batch_size"));
    if (const Json* v = optional_key(setup, "epochs")) ps.epochs = as_positive_count(*v, join_path(sp, "epochs"));
    if (const Json* v = optional_key(setup, "number_of_models")) {
        ps.number_of_models = as_positive_count(*v, join_path(sp, "number_of_models"));
    }

    try {
        validate_fractions({ps.train_size, ps.dev_size, ps.test_size});
    } catch (const ValidationError& e) {
        fail_at(sp + ".{train_size,dev_size,test_size}", e.what());
    }
    try {
        metrics.at(ps.intra_metric, MetricArity::intra);
    } catch (const ValidationError& e) {
        fail_at(join_path(sp, "intra_metric"), e.what());
    }
    try {
        metrics.at(ps.inter_metric, MetricArity::inter);
    } catch (const ValidationError& e) {
        fail_at(join_path(sp, "inter_metric"), e.what());
    }

    const std::string mp = join_path(sp, "probing_models");
    const Json& models = require_key(setup, sp, "probing_models");
    expect_array(models, mp);
    if (models.empty()) fail_at(mp, "at least one probing model is required");
    std::set<std::string> model_names;
    for (std::size_t m = 0; m < models.size(); ++m) {
        const std::string ep = index_path(mp, m);
        const Json& mj = models[m];
        expect_object(mj, ep);
        reject_unknown_keys(mj, ep, {"probing_model_name", "batch_size", "epochs", "number_of_models", "model_config"});
        ProbingModelConfig entry;
        const std::string np = join_path(ep, "probing_model_name");
        entry.probing_model_name = as_string(require_key(mj, ep, "probing_model_name"), np);
        try {
            probes.at(entry.probing_model_name);
        } catch (const ValidationError& e) {
            fail_at(np, e.what());
        }
        if (!model_names.insert(entry.probing_model_name).second) {
            fail_at(np, "duplicate probing model \"" + entry.probing_model_name + "\"");
        }
        // Per-entry training values are required unless probing_setup provides a default.
        const auto count_field = [&](std::string_view key, const std::optional<std::size_t>& fallback) {
            std::optional<std::size_t> value;
            if (const Json* v = optional_key(mj, key)) value = as_positive_count(*v, join_path(ep, key));
            else if (!fallback) throw ValidationError("missing key " + join_path(ep, key));
            return value;
        };
        entry.batch_size = count_field("batch_size", ps.batch_size);
        entry.epochs = count_field("epochs", ps.epochs);
        entry.number_of_models = count_field("number_of_models", ps.number_of_models);
        if (const Json* mc = optional_key(mj, "model_config")) {
            const std::string cp = join_path(ep, "model_config");
            if (mc->is_string()) {
                entry.model_config = as_string(*mc, cp);
            } else {
                ModelSearchSpace space = model_space_from_json(*mc, cp, probes);
                if (space.model_kind != entry.probing_model_name) {
                    fail_at(join_path(cp, "model_class"), "\"" + space.model_kind + "\" does not match probing_model_name \"" +
                                                              entry.probing_model_name + "\"");
                }
                entry.model_config = std::move(space);
            }
        }
        ps.probing_models.push_back(std::move(entry));
    }
    return config;
}

Json to_json(const ProbingConfig& config) {
    Json tasks = Json::array();
    for (const auto& t : config.tasks) {
        Json reps = Json::array();
        for (const auto& r : t.representations) {
            Json rj = {{"representation_name", r.representation_name}, {"file_location", r.file_location}};
            if (r.control_location) rj["control_location"] = *r.control_location;
            reps.push_back(std::move(rj));
        }
        tasks.push_back({{"task_name", t.task_name}, {"label_location", t.label_location}, {"representations", reps}});
    }
    const ProbingSetupConfig& ps = config.probing_setup;
    Json models = Json::array();
    for (const auto& m : ps.probing_models) {
        Json mj = {{"probing_model_name", m.probing_model_name}};
        if (m.batch_size) mj["batch_size"] = *m.batch_size;
        if (m.epochs) mj["epochs"] = *m.epochs;
        if (m.number_of_models) mj["number_of_models"] = *m.number_of_models;
        if (const auto* path = std::get_if<std::string>(&m.model_config)) mj["model_config"] = *path;
        if (const auto* space = std::get_if<ModelSearchSpace>(&m.model_config)) mj["model_config"] = to_json(*space);
        models.push_back(std::move(mj));
    }
    Json setup = {{"train_size", ps.train_size},     {"dev_size", ps.dev_size},
                  {"test_size", ps.test_size},       {"intra_metric", ps.intra_metric},
                  {"inter_metric", ps.inter_metric}, {"probing_models", models}};
    if (ps.batch_size) setup["batch_size"] = *ps.batch_size;
    if (ps.epochs) setup["epochs"] = *ps.epochs;
    if (ps.number_of_models) setup["number_of_models"] = *ps.number_of_models;
    return {{"tasks", tasks}, {"probing_setup", setup}, {"seed", config.seed}};
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("failed reading " + path.string());
    return buffer.str();
}

namespace {

// Lines split on '\n'; a single trailing newline does not create an extra line.
std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

}  // namespace

RepresentationSet load_representations_tsv(const fs::path& path, std::string name) {
    const std::string text = read_text_file(path);
    const auto lines = split_lines(text);
    const std::string where = path.string();
    if (lines.empty()) throw ValidationError(where + ": empty representation file");

    std::size_t width = 0;
    std::vector<double> values;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto fields = split_tabs(lines[i]);
        if (i == 0) width = fields.size();
        if (fields.size() != width) {
            throw ValidationError(where + ": row " + std::to_string(i + 1) + ": expected " + std::to_string(width) +
                                  " columns, found " + std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const std::string_view f = fields[c];
            double x = 0.0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), x);
            const std::string cell = where + ": row " + std::to_string(i + 1) + ", column " + std::to_string(c + 1);
            if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
                throw ValidationError(cell + ": non-numeric value \"" + std::string(f) + "\"");
            }
            if (!std::isfinite(x)) throw ValidationError(cell + ": non-finite value \"" + std::string(f) + "\"");
            values.push_back(x);
        }
    }
    RepresentationSet set;
    set.name = name.empty() ? path.stem().string() : std::move(name);
    set.embeddings = Matrix(lines.size(), width, std::move(values));
    return set;
}

LoadedLabels load_labels_tsv(const fs::path& path) {
    const std::string text = read_text_file(path);
    const auto lines = split_lines(text);
    const std::string where = path.string();
    if (lines.empty()) throw ValidationError(where + ": empty label file");
    if (lines.size() < kMinExamples) {
        throw ValidationError(where + ": " + std::to_string(lines.size()) + " labels; at least " +
                              std::to_string(kMinExamples) + " examples are required");
    }
    LoadedLabels out;
    std::unordered_map<std::string_view, std::size_t> index;
    out.ids.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string_view label = lines[i];
        if (label.empty()) throw ValidationError(where + ": row " + std::to_string(i + 1) + ": empty label");
        if (label.find('\t') != std::string_view::npos) {
            throw ValidationError(where + ": row " + std::to_string(i + 1) + ": expected one label, found tab-separated fields");
        }
        const auto [it, inserted] = index.emplace(label, out.vocab.labels.size());
        if (inserted) out.vocab.labels.emplace_back(label);
        out.ids.push_back(it->second);
    }
    if (out.vocab.size() < 2) throw ValidationError(where + ": at least two distinct labels are required");
    return out;
}

void write_labels_tsv(const fs::path& path, std::span<const std::size_t> ids, const LabelVocab& vocab) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    for (std::size_t id : ids) out << vocab.labels.at(id) << '\n';
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

std::vector<std::size_t> generate_control_labels(std::size_t n_examples, std::size_t vocab_size, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::size_t> ids(n_examples);
    for (auto& id : ids) id = rng.uniform_index(vocab_size);
    return ids;
}

std::uint64_t control_seed(std::uint64_t global_seed, std::string_view task_name) {
    return seed_for(global_seed, "control:" + std::string(task_name));
}

std::uint64_t split_seed(std::uint64_t global_seed, std::string_view task_name) {
    return seed_for(global_seed, "split:" + std::string(task_name));
}

std::uint64_t config_seed(std::uint64_t global_seed, std::string_view model_kind) {
    return seed_for(global_seed, "configs:" + std::string(model_kind));
}

// ---------------------------------------------------------------------------
// Plan assembly
// ---------------------------------------------------------------------------

ExperimentPlan build_plan(const ProbingConfig& config, const fs::path& base_dir, const ProbeRegistry& probes,
                          const MetricRegistry& metrics) {
    const auto resolve = [&](const std::string& location) {
        const fs::path p(location);
        return p.is_absolute() ? p : base_dir / p;
    };

    ExperimentPlan plan;
    plan.config = config;
    plan.global_seed = config.seed;
    const ProbingSetupConfig& ps = config.probing_setup;
    plan.split_fractions = {ps.train_size, ps.dev_size, ps.test_size};
    plan.intra_metric = metrics.at(ps.intra_metric, MetricArity::intra).name;
    plan.inter_metric = metrics.at(ps.inter_metric, MetricArity::inter).name;

    for (std::size_t m = 0; m < ps.probing_models.size(); ++m) {
        const ProbingModelConfig& entry = ps.probing_models[m];
        const std::string ep = index_path("probing_setup.probing_models", m);
        const ProbeKind& kind = probes.at(entry.probing_model_name);
        ProbingModelSetup setup;
        if (const auto* path = std::get_if<std::string>(&entry.model_config)) {
            const fs::path file = resolve(*path);
            setup.space = model_space_from_json(parse_json_text(read_text_file(file), file.string()), file.string(), probes);
            if (setup.space.model_kind != kind.name) {
                throw ValidationError(file.string() + ": model_class \"" + setup.space.model_kind +
                                      "\" does not match " + ep + ".probing_model_name \"" + kind.name + "\"");
            }
        } else if (const auto* space = std::get_if<ModelSearchSpace>(&entry.model_config)) {
            setup.space = *space;
        } else {
            setup.space = kind.default_space;
        }
        const auto pick = [&](const std::optional<std::size_t>& own, const std::optional<std::size_t>& fallback,
                              std::string_view key) {
            if (own) return *own;
            if (fallback) return *fallback;
            throw ValidationError("missing key " + join_path(ep, key));
        };
        setup.batch_size = pick(entry.batch_size, ps.batch_size, "batch_size");
        setup.epochs = pick(entry.epochs, ps.epochs, "epochs");
        setup.num_configs = pick(entry.number_of_models, ps.number_of_models, "number_of_models");
        plan.probing_models.push_back(std::move(setup));
    }

    for (const TaskConfig& tc : config.tasks) {
        TaskEntry entry;
        const fs::path label_path = resolve(tc.label_location);
        LoadedLabels labels = load_labels_tsv(label_path);
        const std::size_t n = labels.ids.size();
        entry.task.name = tc.task_name;
        entry.task.label_ids = std::move(labels.ids);
        entry.task.vocab = std::move(labels.vocab);
        entry.task.control_label_ids =
            generate_control_labels(n, entry.task.vocab.size(), control_seed(plan.global_seed, tc.task_name));
        entry.task.control_vocab = entry.task.vocab;

        for (const RepresentationConfig& rc : tc.representations) {
            RepresentationEntry rep;
            const fs::path rep_path = resolve(rc.file_location);
            rep.set = load_representations_tsv(rep_path, rc.representation_name);
            if (rep.set.embeddings.rows() != n) {
                throw ValidationError("alignment error: " + label_path.string() + " has " + std::to_string(n) +
                                      " labels but " + rep_path.string() + " has " +
                                      std::to_string(rep.set.embeddings.rows()) + " rows");
            }
            if (rc.control_location) {
                const fs::path control_path = resolve(*rc.control_location);
                LoadedLabels control = load_labels_tsv(control_path);
                if (control.ids.size() != n) {
                    throw ValidationError("alignment error: " + label_path.string() + " has " + std::to_string(n) +
                                          " labels but " + control_path.string() + " has " +
                                          std::to_string(control.ids.size()));
                }
                rep.control_override = ControlLabels{std::move(control.ids), std::move(control.vocab)};
            }
            entry.representations.push_back(std::move(rep));
        }
        plan.tasks.push_back(std::move(entry));
    }
    return plan;
}

ExperimentPlan parse_probing_config(std::string_view text, const fs::path& base_dir, const ProbeRegistry& probes,
                                    const MetricRegistry& metrics) {
    return build_plan(parse_probing_config_document(text, probes, metrics), base_dir, probes, metrics);
}

ExperimentPlan load_probing_config(const fs::path& path, const ProbeRegistry& probes, const MetricRegistry& metrics) {
    return parse_probing_config(read_text_file(path), path.parent_path(), probes, metrics);
}

}  // namespace probeflow
