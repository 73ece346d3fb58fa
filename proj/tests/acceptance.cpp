// Acceptance suite: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "probeflow/cli.hpp"
#include "probeflow/errors.hpp"
#include "probeflow/ingestion.hpp"
#include "probeflow/metrics.hpp"
#include "probeflow/probes.hpp"
#include "probeflow/reporting.hpp"
#include "probeflow/training.hpp"
#include "support/eigen_oracle.hpp"
#include "support/finite_diff.hpp"
#include "support/fixtures.hpp"

using namespace probeflow;
using fixtures::TempDir;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string num(double v, int sig = 6) { return format_double(v, sig); }

double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? NAN : s / static_cast<double>(v.size());
}

// ---------------------------------------------------------------------------
// 1. Gradient correctness
// ---------------------------------------------------------------------------

Verdict gradient_correctness() {
    Rng rng(0xC0FFEE);
    std::size_t probes = 0, components = 0, mismatches = 0;
    std::string first_bad;
    const double lambdas[] = {0.0, 0.1, 1.0};
    for (int trial = 0; trial < 36; ++trial) {
        const std::size_t b = 1 + rng.uniform_index(8);
        const std::size_t d = 1 + rng.uniform_index(12);
        const std::size_t classes = 2 + rng.uniform_index(4);
        const Matrix x = fixtures::gaussian_matrix(b, d, rng.next_u64());
        std::vector<std::size_t> t(b);
        for (auto& v : t) v = rng.uniform_index(classes);
        std::unique_ptr<ProbeModel> probe;
        PassMode mode = PassMode::eval();
        if (trial % 2 == 0) {
            probe = std::make_unique<LinearProbe>(d, classes, lambdas[(trial / 2) % 3]);
        } else {
            const std::size_t layers = 1 + (trial / 2) % 3;
            std::vector<std::size_t> hidden(layers);
            for (auto& h : hidden) h = 2 + rng.uniform_index(10);
            const double dropout = (trial / 2) % 2 == 0 ? 0.0 : 0.25;
            probe = std::make_unique<MlpProbe>(d, hidden, classes, dropout);
            mode = PassMode::train(rng.next_u64());
        }
        oracle::randomize_parameters(*probe, rng);
        const auto bad = oracle::check_gradients(*probe, x, t, mode, 1e-5, 1e-6, 1e-4);
        for (const auto& p : probe->parameters()) components += p.size();
        mismatches += bad.size();
        if (!bad.empty() && first_bad.empty()) first_bad = " first: " + oracle::describe(bad);
        ++probes;
    }
    return {probes >= 20 && mismatches == 0,
            std::to_string(probes) + " probes, " + std::to_string(components) + " components, " +
                std::to_string(mismatches) + " outside max(1e-6, 1e-4*|g|) at step 1e-5" + first_bad};
}

// ---------------------------------------------------------------------------
// 2. Nuclear norm oracle
// ---------------------------------------------------------------------------

Verdict nuclear_norm_oracle() {
    Rng rng(0x5EED);
    double worst_value = 0.0, worst_subgradient = 0.0;
    std::size_t full_rank = 0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t r = 1 + rng.uniform_index(8);
        const std::size_t c = 1 + rng.uniform_index(8);
        Matrix m = fixtures::gaussian_matrix(r, c, rng.next_u64());
        worst_value = std::max(worst_value, std::abs(nuclear_norm(m) - oracle::nuclear_norm(m)));

        const auto sv = oracle::singular_values(m);
        if (sv.back() < 1e-2) continue;  // not comfortably full rank
        ++full_rank;
        const Matrix g = nuclear_norm_subgradient(m);
        for (std::size_t k = 0; k < m.size(); ++k) {
            const double numeric = oracle::central_difference([&] { return nuclear_norm(m); }, m.values()[k], 1e-5);
            worst_subgradient = std::max(worst_subgradient, std::abs(numeric - g.values()[k]));
        }
    }
    return {worst_value <= 1e-8 && worst_subgradient <= 1e-4 && full_rank > 50,
            "max |nuclear_norm - oracle| = " + num(worst_value, 3) + " (tol 1e-8); max subgradient FD error = " +
                num(worst_subgradient, 3) + " (tol 1e-4) over " + std::to_string(full_rank) + " full-rank matrices"};
}

// ---------------------------------------------------------------------------
// 3. Orchestration cardinality
// ---------------------------------------------------------------------------

Verdict orchestration_cardinality() {
    TempDir dir;
    const auto labels = fixtures::balanced_labels(80, 3, 31);
    const Json cfg = fixtures::make_config(
        dir.path(), "task", labels,
        {{"rep_a", fixtures::class_mean_embeddings(labels, 3, 6, 2.0, 1.0, 32)},
         {"rep_b", fixtures::gaussian_matrix(80, 6, 33)}},
        Json::array({{{"probing_model_name", "linear"}, {"number_of_models", 5}},
                     {{"probing_model_name", "mlp"}, {"number_of_models", 5}}}),
        3, 16, 3);
    const ExperimentPlan plan = parse_probing_config(cfg.dump(), dir.path());
    const auto outcome = calculate_metrics(default_metric_registry(), plan, run_flow(plan, {2, {}}));
    const auto& results = outcome.results;
    std::size_t mismatched = 0;
    std::map<RunKey, const RunResult*> by_key;
    for (const auto& r : results) by_key[r.key] = &r;
    for (const auto& r : results) {
        if (r.key.is_control) continue;
        RunKey partner = r.key;
        partner.is_control = true;
        const auto it = by_key.find(partner);
        if (it == by_key.end() || it->second->hyperparameters != r.hyperparameters) ++mismatched;
    }
    const bool ok = plan_cardinality(plan) == 20 && results.size() == 40 && by_key.size() == 40 && mismatched == 0;
    return {ok, "cardinality " + std::to_string(plan_cardinality(plan)) + ", " + std::to_string(results.size()) +
                    " run records (expected 40), " + std::to_string(mismatched) + " pairs with differing hyperparameters"};
}

// ---------------------------------------------------------------------------
// 4. Synthetic separability
// ---------------------------------------------------------------------------

Verdict synthetic_separability() {
    TempDir dir;
    const std::size_t n = 2000, classes = 5, dim = 32;
    const auto labels = fixtures::balanced_labels(n, classes, 41);
    const Json cfg = fixtures::make_config(
        dir.path(), "task", labels,
        {{"signal", fixtures::class_mean_embeddings(labels, classes, dim, 10.0, 1.0, 42)},
         {"noise", fixtures::gaussian_matrix(n, dim, 43)}},
        Json::array({{{"probing_model_name", "linear"}, {"number_of_models", 10}}}), 44, 32, 20);
    const ExperimentPlan plan = parse_probing_config(cfg.dump(), dir.path());
    const auto outcome = calculate_metrics(default_metric_registry(), plan, run_flow(plan, {4, {}}));

    std::map<std::string, std::vector<double>> acc, sel, control;
    std::size_t failed = 0, out_of_range = 0;
    for (const auto& r : outcome.results) {
        if (r.failed()) {
            ++failed;
            continue;
        }
        for (const auto& [name, value] : r.intra_scores) {
            if (!default_metric_registry().at(name, MetricArity::intra).in_range(value)) ++out_of_range;
        }
        if (r.key.is_control) {
            control[r.key.representation_name].push_back(r.intra_scores.at("accuracy"));
        } else {
            acc[r.key.representation_name].push_back(r.intra_scores.at("accuracy"));
            sel[r.key.representation_name].push_back(r.inter_scores.at("selectivity"));
        }
    }
    const double signal_acc = mean(acc["signal"]);
    const double noise_acc = mean(acc["noise"]);
    const double signal_sel = mean(sel["signal"]);
    const double control_acc = mean(control["signal"]);
    const bool ok = failed == 0 && out_of_range == 0 && acc["signal"].size() == 10 && signal_acc >= 0.9 &&
                    std::abs(noise_acc - 0.2) <= 0.1 && signal_sel >= 0.4;
    return {ok, "mean test accuracy signal " + num(signal_acc, 4) + " (>= 0.9), noise " + num(noise_acc, 4) +
                    " (0.2 +- 0.1); mean selectivity signal " + num(signal_sel, 4) + " (>= 0.4); signal control accuracy " +
                    num(control_acc, 4) + "; failed runs " + std::to_string(failed)};
}

// ---------------------------------------------------------------------------
// 5. Memorization signature
// ---------------------------------------------------------------------------

ProbeConfig mlp_at(bool top) {
    ProbeConfig config{"mlp", {}};
    for (const ParamSpec& p : default_mlp_space().params) {
        if (p.name == "dropout") {
            config.params[p.name] = 0.0;
        } else if (p.name == "learning_rate") {
            config.params[p.name] = kDefaultLearningRate;
        } else if (p.kind == ParamKind::categorical) {
            const auto as_int = [](const HyperValue& v) { return std::get<std::int64_t>(v); };
            const auto [lo, hi] = std::minmax_element(p.choices.begin(), p.choices.end(),
                                                      [&](const auto& a, const auto& b) { return as_int(a) < as_int(b); });
            config.params[p.name] = top ? *hi : *lo;
        } else {
            config.params[p.name] = static_cast<std::int64_t>(top ? p.high : p.low);
        }
    }
    return config;
}

Verdict memorization_signature() {
    const std::size_t n = 200, classes = 10, dim = 16;
    const Matrix x = fixtures::gaussian_matrix(n, dim, 51);
    const auto control = generate_control_labels(n, classes, 52);
    const SplitIndices splits = make_splits(n, {0.6, 0.2, 0.2}, 53);
    const TrainingRegime regime{20, 30, "accuracy"};

    const ProbeConfig top = mlp_at(true), bottom = mlp_at(false);
    const RunOutcome big = train_probe(top, x, control, classes, splits, regime, 54);
    const RunOutcome small = train_probe(bottom, x, control, classes, splits, regime, 54);
    if (big.result.failed() || small.result.failed()) return {false, "a probe failed to train"};
    const double big_final = big.result.train_accuracy_curve.back();
    const double small_max =
        *std::max_element(small.result.train_accuracy_curve.begin(), small.result.train_accuracy_curve.end());
    return {big_final >= 0.9 && small_max <= 0.5,
            "control-task train accuracy: top-of-range MLP (" + hyper_to_string(top.params.at("hidden_size")) + " x " +
                hyper_to_string(top.params.at("num_layers")) + ", " + num(big.result.complexity) + " params) final " +
                num(big_final, 4) + " (>= 0.9); bottom-of-range MLP (" +
                hyper_to_string(bottom.params.at("hidden_size")) + " x " + hyper_to_string(bottom.params.at("num_layers")) +
                ", " + num(small.result.complexity) + " params) max " + num(small_max, 4) + " (<= 0.5)"};
}

// ---------------------------------------------------------------------------
// 6. Determinism
// ---------------------------------------------------------------------------

std::map<std::string, std::string> output_files(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = fixtures::read_file(e.path());
    return files;
}

Verdict determinism() {
    TempDir dir;
    const auto labels = fixtures::balanced_labels(150, 4, 61);
    Json cfg = fixtures::make_config(
        dir.path(), "task", labels,
        {{"informative", fixtures::class_mean_embeddings(labels, 4, 12, 3.0, 1.0, 62)},
         {"random", fixtures::gaussian_matrix(150, 12, 63)}},
        Json::array({{{"probing_model_name", "linear"}, {"number_of_models", 4}},
                     {{"probing_model_name", "mlp"},
                      {"number_of_models", 4},
                      {"model_config",
                       {{"model_class", "mlp"},
                        {"params",
                         {{{"name", "hidden_size"}, {"type", "int_range"}, {"options", {16, 128, "log"}}},
                          {{"name", "num_layers"}, {"type", "categorical"}, {"options", {1, 2}}},
                          {{"name", "dropout"}, {"type", "float_range"}, {"options", {0.0, 0.5, "linear"}}}}}}}}}),
        65, 16, 5);
    fixtures::write_file(dir / "cfg.json", cfg.dump(2));

    std::vector<std::map<std::string, std::string>> outputs;
    for (std::size_t workers : {1, 4, 1, 4}) {
        RunCommand cmd;
        cmd.config_path = dir / "cfg.json";
        cmd.output_dir = dir / ("out" + std::to_string(outputs.size()));
        cmd.workers = workers;
        std::ostringstream log;
        if (cmd_run(cmd, log) != kExitOk) return {false, "run failed: " + log.str()};
        outputs.push_back(output_files(cmd.output_dir));
    }
    std::size_t differing = 0;
    for (std::size_t i = 1; i < outputs.size(); ++i) differing += outputs[i] != outputs[0];
    std::size_t svgs = 0;
    for (const auto& [name, body] : outputs[0]) svgs += name.ends_with(".svg");
    const bool ok = differing == 0 && outputs[0].contains("results.json") && svgs == 6;
    return {ok, "4 runs (workers 1, 4, 1, 4): results.json + " + std::to_string(svgs) + " SVGs each, " +
                    std::to_string(differing) + " runs differing byte-wise from the first"};
}

// ---------------------------------------------------------------------------
// 7. Config round-trip
// ---------------------------------------------------------------------------

// Paths of every required key in `doc`, given which key names are optional.
void required_paths(const Json& doc, const Json::json_pointer& at, const std::set<std::string>& optional,
                    std::vector<Json::json_pointer>& out) {
    if (doc.is_object()) {
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            const auto child = at / it.key();
            if (!optional.contains(it.key())) out.push_back(child);
            // Files referenced by path are checked separately.
            if (it.key() != "options") required_paths(it.value(), child, optional, out);
        }
    } else if (doc.is_array()) {
        for (std::size_t i = 0; i < doc.size(); ++i) required_paths(doc[i], at / i, optional, out);
    }
}

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

Verdict config_round_trip() {
    TempDir dir;
    const auto labels = fixtures::balanced_labels(30, 3, 71);
    fixtures::write_label_ids_tsv(dir / "labels.tsv", labels);
    fixtures::write_matrix_tsv(dir / "layer0.tsv", fixtures::gaussian_matrix(30, 4, 72));
    fixtures::write_matrix_tsv(dir / "layer1.tsv", fixtures::gaussian_matrix(30, 5, 73));
    fixtures::write_label_ids_tsv(dir / "control.tsv", generate_control_labels(30, 3, 74));

    const Json model_config = {
        {"model_class", "mlp"},
        {"params",
         {{{"name", "hidden_size"}, {"type", "int_range"}, {"options", {16, 256, "log"}}},
          {{"name", "num_layers"}, {"type", "categorical"}, {"options", {1, 2, 3}}},
          {{"name", "dropout"}, {"type", "float_range"}, {"options", {0.0, 0.4, "linear"}}},
          {{"name", "learning_rate"}, {"type", "float_range"}, {"options", {0.0001, 0.01, "log"}}}}}};
    fixtures::write_file(dir / "mlp_space.json", model_config.dump(2));

    const Json config = {
        {"tasks",
         {{{"task_name", "pos"},
           {"label_location", "labels.tsv"},
           {"representations",
            {{{"representation_name", "layer0"}, {"file_location", "layer0.tsv"}, {"control_location", "control.tsv"}},
             {{"representation_name", "layer1"}, {"file_location", "layer1.tsv"}}}}}}},
        {"probing_setup",
         {{"train_size", 0.6},
          {"dev_size", 0.2},
          {"test_size", 0.2},
          {"intra_metric", "accuracy"},
          {"inter_metric", "selectivity"},
          {"probing_models",
           {{{"probing_model_name", "linear"}, {"batch_size", 8}, {"epochs", 2}, {"number_of_models", 3}},
            {{"probing_model_name", "mlp"},
             {"batch_size", 16},
             {"epochs", 3},
             {"number_of_models", 2},
             {"model_config", "mlp_space.json"}}}}}},
        {"seed", 12345}};
    fixtures::write_file(dir / "config.json", config.dump(2));

    // Lossless: parse, validate against files, re-serialise, compare.
    const ExperimentPlan plan = load_probing_config(dir / "config.json");
    const bool config_lossless = to_json(plan.config) == config &&
                                 parse_probing_config_document(dump_canonical(to_json(plan.config))) == plan.config;
    const ModelSearchSpace space = parse_model_config(model_config.dump());
    const bool model_lossless = to_json(space) == model_config && plan.probing_models[1].space == space &&
                                parse_model_config(dump_canonical(to_json(space))) == space;

    // Every single required-key deletion names the key.
    const std::set<std::string> optional_config{"control_location", "seed", "model_config"};
    std::vector<Json::json_pointer> config_keys, model_keys;
    required_paths(config, Json::json_pointer(), optional_config, config_keys);
    required_paths(model_config, Json::json_pointer(), {}, model_keys);
    std::size_t unnamed = 0;
    std::string first_unnamed;
    const auto check = [&](const Json& doc, const Json::json_pointer& key, auto&& parse) {
        Json broken = doc;
        broken[key.parent_pointer()].erase(key.back());
        const std::string msg = error_of([&] { parse(broken.dump()); });
        if (msg.find("missing key") == std::string::npos || msg.find(key.back()) == std::string::npos) {
            ++unnamed;
            if (first_unnamed.empty()) first_unnamed = " first: " + key.to_string() + " -> \"" + msg + "\"";
        }
    };
    for (const auto& key : config_keys) check(config, key, [](const std::string& t) { parse_probing_config_document(t); });
    for (const auto& key : model_keys) check(model_config, key, [](const std::string& t) { parse_model_config(t); });

    return {config_lossless && model_lossless && unnamed == 0 && config_keys.size() >= 17,
            std::string("config round-trip ") + (config_lossless ? "lossless" : "LOSSY") + ", model config round-trip " +
                (model_lossless ? "lossless" : "LOSSY") + "; " + std::to_string(config_keys.size()) + " + " +
                std::to_string(model_keys.size()) + " single-key deletions, " + std::to_string(unnamed) +
                " without an error naming the key" + first_unnamed};
}

// ---------------------------------------------------------------------------
// 8. Metric identities
// ---------------------------------------------------------------------------

Verdict metric_identities() {
    std::size_t passed = 0, total = 0;
    std::string failures;
    const auto expect = [&](bool ok, const std::string& what) {
        ++total;
        if (ok) ++passed;
        else failures += " " + what + ";";
    };
    const auto throws = [](const std::function<void()>& f) {
        try {
            f();
        } catch (const ValidationError&) {
            return true;
        }
        return false;
    };
    using Ids = std::vector<std::size_t>;

    expect(accuracy(Ids{0, 1, 2, 1}, Ids{0, 1, 2, 1}) == 1.0, "accuracy all correct");
    expect(accuracy(Ids{0, 1, 0, 0}, Ids{0, 1, 2, 1}) == 0.5, "accuracy 2 of 4");
    expect(throws([] { accuracy(Ids{}, Ids{}); }), "accuracy empty input");

    expect(std::abs(cross_entropy(Matrix(3, 4, 0.25), Ids{0, 2, 3}) - 1.386294361119891) <= 1e-9, "cross entropy uniform");
    expect(cross_entropy(Matrix(2, 2, std::vector<double>{1, 0, 0, 1}), Ids{0, 1}) == 0.0, "cross entropy certain");
    expect(std::abs(cross_entropy(Matrix(1, 2, std::vector<double>{1, 0}), Ids{1}) - 27.631021115928547) <= 1e-9,
           "cross entropy clamp");

    const auto run = [](bool control, double acc) {
        RunResult r;
        r.key = {"task", "rep", "linear", 0, control};
        r.intra_scores["accuracy"] = acc;
        return r;
    };
    expect(std::abs(selectivity(run(false, 0.90), run(true, 0.55)) - 0.35) <= 1e-12, "selectivity 0.35");
    expect(selectivity(run(false, 0.6), run(true, 0.6)) == 0.0, "selectivity equal");
    expect(std::abs(selectivity(run(false, 0.3), run(true, 0.8)) + 0.5) <= 1e-12, "selectivity -0.5");
    expect(throws([&] {
               RunResult other = run(true, 0.5);
               other.key.config_index = 1;
               selectivity(run(false, 0.9), other);
           }),
           "selectivity pairing error");

    return {passed == total, std::to_string(passed) + "/" + std::to_string(total) +
                                 " examples exact (cross-entropy to 1e-9, selectivity to 1e-12)" + failures};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_seconds;
        Verdict (*run)();
    };
    const Criterion criteria[] = {
        {1, "gradient correctness", 10, gradient_correctness},
        {2, "nuclear norm oracle", 5, nuclear_norm_oracle},
        {3, "orchestration cardinality", 120, orchestration_cardinality},
        {4, "synthetic separability", 180, synthetic_separability},
        {5, "memorization signature", 120, memorization_signature},
        {6, "determinism", 600, determinism},
        {7, "config round-trip", 60, config_round_trip},
        {8, "metric identities", 10, metric_identities},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds <= c.budget_seconds;
        const bool pass = v.pass && in_time;
        failures += !pass;
        std::printf("%s criterion %d (%s): %s; %.2f s (budget %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    v.detail.c_str(), seconds, c.budget_seconds);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
