#include "probeflow/cli.hpp"

#include <fstream>
#include <mutex>
#include <ostream>

#include "probeflow/errors.hpp"
#include "probeflow/ingestion.hpp"
#include "probeflow/reporting.hpp"
#include "probeflow/training.hpp"

namespace probeflow {

namespace fs = std::filesystem;

namespace {

// Creates the directory and proves it accepts files before any training.
void ensure_writable_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
    const fs::path probe = dir / ".probeflow_write_check";
    {
        std::ofstream out(probe);
        if (!out) throw IoError("output directory " + dir.string() + " is not writable");
    }
    fs::remove(probe, ec);
}

template <class F>
int guarded(std::ostream& log, F&& body) {
    try {
        return body();
    } catch (const ValidationError& e) {
        log << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IoError& e) {
        log << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        log << "error: " << e.what() << '\n';
        return kExitIo;
    }
}

}  // namespace

int cmd_run(const RunCommand& command, std::ostream& log) {
    return guarded(log, [&] {
        ProbingConfig config = parse_probing_config_document(read_text_file(command.config_path));
        if (command.seed) config.seed = *command.seed;
        ensure_writable_dir(command.output_dir);
        const ExperimentPlan plan = build_plan(config, command.config_path.parent_path());

        const std::size_t total = plan_cardinality(plan);
        log << "training " << total << " probes with " << command.workers << " worker(s)\n";
        std::mutex log_mutex;
        FlowOptions options;
        options.workers = command.workers;
        options.on_run_complete = [&](const RunResult& r, std::size_t done, std::size_t all) {
            std::lock_guard lock(log_mutex);
            log << "[" << done << "/" << all << "] " << to_string(r.key);
            if (r.failed()) log << " FAILED: " << *r.failure;
            log << '\n';
        };
        std::vector<RunResult> results = run_flow(plan, options);

        MetricsOutcome outcome = calculate_metrics(default_metric_registry(), plan, std::move(results));
        ReportModel report = aggregate(outcome.results, make_report_context(plan), outcome.unpaired);
        for (auto& flag : guidance_flags(report, command.selectivity_threshold)) report.warnings.push_back(std::move(flag));

        emit_json(report, command.output_dir / "results.json");
        const auto svgs = render_svg(report, command.output_dir);
        for (const auto& w : report.warnings) log << "warning [" << w.code << "] " << w.message << '\n';
        log << "wrote " << (command.output_dir / "results.json").string() << " and " << svgs.size() << " plot(s)\n";
        return kExitOk;
    });
}

int cmd_report(const fs::path& results_json, const fs::path& output_dir, std::ostream& log) {
    return guarded(log, [&] {
        ReportModel report;
        try {
            report = report_from_json(read_text_file(results_json));
        } catch (const ValidationError& e) {
            throw ValidationError(results_json.string() + ": " + e.what());
        }
        if (report.panels.empty()) {
            log << "notice: " << results_json.string() << " holds no curves; no plots written\n";
            return kExitOk;
        }
        ensure_writable_dir(output_dir);
        const auto svgs = render_svg(report, output_dir);
        log << "wrote " << svgs.size() << " plot(s) to " << output_dir.string() << '\n';
        return kExitOk;
    });
}

int cmd_gen_control(const fs::path& labels_tsv, std::uint64_t seed, const fs::path& output_path, std::ostream& log) {
    return guarded(log, [&] {
        const LoadedLabels labels = load_labels_tsv(labels_tsv);
        const auto ids = generate_control_labels(labels.ids.size(), labels.vocab.size(), seed);
        write_labels_tsv(output_path, ids, labels.vocab);
        log << "wrote " << ids.size() << " control labels to " << output_path.string() << '\n';
        return kExitOk;
    });
}

}  // namespace probeflow
