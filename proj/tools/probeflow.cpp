#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "probeflow/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Train probes on frozen representations and compare them by accuracy and selectivity."};
    app.require_subcommand(1);

    probeflow::RunCommand run;
    run.workers = std::max(1U, std::thread::hardware_concurrency());
    std::uint64_t seed = 0;
    auto* run_cmd = app.add_subcommand("run", "run every probe in a configuration and write results.json and plots");
    run_cmd->add_option("--config", run.config_path, "probing configuration JSON")->required();
    run_cmd->add_option("--output", run.output_dir, "output directory")->capture_default_str();
    auto* seed_opt = run_cmd->add_option("--seed", seed, "override the configuration seed");
    run_cmd->add_option("--workers", run.workers, "parallel training workers")->capture_default_str()->check(CLI::PositiveNumber);
    run_cmd->add_option("--selectivity-threshold", run.selectivity_threshold, "threshold for selectivity warnings")
        ->capture_default_str();

    std::filesystem::path results_path;
    std::filesystem::path report_dir = "probe_out";
    auto* report_cmd = app.add_subcommand("report", "re-render plots from a results.json");
    report_cmd->add_option("results", results_path, "results.json written by run")->required();
    report_cmd->add_option("--output", report_dir, "output directory")->capture_default_str();

    std::filesystem::path labels_path;
    std::filesystem::path control_path;
    std::uint64_t control_seed = 0;
    auto* control_cmd = app.add_subcommand("gen-control", "write uniformly random control labels over a label vocabulary");
    control_cmd->add_option("labels", labels_path, "label TSV, one label per line")->required();
    control_cmd->add_option("--seed", control_seed, "random seed")->capture_default_str();
    control_cmd->add_option("--output", control_path, "control label TSV to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Help goes to stderr too; stdout stays empty.
        return app.exit(e, std::cerr, std::cerr) == 0 ? 0 : probeflow::kExitValidation;
    }

    if (*run_cmd) {
        if (*seed_opt) run.seed = seed;
        return probeflow::cmd_run(run, std::cerr);
    }
    if (*report_cmd) return probeflow::cmd_report(results_path, report_dir, std::cerr);
    return probeflow::cmd_gen_control(labels_path, control_seed, control_path, std::cerr);
}
