#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "probeflow/errors.hpp"
#include "probeflow/ingestion.hpp"
#include "probeflow/training.hpp"

namespace probeflow {

namespace {

struct Job {
    std::size_t task = 0;
    std::size_t rep = 0;
    std::size_t model = 0;
    std::size_t config = 0;
    bool control = false;
};

}  // namespace

std::vector<RunResult> run_flow(const ExperimentPlan& plan, const FlowOptions& options, const ProbeRegistry& probes,
                                const MetricRegistry& metrics) {
    if (plan.tasks.empty()) throw ValidationError("run_flow: the plan has no tasks");
    if (plan.probing_models.empty()) throw ValidationError("run_flow: the plan has no probing models");

    std::vector<SplitIndices> splits;
    for (const auto& task : plan.tasks) {
        splits.push_back(make_splits(task.task.num_examples(), plan.split_fractions,
                                     split_seed(plan.global_seed, task.task.name)));
    }
    // Configurations depend only on the model kind, so every representation
    // of every task is probed with the same grid.
    std::vector<std::vector<ProbeConfig>> configs;
    std::vector<TrainingRegime> regimes;
    for (const auto& setup : plan.probing_models) {
        configs.push_back(sample_configs(setup.space, setup.num_configs, config_seed(plan.global_seed, setup.space.model_kind)));
        regimes.push_back({setup.batch_size, setup.epochs, plan.intra_metric});
    }

    std::vector<Job> jobs;
    for (std::size_t t = 0; t < plan.tasks.size(); ++t)
        for (std::size_t r = 0; r < plan.tasks[t].representations.size(); ++r)
            for (std::size_t m = 0; m < plan.probing_models.size(); ++m)
                for (std::size_t c = 0; c < configs[m].size(); ++c)
                    for (bool control : {false, true}) jobs.push_back({t, r, m, c, control});

    std::vector<RunResult> results(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> completed{0};
    std::mutex error_mutex;
    std::exception_ptr error;

    const auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            {
                std::lock_guard lock(error_mutex);
                if (error) return;
            }
            try {
                const Job& job = jobs[i];
                const TaskEntry& task = plan.tasks[job.task];
                const RepresentationEntry& rep = task.representations[job.rep];
                const ProbeConfig& config = configs[job.model][job.config];
                const RunKey key{task.task.name, rep.set.name, config.model_kind, job.config, job.control};
                RunOutcome outcome = train_probe(config, task, rep, splits[job.task],
                                                 job.control ? LabelSource::control : LabelSource::auxiliary,
                                                 regimes[job.model], derive_run_seed(plan.global_seed, key), probes,
                                                 metrics);
                outcome.result.key = key;
                results[i] = std::move(outcome.result);
                const std::size_t done = completed.fetch_add(1) + 1;
                if (options.on_run_complete) options.on_run_complete(results[i], done, jobs.size());
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(1, jobs.size()));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
    return results;
}

}  // namespace probeflow
