#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace probeflow {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

struct RunCommand {
    std::filesystem::path config_path;
    std::filesystem::path output_dir = "probe_out";
    std::optional<std::uint64_t> seed;  // overrides the config's seed
    std::size_t workers = 1;
    double selectivity_threshold = 0.1;
};

// Each command reports progress and errors on `log` and returns an exit code.
int cmd_run(const RunCommand& command, std::ostream& log);
int cmd_report(const std::filesystem::path& results_json, const std::filesystem::path& output_dir, std::ostream& log);
int cmd_gen_control(const std::filesystem::path& labels_tsv, std::uint64_t seed, const std::filesystem::path& output_path,
                    std::ostream& log);

}  // namespace probeflow
