#pragma once

// Temporary directories, synthetic datasets and config files for tests.

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "probeflow/json_format.hpp"
#include "probeflow/linalg.hpp"
#include "probeflow/rng.hpp"

namespace fixtures {

namespace fs = std::filesystem;

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("probeflow_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_matrix_tsv(const fs::path& path, const probeflow::Matrix& m) {
    std::ofstream out(path);
    out << std::setprecision(17);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? "\t" : "") << m(r, c);
        out << '\n';
    }
}

inline void write_label_ids_tsv(const fs::path& path, const std::vector<std::size_t>& ids,
                                const std::string& prefix = "L") {
    std::ofstream out(path);
    for (std::size_t id : ids) out << prefix << id << '\n';
}

// Labels uniform over `classes`, with every class present.
inline std::vector<std::size_t> balanced_labels(std::size_t n, std::size_t classes, std::uint64_t seed) {
    std::vector<std::size_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i % classes;
    probeflow::Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(ids));
    return ids;
}

// x = μ_label + σ·noise with class means drawn N(0, mean_scale²) per dimension.
inline probeflow::Matrix class_mean_embeddings(const std::vector<std::size_t>& labels, std::size_t classes,
                                               std::size_t dim, double mean_scale, double noise, std::uint64_t seed) {
    probeflow::Rng rng(seed);
    probeflow::Matrix means(classes, dim);
    for (auto& v : means.values()) v = mean_scale * rng.normal();
    probeflow::Matrix x(labels.size(), dim);
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = 0; j < dim; ++j) x(i, j) = means(labels[i], j) + noise * rng.normal();
    return x;
}

inline probeflow::Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0) {
    probeflow::Rng rng(seed);
    probeflow::Matrix m(rows, cols);
    for (auto& v : m.values()) v = scale * rng.normal();
    return m;
}

struct RepSpec {
    std::string name;
    probeflow::Matrix embeddings;
};

// Writes labels and representations under `dir` and returns a config object
// referencing them by relative path.
inline probeflow::Json make_config(const fs::path& dir, const std::string& task, const std::vector<std::size_t>& labels,
                                   const std::vector<RepSpec>& reps, const probeflow::Json& probing_models,
                                   std::uint64_t seed, std::size_t batch_size = 32, std::size_t epochs = 10) {
    write_label_ids_tsv(dir / (task + "_labels.tsv"), labels);
    probeflow::Json rep_list = probeflow::Json::array();
    for (const auto& r : reps) {
        const std::string file = task + "_" + r.name + ".tsv";
        write_matrix_tsv(dir / file, r.embeddings);
        rep_list.push_back({{"representation_name", r.name}, {"file_location", file}});
    }
    return {{"tasks", {{{"task_name", task}, {"label_location", task + "_labels.tsv"}, {"representations", rep_list}}}},
            {"probing_setup",
             {{"train_size", 0.6},
              {"dev_size", 0.2},
              {"test_size", 0.2},
              {"intra_metric", "accuracy"},
              {"inter_metric", "selectivity"},
              {"batch_size", batch_size},
              {"epochs", epochs},
              {"probing_models", probing_models}}},
            {"seed", seed}};
}

}  // namespace fixtures
