#include <sstream>

#include "doctest.h"
#include "probeflow/cli.hpp"
#include "probeflow/ingestion.hpp"
#include "support/fixtures.hpp"

using namespace probeflow;
using fixtures::TempDir;

namespace fs = std::filesystem;

namespace {

fs::path write_small_config(const TempDir& dir) {
    const auto labels = fixtures::balanced_labels(50, 3, 2);
    const Json cfg = fixtures::make_config(dir.path(), "pos", labels,
                                           {{"good", fixtures::class_mean_embeddings(labels, 3, 4, 3.0, 1.0, 5)},
                                            {"noise", fixtures::gaussian_matrix(50, 4, 6)}},
                                           Json::array({{{"probing_model_name", "linear"}, {"number_of_models", 2}}}), 8,
                                           16, 3);
    fixtures::write_file(dir / "cfg.json", cfg.dump(2));
    return dir / "cfg.json";
}

std::vector<fs::path> svgs_in(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".svg") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("run writes results and plots; report re-renders them identically") {
    TempDir dir;
    RunCommand cmd;
    cmd.config_path = write_small_config(dir);
    cmd.output_dir = dir / "out";
    std::ostringstream log;
    REQUIRE(cmd_run(cmd, log) == kExitOk);
    CHECK(fs::exists(dir / "out" / "results.json"));
    const auto original = svgs_in(dir / "out");
    CHECK(original.size() == 3);

    std::ostringstream log2;
    REQUIRE(cmd_report(dir / "out" / "results.json", dir / "again", log2) == kExitOk);
    const auto again = svgs_in(dir / "again");
    REQUIRE(again.size() == original.size());
    for (std::size_t i = 0; i < again.size(); ++i) {
        CHECK(again[i].filename() == original[i].filename());
        CHECK(fixtures::read_file(again[i]) == fixtures::read_file(original[i]));
    }
}

TEST_CASE("the seed flag overrides the configuration seed") {
    TempDir dir;
    RunCommand cmd;
    cmd.config_path = write_small_config(dir);
    std::ostringstream log;
    cmd.output_dir = dir / "a";
    REQUIRE(cmd_run(cmd, log) == kExitOk);
    cmd.output_dir = dir / "b";
    cmd.seed = 8;  // same as the file
    REQUIRE(cmd_run(cmd, log) == kExitOk);
    cmd.output_dir = dir / "c";
    cmd.seed = 9;
    REQUIRE(cmd_run(cmd, log) == kExitOk);
    const std::string a = fixtures::read_file(dir / "a" / "results.json");
    CHECK(a == fixtures::read_file(dir / "b" / "results.json"));
    CHECK(a != fixtures::read_file(dir / "c" / "results.json"));
}

TEST_CASE("run reports validation and I/O failures through exit codes") {
    TempDir dir;
    const fs::path cfg = write_small_config(dir);
    Json doc = Json::parse(fixtures::read_file(cfg));
    doc.erase("probing_setup");
    fixtures::write_file(dir / "broken.json", doc.dump());

    RunCommand cmd;
    cmd.config_path = dir / "broken.json";
    cmd.output_dir = dir / "out";
    std::ostringstream log;
    CHECK(cmd_run(cmd, log) == kExitValidation);
    CHECK(log.str().find("probing_setup") != std::string::npos);

    fixtures::write_file(dir / "blocker", "not a directory");
    cmd.config_path = cfg;
    cmd.output_dir = dir / "blocker";
    std::ostringstream io_log;
    CHECK(cmd_run(cmd, io_log) == kExitIo);
    CHECK(io_log.str().find("blocker") != std::string::npos);

    cmd.config_path = dir / "absent.json";
    cmd.output_dir = dir / "out";
    std::ostringstream missing;
    CHECK(cmd_run(cmd, missing) == kExitIo);
    CHECK(missing.str().find("absent.json") != std::string::npos);
}

TEST_CASE("report handles truncated and empty result files") {
    TempDir dir;
    RunCommand cmd;
    cmd.config_path = write_small_config(dir);
    cmd.output_dir = dir / "out";
    std::ostringstream log;
    REQUIRE(cmd_run(cmd, log) == kExitOk);
    const std::string text = fixtures::read_file(dir / "out" / "results.json");
    fixtures::write_file(dir / "truncated.json", text.substr(0, text.size() / 3));
    std::ostringstream trunc_log;
    CHECK(cmd_report(dir / "truncated.json", dir / "t", trunc_log) == kExitValidation);
    CHECK(trunc_log.str().find("truncated.json") != std::string::npos);

    Json empty = Json::parse(text);
    empty["runs"] = Json::array();
    empty["panels"] = Json::array();
    empty["warnings"] = Json::array();
    fixtures::write_file(dir / "empty.json", empty.dump());
    std::ostringstream empty_log;
    CHECK(cmd_report(dir / "empty.json", dir / "e", empty_log) == kExitOk);
    CHECK(empty_log.str().find("notice") != std::string::npos);
    CHECK((!fs::exists(dir / "e") || svgs_in(dir / "e").empty()));
}

TEST_CASE("gen-control preserves length and is deterministic") {
    TempDir dir;
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < 100; ++i) ids.push_back(i % 4);
    fixtures::write_label_ids_tsv(dir / "labels.tsv", ids, "TAG");
    std::ostringstream log;
    REQUIRE(cmd_gen_control(dir / "labels.tsv", 5, dir / "c1.tsv", log) == kExitOk);
    REQUIRE(cmd_gen_control(dir / "labels.tsv", 5, dir / "c2.tsv", log) == kExitOk);
    const std::string c1 = fixtures::read_file(dir / "c1.tsv");
    CHECK(std::count(c1.begin(), c1.end(), '\n') == 100);
    CHECK(c1 == fixtures::read_file(dir / "c2.tsv"));
    const LoadedLabels control = load_labels_tsv(dir / "c1.tsv");
    for (const auto& label : control.vocab.labels) CHECK(label.rfind("TAG", 0) == 0);

    fixtures::write_file(dir / "empty.tsv", "");
    std::ostringstream err;
    CHECK(cmd_gen_control(dir / "empty.tsv", 5, dir / "c3.tsv", err) == kExitValidation);
    CHECK(err.str().find("empty.tsv") != std::string::npos);
}
