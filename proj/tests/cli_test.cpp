#include "doctest.h"

#include "proxtrace/ingest/parse.hpp"
#include "proxtrace/ingest/sample.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

// Drives the installed-style binary end to end. The build passes the binary
// and source-tree locations in as compile definitions.
#ifndef PROXTRACE_CLI_PATH
#error "PROXTRACE_CLI_PATH must be defined by the build"
#endif
#ifndef PROXTRACE_SOURCE_DIR
#error "PROXTRACE_SOURCE_DIR must be defined by the build"
#endif

namespace fs = std::filesystem;
using namespace proxtrace;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(PROXTRACE_CLI_PATH) + " " + args + " 2>&1";
    RunResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) result.output.append(buf, got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "proxtrace_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

// Deterministic synthetic corpus: distance-dependent rss with per-position
// bias and mild noise, separable enough to train on.
std::vector<ingest::RssSample> synth_samples(const std::vector<ingest::PositionPair>& positions,
                                             int per_stratum) {
    std::mt19937_64 rng(271828);
    std::normal_distribution<double> noise(0.0, 2.0);
    std::vector<ingest::RssSample> samples;
    for (const auto pos : positions) {
        for (const double d : {1.0, 4.0}) {
            for (int i = 0; i < per_stratum; ++i) {
                ingest::RssSample s;
                s.distance_m = d;
                s.position_pair = pos;
                s.device_kind = ingest::device_of(pos);
                s.session_id = "s1";
                s.t_offset_s = double(i);
                s.rss_dbm = -58.0 - 20.0 * std::log10(d) -
                            3.0 * static_cast<double>(pos) / 2.0 + noise(rng);
                samples.push_back(std::move(s));
            }
        }
    }
    return samples;
}

fs::path write_phone_csv(const fs::path& dir, int per_stratum = 40) {
    using ingest::PositionPair;
    const auto samples = synth_samples({PositionPair::HH, PositionPair::PP}, per_stratum);
    const fs::path path = dir / "phone.csv";
    spit(path, ingest::canonical_dump(samples));
    return path;
}

std::string scenario_path(const char* name) {
    return (fs::path(PROXTRACE_SOURCE_DIR) / "scenarios" / name).string();
}

} // namespace

TEST_CASE("cli: --version prints the tool name and version") {
    const auto r = run_cli("--version");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("proxtrace 0.1.0") != std::string::npos);
}

TEST_CASE("cli: ingest normalizes, summarizes and reruns byte-identically") {
    const auto dir = scratch_dir("ingest");
    const auto data = write_phone_csv(dir);
    const std::string out = (dir / "out").string();

    const auto r = run_cli("ingest " + data.string() + " --out " + out);
    CHECK(r.exit_code == 0);
    const auto canonical = slurp(fs::path(out) / "canonical.csv");
    const auto summary = slurp(fs::path(out) / "ingest.summary.txt");
    CHECK(summary.find("total = 160") != std::string::npos);
    CHECK(fs::exists(fs::path(out) / "ingest.manifest.json"));

    // The canonical dump reparses to the same sample count.
    std::istringstream in(canonical);
    const auto parsed = ingest::parse_dataset(in, ingest::canonical_schema());
    CHECK(parsed.samples.size() == 160);

    const auto again = run_cli("ingest " + data.string() + " --out " + out);
    CHECK(again.exit_code == 0);
    CHECK(slurp(fs::path(out) / "canonical.csv") == canonical);
    CHECK(slurp(fs::path(out) / "ingest.summary.txt") == summary);
}

TEST_CASE("cli: train then eval produce model and reports; reruns identical") {
    const auto dir = scratch_dir("train_eval");
    const auto data = write_phone_csv(dir);
    const std::string out = (dir / "out").string();

    const auto trained = run_cli("train " + data.string() + " --seed 3 --out " + out);
    CHECK(trained.exit_code == 0);
    const auto model = slurp(fs::path(out) / "model.tree.json");
    const auto report = slurp(fs::path(out) / "train.report.json");
    CHECK(report.find("\"evaluation\"") != std::string::npos);

    const auto again = run_cli("train " + data.string() + " --seed 3 --out " + out);
    CHECK(again.exit_code == 0);
    CHECK(slurp(fs::path(out) / "model.tree.json") == model);
    CHECK(slurp(fs::path(out) / "train.report.json") == report);

    const std::string eval_out = (dir / "eval_out").string();
    const auto evaluated = run_cli("eval " + data.string() + " --model " +
                                   (fs::path(out) / "model.tree.json").string() + " --seed 3 --out " +
                                   eval_out);
    CHECK(evaluated.exit_code == 0);
    const auto eval_report = slurp(fs::path(eval_out) / "eval.report.json");
    CHECK(eval_report.find("\"baseline\"") != std::string::npos);
    CHECK(eval_report.find("\"tree\"") != std::string::npos);
}

TEST_CASE("cli: train restricted to one position") {
    const auto dir = scratch_dir("train_pos");
    const auto data = write_phone_csv(dir);
    const std::string out = (dir / "out").string();
    const auto r = run_cli("train " + data.string() + " --position HH --out " + out);
    CHECK(r.exit_code == 0);
    CHECK(slurp(fs::path(out) / "train.report.json").find("\"HH\"") != std::string::npos);

    // A position absent from the data cannot be trained on.
    const auto none = run_cli("train " + data.string() + " --position BB --out " + out);
    CHECK(none.exit_code == 4);
}

TEST_CASE("cli: table2 runs all eight rows on synthetic stand-in data") {
    using ingest::PositionPair;
    const auto dir = scratch_dir("table2");
    const auto phone = synth_samples({PositionPair::HH, PositionPair::HP, PositionPair::HB,
                                      PositionPair::PB, PositionPair::PP, PositionPair::BB},
                                     12);
    const auto watch = synth_samples(
        {PositionPair::LR, PositionPair::RL, PositionPair::LL, PositionPair::RR}, 12);
    spit(dir / "phone.csv", ingest::canonical_dump(phone));
    spit(dir / "watch.csv", ingest::canonical_dump(watch));
    const std::string out = (dir / "out").string();

    const auto r = run_cli("table2 --phone " + (dir / "phone.csv").string() + " --watch " +
                           (dir / "watch.csv").string() + " --out " + out);
    CHECK(r.exit_code == 0);
    const auto csv = slurp(fs::path(out) / "table2.csv");
    std::size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 9);   // header + 8 combinations
    CHECK(csv.find("hand-to-hand") != std::string::npos);
    CHECK(csv.find("crosswise") != std::string::npos);
    CHECK(slurp(fs::path(out) / "table2.txt").find("passed") != std::string::npos);
}

TEST_CASE("cli: simulate runs a scenario and reruns byte-identically") {
    const auto dir = scratch_dir("simulate");
    const std::string out = (dir / "out").string();
    const auto r = run_cli("simulate " + scenario_path("two_agents.scenario") + " --out " + out);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("sensitivity = 1.000000") != std::string::npos);
    const auto report = slurp(fs::path(out) / "sim.report.txt");
    const auto pairs = slurp(fs::path(out) / "sim.pairs.csv");
    CHECK(report.find("specificity = 1.000000") != std::string::npos);
    CHECK(pairs.find("alice,bob,0,1,1,1798") != std::string::npos);

    const auto again = run_cli("simulate " + scenario_path("two_agents.scenario") + " --out " + out);
    CHECK(again.exit_code == 0);
    CHECK(slurp(fs::path(out) / "sim.report.txt") == report);
    CHECK(slurp(fs::path(out) / "sim.pairs.csv") == pairs);
}

TEST_CASE("cli: simulate --mode both confirms path equivalence") {
    const auto dir = scratch_dir("simulate_both");
    const std::string out = (dir / "out").string();
    const auto r = run_cli("simulate " + scenario_path("benchmark.scenario") + " --mode both --out " +
                           out);
    CHECK(r.exit_code == 0);
    const auto report = slurp(fs::path(out) / "sim.report.txt");
    CHECK(report.find("equivalence = identical") != std::string::npos);
    CHECK(fs::exists(fs::path(out) / "sim.centralized.pairs.csv"));
    CHECK(fs::exists(fs::path(out) / "sim.decentralized.pairs.csv"));
}

TEST_CASE("cli: protocol-check passes its self-checks") {
    const auto dir = scratch_dir("protocol_check");
    const std::string out = (dir / "out").string();
    const auto r = run_cli("protocol-check --out " + out);
    CHECK(r.exit_code == 0);
    const auto report = slurp(fs::path(out) / "protocol.report.txt");
    CHECK(report.find("all checks passed") != std::string::npos);
    CHECK(report.find("FAIL") == std::string::npos);
}

TEST_CASE("cli: exit code 2 when the schema names a missing column") {
    const auto dir = scratch_dir("exit2");
    const auto data = write_phone_csv(dir);
    spit(dir / "bad.schema",
         "col.rss = signal\ncol.distance = distance_m\ncol.position = position_pair\n");
    const auto r = run_cli("ingest " + data.string() + " --schema " + (dir / "bad.schema").string() +
                           " --out " + (dir / "out").string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("signal") != std::string::npos);
}

TEST_CASE("cli: exit code 3 when too many rows are malformed") {
    const auto dir = scratch_dir("exit3");
    spit(dir / "dirty.csv",
         "rss_dbm,distance_m,position_pair,device_kind,session_id,t_offset_s\n"
         "abc,1.0,HH,smartphone,s1,\n"
         "-70,1.0,HH,smartphone,s1,\n"
         "-71,1.0,HH,smartphone,s1,\n");
    const auto r = run_cli("ingest " + (dir / "dirty.csv").string() + " --out " +
                           (dir / "out").string());
    CHECK(r.exit_code == 3);
}

TEST_CASE("cli: exit code 4 when a stratum cannot be split") {
    const auto dir = scratch_dir("exit4");
    spit(dir / "single.csv",
         "rss_dbm,distance_m,position_pair,device_kind,session_id,t_offset_s\n"
         "-70,1.0,HH,smartphone,s1,\n");
    const auto r = run_cli("train " + (dir / "single.csv").string() + " --out " +
                           (dir / "out").string());
    CHECK(r.exit_code == 4);
}

TEST_CASE("cli: exit code 5 for usage and config errors") {
    const auto dir = scratch_dir("exit5");
    const auto data = write_phone_csv(dir);

    CHECK(run_cli("ingest").exit_code == 5);             // missing required argument
    CHECK(run_cli("frobnicate").exit_code == 5);         // unknown subcommand
    CHECK(run_cli("ingest x --wat").exit_code == 5);     // unknown flag

    spit(dir / "bad.conf", "max_depth = 0\n");
    const auto r = run_cli("train " + data.string() + " --config " + (dir / "bad.conf").string() +
                           " --out " + (dir / "out").string());
    CHECK(r.exit_code == 5);

    const auto mode = run_cli("simulate " + scenario_path("two_agents.scenario") +
                              " --mode sideways --out " + (dir / "out").string());
    CHECK(mode.exit_code == 5);
}
