#include "cli.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using billiard::cli::run;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("billiard_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_in(const fs::path& dir, std::vector<std::string> args) {
    args.insert(args.begin(), {"--out", dir.string()});
    std::ostringstream out, err;
    const int code = run(args, out, err);
    if (code != 0) std::cerr << err.str();
    return code;
}

std::vector<std::vector<double>> read_rows(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

const std::string kBumpy = R"(curve.deformation={"cos": [0, 0, 0, 0, 0, 0, 0.01]})";

} // namespace

TEST(Cli, ActionQuadraticPasses) {
    const fs::path d = fresh_dir("aq");
    EXPECT_EQ(run_in(d, {"verify", "action-quadratic"}), 0);
    EXPECT_NE(slurp(d / "verify_action-quadratic.json").find("\"pass\": true"), std::string::npos);
    EXPECT_NE(slurp(d / "verify_action-quadratic.csv").find("slope,"), std::string::npos);
}

TEST(Cli, WitnessExitCodes) {
    const fs::path d = fresh_dir("witness");
    EXPECT_EQ(run_in(d, {"--set", "q=[3,4,5,6,7,8,9,10]", "verify", "witness"}), 0);
    EXPECT_EQ(run_in(d, {"--set", "q=[3]", "--set", kBumpy, "verify", "witness"}), 1);
    EXPECT_NE(slurp(d / "verify_witness.json").find("\"pass\": false"), std::string::npos);
}

TEST(Cli, UsageErrors) {
    const fs::path d = fresh_dir("usage");
    EXPECT_EQ(run_in(d, {"verify", "nonsense"}), 3);
    EXPECT_EQ(run_in(d, {"--set", "grid_size=0", "verify", "witness"}), 3);
    EXPECT_EQ(run_in(d, {"--config", (d / "missing.json").string(), "orbit"}), 3);
    std::ofstream(d / "bad.json") << "{ not json";
    EXPECT_EQ(run_in(d, {"--config", (d / "bad.json").string(), "orbit"}), 3);
    EXPECT_EQ(run_in(d, {}), 3);
}

TEST(Cli, PhasePortrait) {
    const fs::path d = fresh_dir("portrait");
    ASSERT_EQ(run_in(d, {"--set", "curve.ellipse.a=2", "phase-portrait"}), 0);
    const auto rows = read_rows(d / "phase_portrait.csv");
    ASSERT_EQ(rows.size(), 4000u);
    // trajectory,step,t,t_next,lift,twist_density,rotation_number
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_GT(rows[i][5], 0.0);
        if (rows[i][1] > 0) EXPECT_NEAR(rows[i][6], rows[i - 1][6], 1e-9);
    }
}

TEST(Cli, OrbitOutputs) {
    const fs::path d = fresh_dir("orbit");
    ASSERT_EQ(run_in(d, {"--set", kBumpy, "orbit"}), 0);
    const std::string csv = slurp(d / "orbit.csv");
    EXPECT_EQ(csv.rfind("q,j,t_j,residual_j\n", 0), 0u);
    EXPECT_EQ(csv.find("q,j", 1), std::string::npos);
    EXPECT_EQ(read_rows(d / "orbit.csv").size(), 3u + 4u + 5u + 7u);
    EXPECT_NE(slurp(d / "orbit_summary.json").find("\"local_maximum\": true"), std::string::npos);
}

TEST(Cli, FitVerdicts) {
    const fs::path d = fresh_dir("fit");
    std::ofstream(d / "ellipse.json") << R"({"curve": {"ellipse": {"a": 1.2, "b": 0.9, "tilt": 0.4}},
        "fit": {"start": {"a": 1.0, "b": 1.0}}})";
    ASSERT_EQ(run_in(d, {"--config", (d / "ellipse.json").string(), "fit"}), 0);
    EXPECT_NE(slurp(d / "fit_verdict.json").find("\"verdict\": \"ellipse\""), std::string::npos);
    ASSERT_EQ(run_in(d, {"--set", kBumpy, "fit"}), 0);
    const std::string v = slurp(d / "fit_verdict.json");
    EXPECT_NE(v.find("non-elliptic remainder"), std::string::npos);
    EXPECT_NE(v.find("no improvement"), std::string::npos);
}

TEST(Cli, DeterministicAcrossRunsAndWorkers) {
    const fs::path a = fresh_dir("det_a");
    const fs::path b = fresh_dir("det_b");
    ASSERT_EQ(run_in(a, {"--set", kBumpy, "--set", "q=[3,5]", "verify", "witness"}), 1);
    ASSERT_EQ(run_in(b, {"--workers", "3", "--set", kBumpy, "--set", "q=[3,5]", "verify", "witness"}), 1);
    for (const char* f : {"verify_witness.json", "verify_witness.csv"}) {
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
}

TEST(Cli, Selftest) {
    std::ostringstream out, err;
    EXPECT_EQ(run({"selftest"}, out, err), 0);
    EXPECT_EQ(out.str().find("FAIL"), std::string::npos);
}
