#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "parity_qaoa/parity_qaoa.hpp"

using namespace parity_qaoa;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = -1;
    std::string output;
};

CliResult run_cli(const std::string &args, const fs::path &cwd) {
    std::string cmd = "cd '" + cwd.string() + "' && '" PARITY_QAOA_CLI "' " + args + " 2>&1";
    CliResult r;
    FILE *pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        return r;
    }
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) {
        r.output.append(buf, n);
    }
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test {
   protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("parity_qaoa_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override {
        fs::remove_all(dir_);
    }
    CliResult run(const std::string &args) {
        return run_cli(args, dir_);
    }
    fs::path dir_;
};

}  // namespace

TEST_F(Cli, CompileWritesLayoutAndPartition) {
    auto r = run("compile --complete 6 --partition three-body --out six");
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("K=15 n_C=4 n_C_tot=10 n_r=0.4"), std::string::npos) << r.output;
    auto layout = load_layout(slurp(dir_ / "six.layout.json"));
    EXPECT_EQ(layout.qubit_count(), 15u);
    auto part = load_partition(slurp(dir_ / "six.partition.json"), layout);
    EXPECT_EQ(part.n_explicit(), 4u);
    EXPECT_TRUE(fs::exists(dir_ / "six.manifest.json"));
}

TEST_F(Cli, ModularizedCompileBoundsModules) {
    auto r = run("compile --complete 12 --partition three-body --l-max 4 --out twelve");
    ASSERT_EQ(r.code, 0) << r.output;
    auto layout = load_layout(slurp(dir_ / "twelve.layout.json"));
    auto part = load_partition(slurp(dir_ / "twelve.partition.json"), layout);
    EXPECT_EQ(part.l_max(), 4);
    for (const auto &m : part.modules()) {
        EXPECT_LE(m.row1 - m.row0 + 1, 4);
        EXPECT_LE(m.col1 - m.col0 + 1, 4);
    }
}

TEST_F(Cli, SynthFromLayoutFile) {
    auto r = run("synth --layout '" PARITY_QAOA_DATA_DIR "/four_body_patch.json' --partition implicit --out d.json");
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("lines=7 expected=7"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("valid=yes"), std::string::npos);
    auto layout = load_layout(slurp(PARITY_QAOA_DATA_DIR "/four_body_patch.json"));
    auto d = load_driver_set(slurp(dir_ / "d.json"), layout);
    EXPECT_TRUE(validate_driver_set(d, layout, partition_all_implicit(layout)).passed());
}

TEST_F(Cli, CircuitTextParsesBack) {
    auto r = run("circuit --complete 4 --partition three-body --p 2 --seed 3 --out c.txt");
    ASSERT_EQ(r.code, 0) << r.output;
    auto c = parse_circuit(slurp(dir_ / "c.txt"), 6);
    EXPECT_EQ(c.qubit_count(), 6u);
    EXPECT_NE(r.output.find("gates=" + std::to_string(c.size())), std::string::npos) << r.output;
    EXPECT_EQ(run("circuit --complete 4 --partition three-body --p 1 --params 0.1,0.2 --out c.txt").code, 2);
}

TEST_F(Cli, UsageAndValidationErrorsExitTwo) {
    EXPECT_EQ(run("compile --complete 6 --layout x.json").code, 2);
    EXPECT_EQ(run("compile --complete 6 --partition bogus").code, 2);
    EXPECT_EQ(run("compile --complete 6 --l-max 1").code, 2);
    EXPECT_EQ(run("compile --layout missing.json").code, 2);
    std::ofstream(dir_ / "bad.json") << "{\"qubits\": [";
    auto r = run("compile --layout bad.json");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("bad.json"), std::string::npos) << r.output;
    EXPECT_EQ(run("qaoa --complete 4 --modes sideways").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, OversizedSimulationExitsThree) {
    auto r = run("qaoa --complete 8 --instances 1 --restarts 1 --p 1");
    EXPECT_EQ(r.code, 3) << r.output;
    EXPECT_NE(r.output.find("depth-scan"), std::string::npos) << r.output;
}

TEST_F(Cli, SeededQaoaIsByteIdenticalAndReplays) {
    std::string args = "qaoa --complete 4 --instances 3 --p 1 --restarts 2 --noise 0,0.02 --trajectories 20 --seed 7 ";
    ASSERT_EQ(run(args + "--out a.csv").code, 0);
    ASSERT_EQ(run(args + "--out b.csv").code, 0);
    EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));
    auto r = run("replay --manifest a.csv.manifest.json");
    EXPECT_EQ(r.code, 0) << r.output;
    EXPECT_EQ(slurp(dir_ / "a.csv.replay"), slurp(dir_ / "a.csv"));

    auto m = nlohmann::json::parse(slurp(dir_ / "a.csv.manifest.json"));
    EXPECT_EQ(m.at("command"), "qaoa");
    EXPECT_EQ(m.at("seed"), 7);
    m["outputs"][0]["sha256"] = std::string(64, '0');
    std::ofstream(dir_ / "tampered.json") << m.dump();
    EXPECT_EQ(run("replay --manifest tampered.json").code, 2);
}

TEST_F(Cli, ReplayDetectsChangedInputs) {
    fs::copy_file(PARITY_QAOA_DATA_DIR "/four_body_patch.json", dir_ / "patch.json");
    ASSERT_EQ(run("synth --layout patch.json --partition implicit --out d.json").code, 0);
    EXPECT_EQ(run("replay --manifest d.json.manifest.json").code, 0);
    auto layout = load_layout(slurp(dir_ / "patch.json"));
    std::vector<double> j(layout.qubit_count(), 0.5);
    std::ofstream(dir_ / "patch.json", std::ios::trunc) << serialize_layout(layout.with_coefficients(j));
    EXPECT_EQ(run("replay --manifest d.json.manifest.json").code, 2);
}

TEST_F(Cli, DepthScanCsv) {
    auto r = run("depth-scan --complete 6,8 --out scan.csv");
    ASSERT_EQ(r.code, 0) << r.output;
    std::istringstream in(slurp(dir_ / "scan.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "N,n_r,depth,marker");
    int rows = 0, markers = 0;
    while (std::getline(in, line)) {
        rows++;
        markers += line.back() == '1';
    }
    EXPECT_EQ(rows, 6);
    EXPECT_EQ(markers, 2);
}

TEST(DepthScan, ImplicitDepthGrowsWithSize) {
    std::size_t prev = 0;
    for (int n : {6, 8, 10}) {
        auto scan = depth_scan(n, false);
        ASSERT_FALSE(scan.empty());
        EXPECT_EQ(scan.front().n_r, 0.0);
        EXPECT_GT(scan.front().depth, prev) << "N=" << n;
        prev = scan.front().depth;
        for (const auto &p : scan) {
            if (p.marker) {
                EXPECT_LT(p.depth, scan.front().depth) << "N=" << n;
            }
        }
    }
}

TEST(DepthScan, SweepIsOrderedAndBracketed) {
    auto scan = depth_scan(8, true);
    ASSERT_GE(scan.size(), 4u);
    EXPECT_EQ(scan.front().n_r, 0.0);
    EXPECT_EQ(scan.back().n_r, 1.0);
    EXPECT_EQ(std::count_if(scan.begin(), scan.end(), [](const DepthPoint &p) { return p.marker; }), 1);
}

TEST(DepthScan, ModularDriverDepthIndependentOfSize) {
    auto at = [](int n) {
        auto l = generate_complete_layout(n);
        auto p = depth_point(l, modularize(l, 4, partition_three_body_explicit(l)));
        EXPECT_TRUE(p.has_value()) << "N=" << n;
        return p ? p->driver_depth : 0;
    };
    EXPECT_EQ(at(20), at(40));
}
