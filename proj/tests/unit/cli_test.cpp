#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli/cli.hpp"

namespace fs = std::filesystem;

namespace sforge::cli {
namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path data_dir() { return fs::path(SCENARIO_FORGE_DATA_DIR) / "synthetic"; }

class CliFixture : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("sforge_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        std::ifstream in(data_dir() / "run.json");
        doc_ = nlohmann::json::parse(in);
        doc_["paths"]["market_csv"] = (data_dir() / "market.csv").string();
        doc_["paths"]["output_dir"] = (dir_ / "out").string();
        doc_["period"]["end"] = "2023-04-08T04:00:00Z";
        doc_["tuning"]["validation"]["end"] = "2023-04-01T03:00:00Z";
        write_config();
    }
    void TearDown() override { fs::remove_all(dir_); }

    void write_config() {
        std::ofstream(config()) << doc_.dump(2);
    }
    std::string config() const { return (dir_ / "run.json").string(); }
    fs::path out_dir() const { return dir_ / "out"; }

    fs::path dir_;
    nlohmann::json doc_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

bool single_error_line(const std::string& err, const std::string& prefix) {
    return err.rfind(prefix, 0) == 0 && err.find('\n') == err.size() - 1;
}

TEST(Cli, HelpOnEverySubcommand) {
    EXPECT_EQ(run({"--help"}).code, kExitOk);
    for (const char* sub : {"ingest", "cluster", "validate-forecast", "select", "evaluate", "backtest", "report",
                            "tune-weights"}) {
        const auto r = run({sub, "--help"});
        EXPECT_EQ(r.code, kExitOk) << sub;
        EXPECT_NE(r.out.find("--threads"), std::string::npos) << sub;
    }
}

TEST(Cli, UsageErrors) {
    auto r = run({"frobnicate"});
    EXPECT_EQ(r.code, kExitError);
    EXPECT_TRUE(single_error_line(r.err, "ERROR:USAGE:")) << r.err;
    r = run({"ingest"});
    EXPECT_EQ(r.code, kExitError);
    EXPECT_TRUE(single_error_line(r.err, "ERROR:USAGE:")) << r.err;
    r = run({"ingest", "--input", "x.csv", "--threads", "0"});
    EXPECT_EQ(r.code, kExitError);
}

TEST_F(CliFixture, MissingMarketFileNamesTheField) {
    doc_["paths"]["market_csv"] = (dir_ / "absent.csv").string();
    write_config();
    const auto r = run({"backtest", "--config", config()});
    EXPECT_EQ(r.code, kExitError);
    EXPECT_TRUE(single_error_line(r.err, "ERROR:CONFIG:paths.market_csv")) << r.err;
}

TEST_F(CliFixture, UnknownConfigKeyRejected) {
    doc_["selection"]["n_scenarioz"] = 3;
    write_config();
    const auto r = run({"backtest", "--config", config()});
    EXPECT_EQ(r.code, kExitError);
    EXPECT_TRUE(single_error_line(r.err, "ERROR:CONFIG:selection.n_scenarioz")) << r.err;
}

TEST_F(CliFixture, SelectTooManyScenarios) {
    const auto r = run({"select", "--config", config(), "--at", "2023-04-08T00:00:00Z", "--n", "100000"});
    EXPECT_EQ(r.code, kExitError);
    EXPECT_TRUE(single_error_line(r.err, "ERROR:POOL_TOO_SMALL:")) << r.err;
}

TEST_F(CliFixture, IngestReportsCoverage) {
    const auto r = run({"ingest", "--input", (data_dir() / "market.csv").string(), "--out", (dir_ / "m.csv").string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("ENERGY_RT,2023-01-02T00:00:00Z"), std::string::npos) << r.out;
    EXPECT_EQ(slurp(dir_ / "m.csv"), slurp(data_dir() / "market.csv"));
}

TEST_F(CliFixture, SelectEvaluateAndValidate) {
    const auto sel = run({"select", "--config", config(), "--at", "2023-04-08T00:00:00Z", "--out",
                          (dir_ / "s.csv").string()});
    ASSERT_EQ(sel.code, kExitOk) << sel.err;
    const auto ev = run({"evaluate", "--config", config(), "--scenarios", (dir_ / "s.csv").string(), "--at",
                         "2023-04-08T00:00:00Z", "--plot", (dir_ / "plot.csv").string()});
    ASSERT_EQ(ev.code, kExitOk) << ev.err;
    EXPECT_NE(ev.out.find("sm="), std::string::npos);
    EXPECT_TRUE(fs::exists(dir_ / "plot.csv"));

    std::ofstream(dir_ / "f.csv") << "issue_time,product,step,level,value\n"
                                     "2023-04-08T00:00:00Z,ENERGY_RT,0,0.1,1\n"
                                     "2023-04-08T00:00:00Z,ENERGY_RT,0,0.5,3\n"
                                     "2023-04-08T00:00:00Z,ENERGY_RT,1,0.1,4\n"
                                     "2023-04-08T00:00:00Z,ENERGY_RT,1,0.5,2\n";
    const auto bad = run({"validate-forecast", "--input", (dir_ / "f.csv").string()});
    EXPECT_EQ(bad.code, kExitError);
    EXPECT_TRUE(single_error_line(bad.err, "ERROR:QUANTILE_CROSSING:")) << bad.err;
    EXPECT_NE(bad.err.find("step=1"), std::string::npos);
}

TEST_F(CliFixture, BacktestReportAndCluster) {
    const auto bt = run({"backtest", "--config", config()});
    ASSERT_EQ(bt.code, kExitOk) << bt.err;
    for (const char* f : {"backtest_proposed.csv", "backtest_benchmark.csv", "backtest_proposed_summary.csv",
                          "comparison.csv", "comparison.txt", "per_decision_sm.csv", "resolved_config.json"}) {
        EXPECT_TRUE(fs::exists(out_dir() / f)) << f;
    }
    const auto rep = run({"report", "--run", "benchmark=" + (out_dir() / "backtest_benchmark.csv").string(), "--run",
                          "proposed=" + (out_dir() / "backtest_proposed.csv").string(), "--out",
                          (dir_ / "rep").string()});
    ASSERT_EQ(rep.code, kExitOk) << rep.err;
    EXPECT_EQ(slurp(dir_ / "rep" / "comparison.csv"), slurp(out_dir() / "comparison.csv"));

    const auto cl = run({"cluster", "--config", config(), "--out", (dir_ / "cl").string()});
    ASSERT_EQ(cl.code, kExitOk) << cl.err;
    EXPECT_TRUE(fs::exists(dir_ / "cl" / "cluster_proposed.json"));
    EXPECT_TRUE(fs::exists(dir_ / "cl" / "cluster_benchmark.json"));
}

TEST_F(CliFixture, TuneWeights) {
    const auto r = run({"tune-weights", "--config", config()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto csv = slurp(out_dir() / "tuning.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "rank,label,mean_sm");
    EXPECT_NE(csv.find("rt_da"), std::string::npos);
}

TEST_F(CliFixture, ThreadsFromEnvironment) {
    ::setenv("SCENARIO_FORGE_THREADS", "many", 1);
    auto r = run({"select", "--config", config(), "--at", "2023-04-08T00:00:00Z", "--out", (dir_ / "a.csv").string()});
    EXPECT_EQ(r.code, kExitError);
    EXPECT_TRUE(single_error_line(r.err, "ERROR:CONFIG:SCENARIO_FORGE_THREADS")) << r.err;

    ::setenv("SCENARIO_FORGE_THREADS", "3", 1);
    r = run({"select", "--config", config(), "--at", "2023-04-08T00:00:00Z", "--out", (dir_ / "b.csv").string()});
    ::unsetenv("SCENARIO_FORGE_THREADS");
    ASSERT_EQ(r.code, kExitOk) << r.err;
    r = run({"select", "--config", config(), "--at", "2023-04-08T00:00:00Z", "--out", (dir_ / "c.csv").string(),
             "--threads", "1"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(slurp(dir_ / "b.csv"), slurp(dir_ / "c.csv"));
}

}  // namespace
}  // namespace sforge::cli
