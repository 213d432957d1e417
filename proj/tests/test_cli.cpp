#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
};

fs::path scratch() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("veertrack_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string fixture(const std::string& name) { return std::string(VEERTRACK_FIXTURE_DIR) + "/" + name; }

CliRun run(const std::string& args) {
    fs::path out = scratch() / "stdout.txt";
    std::string cmd = std::string(VEERTRACK_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::vector<std::string> lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);)
        if (!l.empty()) out.push_back(l);
    return out;
}

}  // namespace

TEST(Cli, ValidateGoodSurface) {
    CliRun r = run("validate --input " + fixture("t2.json"));
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("\"28/25\""), std::string::npos) << r.out;
}

TEST(Cli, ValidateBadSurfaceListsViolations) {
    fs::path bad = scratch() / "bad.json";
    std::ofstream(bad) << R"({"mode":"exact","edges":{"a":["1","0"],"b":["0","1"],"c":["1","1"]},
      "triangles":[[{"edge":"a","sign":1},{"edge":"b","sign":1},{"edge":"c","sign":1}],
                   [{"edge":"a","sign":-1},{"edge":"b","sign":-1},{"edge":"c","sign":-1}]]})";
    CliRun r = run("validate --input " + bad.string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("zero-sum"), std::string::npos) << r.out;
}

TEST(Cli, MalformedAndMissingInputs) {
    fs::path junk = scratch() / "junk.json";
    std::ofstream(junk) << "{ not json";
    EXPECT_EQ(run("validate --input " + junk.string()).code, 1);
    EXPECT_EQ(run("flow --input " + (scratch() / "absent.json").string() + " --time 1").code, 1);
    EXPECT_EQ(run("flow --input " + fixture("t2.json")).code, 1);  // --time is required
    EXPECT_EQ(run("").code, 1);
}

TEST(Cli, FlowCsvHasOneEvent) {
    fs::path csv = scratch() / "events.csv";
    CliRun r = run("flow --input " + fixture("t2.json") + " --time 0.5 --csv " + csv.string());
    ASSERT_EQ(r.code, 0) << r.out;
    auto l = lines(csv);
    ASSERT_EQ(l.size(), 2u);
    EXPECT_EQ(l[0], "index,threshold,t,edge,direction,losers,winners");
    EXPECT_EQ(l[1].substr(0, 8), "0,23/10,");
    EXPECT_NE(l[1].find(",e1,L,"), std::string::npos);
}

TEST(Cli, DegeneracyExitCode) {
    // T2 reaches an axis-parallel diagonal shortly after t = 0.6
    CliRun r = run("flow --input " + fixture("t2.json") + " --time 1.0");
    EXPECT_EQ(r.code, 2) << r.out;
    EXPECT_EQ(run("flow --input " + fixture("genus2.json") + " --time 3").code, 2);
    EXPECT_EQ(run("flow --input " + fixture("genus2.json") + " --time 3 --max-events 40 --batch").code, 0);
}

TEST(Cli, DelaunayEmitsFlipLog) {
    fs::path csv = scratch() / "flips.csv";
    CliRun r = run("delaunay --input " + fixture("near_collision.json") + " --emit-flips " + csv.string());
    ASSERT_EQ(r.code, 0) << r.out;
    auto l = lines(csv);
    ASSERT_GE(l.size(), 1u);
    EXPECT_EQ(l[0], "step,edge,old_w,old_h,new_w,new_h");
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["flips"].get<std::size_t>() + 1, l.size());
}

TEST(Cli, TrackVertexCurves) {
    CliRun r = run("track --input " + fixture("t2.json") + " --direction vertical --vertex-curves");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(r.out, "e1,e2,e3\n1,1,0\n1,0,1\n");
    EXPECT_EQ(run("track --input " + fixture("t2.json") + " --direction sideways").code, 1);
}

TEST(Cli, AnalyzeGold) {
    fs::path rep = scratch() / "pa.json";
    CliRun r = run("analyze --input " + fixture("gold.json") + " --time 5 --report " + rep.string());
    ASSERT_EQ(r.code, 0) << r.out;
    std::ifstream in(rep);
    auto j = nlohmann::json::parse(in);
    EXPECT_TRUE(j["is_pA"].get<bool>());
    EXPECT_NEAR(j["dilatation"].get<double>(), (3 + std::sqrt(5.0)) / 2, 1e-9);
}

TEST(Cli, ContractWritesSamples) {
    fs::path csv = scratch() / "contract.csv";
    CliRun r = run("contract --input " + fixture("gold.json") + " --times 1,2 --trials 2 --csv " + csv.string());
    ASSERT_EQ(r.code, 0) << r.out;
    auto l = lines(csv);
    ASSERT_EQ(l.size(), 5u);
    EXPECT_EQ(l[0], "T,trial,d0,dT,ratio");
}

TEST(Cli, CloseGold) {
    CliRun r = run("close --input " + fixture("gold.json") + " --time 12 --delta 1e-3");
    ASSERT_EQ(r.code, 0) << r.out;
    auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["converged"].get<bool>());
    EXPECT_NEAR(j["T_prime"].get<double>(), std::log((3 + std::sqrt(5.0)) / 2), 1e-6);
    EXPECT_EQ(j["periodic_point"]["mode"], "float");
}

TEST(Cli, ReportWritesHilbertCsv) {
    fs::path csv = scratch() / "hilbert.csv";
    CliRun r = run("report --input " + fixture("gold.json") + " --time 4 --hilbert " + csv.string());
    ASSERT_EQ(r.code, 0) << r.out;
    auto l = lines(csv);
    ASSERT_GE(l.size(), 3u);
    EXPECT_EQ(l[0], "t,diameter");
    auto j = nlohmann::json::parse(r.out);
    EXPECT_LT(j["hilbert_log_slope"].get<double>(), 0);
}
