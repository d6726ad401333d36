#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

/// Runs the CLI with `args`; stderr goes to /dev/null.
Run run(const std::string& args) {
    const std::string cmd = std::string(SYMMAP_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("symmap_cli_" + name + "_" + std::to_string(std::random_device{}()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("nonsense").code, 2);
    EXPECT_EQ(run("reproduce nowhere").code, 2);
    EXPECT_EQ(run("detect --basis d4_5x4 --L 5 --z 1.5 --state builtin:state18:0.3,0.2,0.2,0.3").code, 2);
    EXPECT_EQ(run("detect --basis d4_5x4 --L 5 --z 1 --state builtin:state18:0.3,0.2").code, 2);
    EXPECT_EQ(run("povm verify --basis nope").code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, PovmVerify) {
    const auto r = run("povm verify --basis d4_5x4");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_TRUE(j.at("passed").get<bool>());
    EXPECT_NEAR(j.at("x_opt").get<double>(), 0.375, 1e-10);
    EXPECT_EQ(j.at("gram_rank"), 16);
}

TEST(Cli, DetectVerdicts) {
    const auto yes = run("detect --basis d4_5x4 --L 5 --z 1 --state builtin:state18:0.3,0.2333333333333333,0.2333333333333333,0.2333333333333334");
    ASSERT_EQ(yes.code, 0);
    EXPECT_TRUE(json::parse(yes.out).at("entangled").get<bool>());
    const auto no = run("detect --basis d4_5x4 --L 5 --z 1 --state builtin:state18:0.2,0.2666666666666667,0.2666666666666667,0.2666666666666666");
    ASSERT_EQ(no.code, 0);
    EXPECT_FALSE(json::parse(no.out).at("entangled").get<bool>());
}

TEST(Cli, WitnessRoundTrip) {
    const auto dir = scratch("witness");
    ASSERT_EQ(run("--out " + dir.string() + " witness build --basis d3_4x3 --L 1 --z -1 --form rescaled").code, 0);
    const auto r = run("witness expect --witness " + (dir / "witness.json").string() + " --state builtin:rho1");
    ASSERT_EQ(r.code, 0);
    EXPECT_LT(std::stod(r.out), -1e-6);
    const auto ppt = run("witness ppt --state builtin:rho3");
    ASSERT_EQ(ppt.code, 0);
    EXPECT_TRUE(json::parse(ppt.out).at("ppt").get<bool>());
    fs::remove_all(dir);
}

TEST(Cli, BoundReportsComparison) {
    const auto r = run("bound --state builtin:state18:1,0,0,0 --z 1");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j.at("bound").get<double>(), 1 / (2 * std::sqrt(6.0)), 1e-9);
    EXPECT_FALSE(j.at("comparison").is_null());
}

TEST(Cli, ScanHeaderAndJson) {
    const auto csv = run("scan bounds --grid q1=0:1:0.5,z=0:1:1");
    ASSERT_EQ(csv.code, 0);
    EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "q1,z,bound,baseline");
    EXPECT_EQ(std::count(csv.out.begin(), csv.out.end(), '\n'), 7);
    const auto js = run("--format json scan bounds --grid q1=0:1:0.5,z=0:1:1");
    ASSERT_EQ(js.code, 0);
    const auto j = json::parse(js.out);
    ASSERT_EQ(j.size(), 6u);
    EXPECT_TRUE(j[0].contains("baseline"));
    EXPECT_EQ(run("scan bounds --grid q1=0:1").code, 2);
}

TEST(Cli, ReproduceFig2AndThresholds) {
    const auto dir = scratch("repro");
    ASSERT_EQ(run("--out " + dir.string() + " reproduce fig2").code, 0);
    const auto manifest = json::parse(slurp(dir / "manifest.json"));
    ASSERT_EQ(manifest.at("outputs").size(), 1u);
    const auto fig2 = slurp(dir / manifest.at("outputs")[0].get<std::string>());
    EXPECT_EQ(fig2.substr(0, fig2.find('\n')), "q1,bound76,bound77");
    EXPECT_EQ(manifest.at("seed"), 42);
    EXPECT_EQ(run("--out " + dir.string() + " reproduce appendixC").code, 0);
    fs::remove_all(dir);
}

TEST(Cli, DeterministicOutputs) {
    const auto a = scratch("det_a"), b = scratch("det_b");
    ASSERT_EQ(run("--seed 7 --out " + a.string() + " reproduce example3").code, 0);
    ASSERT_EQ(run("--seed 7 --out " + b.string() + " reproduce example3").code, 0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path().filename();
        ++files;
    }
    EXPECT_GE(files, 2u);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Cli, ValidatePassesAndCorruptedFixtureFails) {
    EXPECT_EQ(run("validate").code, 0);
    const auto dir = scratch("fixtures");
    ASSERT_EQ(run("--out " + dir.string() + " fixtures export").code, 0);
    EXPECT_EQ(run("validate --fixtures " + dir.string()).code, 0);

    const auto path = dir / "example2_printed.json";
    auto j = json::parse(slurp(path));
    j["constant"]["entries"][0][0] = j["constant"]["entries"][0][0].get<double>() + 0.5;
    std::ofstream(path) << j.dump();
    const std::string cmd = std::string(SYMMAP_CLI_PATH) + " validate --fixtures " + dir.string() + " 2>&1 >/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    ASSERT_NE(p, nullptr);
    std::string err;
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) err.append(buf, n);
    const int status = pclose(p);
    EXPECT_EQ(WEXITSTATUS(status), 1);
    EXPECT_NE(err.find("example2_printed"), std::string::npos) << err;

    fs::remove(dir / "example3_printed.json");
    EXPECT_EQ(run("validate --fixtures " + dir.string()).code, 1);
    fs::remove_all(dir);
}
