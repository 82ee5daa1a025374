#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "commands.hpp"

using ckn::cli::json;
namespace fs = std::filesystem;

namespace {
struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "ckn");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = ckn::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("ckn_cli_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name, const std::string& content = "") const {
        auto p = path_ / name;
        if (!content.empty()) std::ofstream(p) << content;
        return p.string();
    }

private:
    fs::path path_;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

const char* kGridConfig = R"({
  "grid": {"n": [3], "p": [2], "r": [1.5, 2, 3], "alpha": [0], "beta": [-1, 0, 1]},
  "b": [0],
  "profiles": [{"kind": "gaussian", "scale": 1}]
})";
}  // namespace

TEST(Check, HpwIsAdmissible) {
    auto r = run_cli({"check", "-n", "3", "-p", "2", "-r", "2", "--alpha", "0", "--beta", "-2"});
    ASSERT_EQ(r.code, 0) << r.err;
    json j = json::parse(r.out);
    EXPECT_NEAR(j["params"]["gamma"].get<double>(), 0.0, 1e-15);
    EXPECT_NEAR(j["derived"]["c_sharp"].get<double>(), 2.0 / 3.0, 1e-15);
    EXPECT_EQ(j["case"], "CaseV");
    EXPECT_TRUE(j["admissible"].get<bool>());
    EXPECT_EQ(j["meta"]["command"], "check");
    for (const auto& ch : j["checks"]) EXPECT_TRUE(ch["pass"].get<bool>()) << ch;
}

TEST(Check, InadmissibleExitsOne) {
    auto r = run_cli({"check", "-n", "2", "-p", "2", "-r", "2", "--alpha", "0", "--beta", "2"});
    EXPECT_EQ(r.code, 1);
    json j = json::parse(r.out);
    EXPECT_FALSE(j["admissible"].get<bool>());
    bool some_fail = false;
    for (const auto& ch : j["checks"]) some_fail |= !ch["pass"].get<bool>();
    EXPECT_TRUE(some_fail);
}

TEST(Check, UsageErrorsExitTwo) {
    EXPECT_EQ(run_cli({"check", "-n", "3", "-p", "2", "-r", "2", "--bogus"}).code, 2);
    EXPECT_EQ(run_cli({"check", "-n", "three", "-p", "2", "-r", "2"}).code, 2);
    EXPECT_EQ(run_cli({"check", "-p", "2", "-r", "2"}).code, 2);
    EXPECT_EQ(run_cli({}).code, 2);
    EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
    EXPECT_EQ(run_cli({"check", "-n", "1", "-p", "2", "-r", "2"}).code, 2);
    auto help = run_cli({"--help"});
    EXPECT_EQ(help.code, 0);
    EXPECT_NE(help.out.find("verify"), std::string::npos);
}

TEST(Verify, HpwGaussian) {
    auto r = run_cli({"verify", "-n", "3", "-p", "2", "-r", "2", "--beta", "-2", "--profile", "gaussian", "--seed", "7"});
    ASSERT_EQ(r.code, 0) << r.out << r.err;
    json j = json::parse(r.out);
    EXPECT_NEAR(j["ratio"].get<double>(), 0.6666667, 1e-7);
    EXPECT_NEAR(j["ratio"].get<double>(), 2.0 / 3.0, 1e-8);
    EXPECT_NEAR(j["bound"].get<double>(), 2.0 / 3.0, 1e-15);
    EXPECT_EQ(j["meta"]["seed"], 7);
    EXPECT_EQ(j["profile"], "gaussian");
    ASSERT_EQ(j["checks"].size(), 3u);
    for (const auto& ch : j["checks"]) EXPECT_TRUE(ch["pass"].get<bool>()) << ch;
}

TEST(Verify, CaseIExtremal) {
    auto r = run_cli({"verify", "-n", "3", "-p", "2", "-r", "3", "--profile", "extremal"});
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NEAR(json::parse(r.out)["ratio"].get<double>(), 1.5, 1.5e-8);
    // power tail against exponential volume growth
    auto curved = run_cli({"verify", "-n", "3", "-p", "2", "-r", "3", "--profile", "extremal", "-b", "1"});
    EXPECT_EQ(curved.code, 3);
    EXPECT_EQ(json::parse(curved.out)["error"].get<std::string>().rfind("non_integrable", 0), 0u);
}

TEST(Verify, CompactExtremalOnHyperbolicSpace) {
    auto r = run_cli({"verify", "-n", "3", "-p", "2", "-r", "0.5", "--profile", "extremal", "-b", "1"});
    ASSERT_EQ(r.code, 0) << r.out;
    json j = json::parse(r.out);
    EXPECT_LT(j["ratio"].get<double>(), j["bound"].get<double>());
    EXPECT_GT(j["quantitative_margin"].get<double>(), -1e-8);
}

TEST(Verify, InadmissibleAndBadInput) {
    EXPECT_EQ(run_cli({"verify", "-n", "2", "-p", "2", "-r", "2", "--beta", "2"}).code, 1);
    EXPECT_EQ(run_cli({"verify", "-n", "3", "-p", "2", "-r", "2", "--profile", "square"}).code, 2);
    EXPECT_EQ(run_cli({"verify", "-n", "3", "-p", "2", "-r", "2", "-b", "-1"}).code, 2);
    EXPECT_EQ(run_cli({"verify", "-n", "3", "-p", "2", "-r", "2", "--tol", "0"}).code, 2);
}

TEST(Sweep, GridDemoHasNineRowsAndExactHeader) {
    TempDir dir;
    auto r = run_cli({"sweep", "--config", dir.file("grid.json", kGridConfig)});
    auto lines = lines_of(r.out);
    ASSERT_EQ(lines.size(), 10u) << r.out << r.err;
    EXPECT_EQ(lines[0], "n,p,r,alpha,beta,gamma,b,profile,ratio,bound,margin,identity_residual,pass,error");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        EXPECT_EQ(std::count(lines[i].begin(), lines[i].end(), ','), 13) << lines[i];
        EXPECT_EQ(lines[i].rfind("3,2,", 0), 0u);
    }
    // r varies slower than beta
    EXPECT_EQ(lines[1].rfind("3,2,1.5,0,-1,", 0), 0u);
    EXPECT_EQ(lines[2].rfind("3,2,1.5,0,0,", 0), 0u);
    EXPECT_EQ(lines[9].rfind("3,2,3,0,1,", 0), 0u);
}

TEST(Sweep, ByteIdenticalAcrossRunsAndWorkerCounts) {
    TempDir dir;
    auto cfg = dir.file("grid.json", kGridConfig);
    auto a = dir.file("a.csv"), b = dir.file("b.csv");
    run_cli({"sweep", "--config", cfg, "--out", a});
    run_cli({"sweep", "--config", cfg, "--out", b, "--workers", "4"});
    EXPECT_FALSE(slurp(a).empty());
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(run_cli({"sweep", "--config", cfg}).out, slurp(a));
}

TEST(Sweep, BadRowsCarryReasonCodes) {
    TempDir dir;
    auto cfg = dir.file("mixed.json", R"({
      "tuples": [[3, 2, 2, 0, -2], [2, 2, 2, 0, 2], [3, 2, 3, 0, 0]],
      "b": [0, 1],
      "profiles": [{"kind": "extremal"}]
    })");
    auto r = run_cli({"sweep", "--config", cfg});
    EXPECT_EQ(r.code, 1);
    auto lines = lines_of(r.out);
    ASSERT_EQ(lines.size(), 7u);
    EXPECT_NE(lines[1].find(",true,"), std::string::npos) << lines[1];
    EXPECT_NE(lines[3].find(",false,inadmissible:"), std::string::npos) << lines[3];
    EXPECT_NE(lines[4].find(",false,inadmissible:"), std::string::npos) << lines[4];
    EXPECT_NE(lines[5].find(",true,"), std::string::npos) << lines[5];
    EXPECT_NE(lines[6].find(",false,non_integrable:"), std::string::npos) << lines[6];
}

TEST(Sweep, ConfigErrorsExitTwo) {
    TempDir dir;
    EXPECT_EQ(run_cli({"sweep", "--config", dir.file("missing.json")}).code, 2);
    EXPECT_EQ(run_cli({"sweep", "--config", dir.file("bad.json", "{not json")}).code, 2);
    EXPECT_EQ(run_cli({"sweep", "--config", dir.file("nogrid.json", R"({"b": [0]})")}).code, 2);
    EXPECT_EQ(run_cli({"sweep", "--config", dir.file("prof.json", R"({"tuples": [[3,2,2,0,-2]], "profiles": [{"kind": "square"}]})")}).code, 2);
}

TEST(Rigidity, EuclideanFlags) {
    TempDir dir;
    auto csv = dir.file("t.csv");
    auto r = run_cli({"rigidity", "-n", "3", "-p", "2", "-r", "2", "--beta", "-2", "--case", "exp", "--csv", csv});
    ASSERT_EQ(r.code, 0) << r.out << r.err;
    json j = json::parse(r.out);
    ASSERT_EQ(j["checks"][0]["name"], "f_equals_t");
    EXPECT_TRUE(j["checks"][0]["pass"].get<bool>());
    EXPECT_EQ(j["table"].size(), 20u);
    auto lines = lines_of(slurp(csv));
    ASSERT_EQ(lines.size(), 21u);
    EXPECT_EQ(lines[0], "lambda,T,F,F_over_T,status");
}

TEST(Rigidity, CompactCaseOnHyperbolicSpace) {
    auto r = run_cli({"rigidity", "-n", "3", "-p", "2", "-r", "0.5", "--case", "compact", "-b", "1", "--lambda-min",
                      "0.01", "--lambda-max", "10", "--points", "12"});
    ASSERT_EQ(r.code, 0) << r.out << r.err;
    json j = json::parse(r.out);
    EXPECT_EQ(j["checks"][0]["name"], "f_at_least_t");
    EXPECT_TRUE(j["checks"][0]["pass"].get<bool>());
    EXPECT_TRUE(j["monotone_nondecreasing"].get<bool>());
}

TEST(Rigidity, NonIntegrablePointsAreMarked) {
    // s = 1/2
    auto r = run_cli({"rigidity", "-n", "3", "-p", "2", "-r", "2", "--beta", "1", "--case", "exp", "-b", "1",
                      "--lambda-min", "1e-3", "--lambda-max", "1e-2", "--points", "4"});
    EXPECT_EQ(r.code, 3);
    json j = json::parse(r.out);
    for (const auto& row : j["table"]) {
        EXPECT_NE(row["status"], "ok");
        EXPECT_TRUE(row["F"].is_null());
    }
    EXPECT_EQ(run_cli({"rigidity", "-n", "3", "-p", "2", "-r", "2", "--case", "compact"}).code, 2);
}
