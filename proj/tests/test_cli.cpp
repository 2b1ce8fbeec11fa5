#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "orhc/cli.hpp"

namespace fs = std::filesystem;

namespace {
struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "orhc");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = orhc::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("orhc_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};
}  // namespace

TEST_F(Cli, GenWritesCompleteDigraph) {
  const auto r = run({"gen", "--n", "10", "--p", "1", "--seed", "7", "--out", path("g.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto d = orhc::load_digraph(path("g.txt"));
  EXPECT_EQ(d.edge_count(), 90u);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  const auto bad = run({"gen", "--n", "10", "--bogus", "3"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("Usage"), std::string::npos);
  const auto range = run({"gen", "--n", "10", "--p", "1.5"});
  EXPECT_EQ(range.code, 2);
  EXPECT_NE(range.err.find("p:"), std::string::npos);
  EXPECT_EQ(run({"count", "--n", "12", "--exact", "--samples", "10", "--out", path("c.csv")}).code, 2);
  EXPECT_EQ(run({"complete", "--sigma", "++"}).code, 2);
}

TEST_F(Cli, HelpExitsZero) {
  EXPECT_EQ(run({"--help"}).code, 0);
  const auto r = run({"pack", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--sigmas"), std::string::npos);
}

TEST_F(Cli, PackWithNoCyclesIsAnEmptySuccess) {
  const auto r = run({"pack", "--n", "30", "--p", "0.5", "--t", "0", "--runs", "2", "--out", path("p.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("p.json"));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j["success"].get<bool>());
    EXPECT_TRUE(j["cycles"].empty());
    ++lines;
  }
  EXPECT_EQ(lines, 2);
}

TEST_F(Cli, PackFailureExitsOne) {
  const auto r = run({"pack", "--n", "128", "--p", "0.25", "--epsilon", "0.5", "--runs", "1", "--out", path("p.json")});
  EXPECT_EQ(r.code, 1);
}

TEST_F(Cli, PackDenseSuccess) {
  const auto r = run({"pack", "--n", "24", "--p", "1", "--epsilon", "0.9", "--sigmas", "mixed", "--seed", "3", "--runs", "1", "--out",
                      path("p.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(path("p.json")));
  EXPECT_EQ(j["cycles"].size(), 2u);
  EXPECT_EQ(j["cycles"][0]["edges"].size(), 24u);
}

TEST_F(Cli, CompletePrintsPathOrNone) {
  ASSERT_EQ(run({"gen", "--n", "6", "--p", "1", "--out", path("k6.txt")}).code, 0);
  EXPECT_EQ(run({"complete", "--graph", path("k6.txt"), "--a", "0", "--b", "5", "--sigma", "+-+-+", "--out", path("o.txt")}).code, 0);
  std::istringstream path_line(slurp(path("o.txt")));
  std::vector<int> vs;
  for (int v; path_line >> v;) vs.push_back(v);
  ASSERT_EQ(vs.size(), 6u);
  EXPECT_EQ(vs.front(), 0);
  EXPECT_EQ(vs.back(), 5);

  ASSERT_EQ(run({"gen", "--n", "4", "--p", "0", "--out", path("e4.txt")}).code, 0);
  EXPECT_EQ(run({"complete", "--graph", path("e4.txt"), "--a", "0", "--b", "3", "--sigma", "+++", "--out", path("o.txt")}).code, 1);
  EXPECT_EQ(slurp(path("o.txt")), "NONE\n");
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  {
    std::ofstream cfg(path("x.cfg"));
    cfg << "n = 5\np = 0\nseed = 4\n";
  }
  ASSERT_EQ(run({"gen", "--config", path("x.cfg"), "--p", "1", "--out", path("g.txt"), "--save-config", path("eff.cfg")}).code, 0);
  EXPECT_EQ(orhc::load_digraph(path("g.txt")).edge_count(), 20u);
  const auto eff = orhc::load_config(path("eff.cfg"));
  EXPECT_EQ(eff.n, 5u);
  EXPECT_EQ(eff.p, 1.0);
  {
    std::ofstream cfg(path("bad.cfg"));
    cfg << "n = 5\np = 2\n";
  }
  EXPECT_EQ(run({"gen", "--config", path("bad.cfg")}).code, 2);
}

TEST_F(Cli, OutputsAreReproducible) {
  for (int i = 0; i < 2; ++i) {
    const auto s = std::to_string(i);
    ASSERT_EQ(run({"count", "--n", "7", "--p", "0.5", "--sigma", "random", "--samples", "5000", "--seed", "3", "--exact",
                   "--out", path("c" + s + ".csv")}).code, 0);
    ASSERT_EQ(run({"threshold", "--n", "10", "--c-list=-1,1", "--trials", "40", "--seed", "2", "--out",
                   path("t" + s + ".csv")}).code, 0);
    ASSERT_EQ(run({"bound-check", "--model", "adaptive", "--N", "500", "--q", "0.05", "--m", "5", "--runs", "300",
                   "--out", path("b" + s + ".csv")}).code, 0);
    ASSERT_EQ(run({"embed", "--n", "50", "--delta", "3", "--trials", "20", "--seed", "5", "--out", path("e" + s + ".csv")}).code, 0);
    ASSERT_EQ(run({"pack", "--n", "24", "--p", "1", "--epsilon", "0.9", "--runs", "2", "--out", path("p" + s + ".json")}).code, 0);
  }
  for (const char* f : {"c", "t", "b", "e"}) EXPECT_EQ(slurp(path(std::string(f) + "0.csv")), slurp(path(std::string(f) + "1.csv"))) << f;
  // pack records are identical once the timing field is dropped
  std::ifstream a(path("p0.json")), b(path("p1.json"));
  std::string la, lb;
  while (std::getline(a, la) && std::getline(b, lb)) {
    auto ja = nlohmann::json::parse(la), jb = nlohmann::json::parse(lb);
    ja.erase("timing_ms");
    jb.erase("timing_ms");
    EXPECT_EQ(ja, jb);
  }
}

TEST_F(Cli, EmbedCsvColumns) {
  ASSERT_EQ(run({"embed", "--n", "40", "--trials", "3", "--out", path("e.csv")}).code, 0);
  std::istringstream in(slurp(path("e.csv")));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "trial,result,rounds,exposures,failed_round");
}

TEST_F(Cli, BinaryExitCodes) {
  const std::string exe = ORHC_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int s = std::system((exe + " " + args + " > " + path("stdout.txt") + " 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  EXPECT_EQ(status("gen --n 4 --p 1"), 0);
  EXPECT_EQ(status("gen --n 4 --wat"), 2);
  EXPECT_EQ(status("pack --n 128 --p 0.25 --epsilon 0.5 --runs 1 --out " + path("p.json")), 1);
}
