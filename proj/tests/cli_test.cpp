// Runs the fqn executable as a subprocess.
#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#ifndef FQN_CLI_PATH
#error "FQN_CLI_PATH must name the built fqn executable"
#endif

namespace {

struct Result {
  int status = -1;
  std::string out;
};

Result run(const std::string& args, const std::string& stdin_text = "") {
  const std::string input = ::testing::TempDir() + "cli_test_input.txt";
  {
    std::ofstream f(input);
    f << stdin_text;
  }
  const std::string cmd = std::string(FQN_CLI_PATH) + " " + args + " < " + input + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string repeat_line(const std::string& line, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += line + "\n";
  return s;
}

}  // namespace

TEST(Cli, QnUnitMode) {
  const Result r = run("qn --dn-mode unit", "1\n2\n4\n8\n");
  ASSERT_EQ(r.status, 0);
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[0], "n,stat,qn");
  EXPECT_EQ(l[1].substr(0, 4), "4,3,");
  EXPECT_NEAR(std::stod(l[1].substr(4)), 6.6657, 1e-12);
}

TEST(Cli, QnFastAgreesWithDefault) {
  const std::string input = "3.5\n-1\n7\n2\n2\n9.25\n0.5\n";
  const Result slow = run("qn", input);
  const Result fast = run("qn --fast", input);
  ASSERT_EQ(slow.status, 0);
  ASSERT_EQ(fast.status, 0);
  EXPECT_EQ(slow.out, fast.out);
}

TEST(Cli, QnNeedsTwoValues) {
  EXPECT_EQ(run("qn", "5\n").status, 1);
}

TEST(Cli, DetectRequiresW) {
  EXPECT_EQ(run("detect", "1\n2\n3\n").status, 1);
  EXPECT_EQ(run("detect --w 0", "1\n2\n3\n").status, 1);
}

TEST(Cli, DetectMalformedLineExitsTwo) {
  EXPECT_EQ(run("detect --w 1", "1\n2\nthree\n4\n").status, 2);
}

TEST(Cli, DetectCsv) {
  const Result r = run("detect --w 2", "1\n2\n3\n100\n5\n6\n7\n");
  ASSERT_EQ(r.status, 0);
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 1u + 3u);  // header + one verdict per full window
  EXPECT_EQ(l[0], "index,value,median,qn,score,is_outlier");
  EXPECT_EQ(l[1].substr(0, 4), "3,3,");
  EXPECT_EQ(l[2].substr(0, 6), "4,100,");
  EXPECT_EQ(l[2].back(), '1');
}

TEST(Cli, DetectConstantStreamHasNoOutliers) {
  const Result r = run("detect --w 5 --outliers-only", repeat_line("4.25", 200));
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(lines(r.out).size(), 1u);  // header only
}

TEST(Cli, DetectJsonl) {
  const Result r = run("detect --w 3 --format jsonl", "1\n\n2\n3\n40\n5\n6\n7\n8\n");
  ASSERT_EQ(r.status, 0);
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 2u);
  const auto first = nlohmann::json::parse(l[0]);
  EXPECT_EQ(first["index"], 4);
  EXPECT_EQ(first["value"], 40.0);
  EXPECT_EQ(first["median"], 5.0);
  EXPECT_EQ(first["is_outlier"], true);
  const auto second = nlohmann::json::parse(l[1]);
  EXPECT_EQ(second["index"], 5);
  EXPECT_TRUE(second["is_outlier"].is_boolean());
  EXPECT_DOUBLE_EQ(second["score"].get<double>(),
                   std::abs(second["value"].get<double>() - second["median"].get<double>()));
}

TEST(Cli, DetectSkipsNonFiniteValues) {
  const Result r = run("detect --w 1", "1\nnan\n2\ninf\n3\n");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(lines(r.out).size(), 2u);
}

TEST(Cli, GenIsDeterministic) {
  const Result a = run("gen --dist gamma --n 100 --seed 4");
  const Result b = run("gen --dist gamma --n 100 --seed 4");
  const Result c = run("gen --dist gamma --n 100 --seed 5");
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(lines(a.out).size(), 100u);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, GenParams) {
  const Result r = run("gen --dist uniform --n 500 --param min=2 --param max=3");
  ASSERT_EQ(r.status, 0);
  for (const auto& line : lines(r.out)) {
    const double v = std::stod(line);
    EXPECT_GE(v, 2.0);
    EXPECT_LE(v, 3.0);
  }
  EXPECT_EQ(run("gen --dist uniform --n 5 --param bogus=1").status, 1);
  EXPECT_EQ(run("gen --dist cauchy --n 5").status, 1);
}

TEST(Cli, GenFeedsDetect) {
  const std::string input = ::testing::TempDir() + "cli_test_gen.txt";
  ASSERT_EQ(run("gen --dist normal --n 300 --seed 2 --output " + input).status, 0);
  const Result r = run("detect --w 10 --input " + input);
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(lines(r.out).size(), 1u + 300u - 20u);
}

TEST(Cli, Bench) {
  const Result r = run("bench --dist normal,poisson --w 3 --tested-items 100 --runs 2 --quiet");
  ASSERT_EQ(r.status, 0);
  const auto l = lines(r.out);
  std::size_t rows = 0, aggregates = 0;
  bool in_aggregates = false;
  for (const auto& line : l) {
    if (line.empty() || line[0] == '#') continue;
    if (line == "distribution,w,run,updates_per_sec") continue;
    if (line == "distribution,w,mean,ci95") {
      in_aggregates = true;
      continue;
    }
    (in_aggregates ? aggregates : rows)++;
  }
  EXPECT_EQ(rows, 4u);
  EXPECT_EQ(aggregates, 2u);
  EXPECT_EQ(run("bench --runs 0 --w 3 --tested-items 10 --quiet").status, 1);
  EXPECT_EQ(run("bench --algorithm slow").status, 1);
}

TEST(Cli, NoSubcommandIsUsageError) {
  EXPECT_EQ(run("").status, 1);
  EXPECT_EQ(run("--version").status, 0);
}
