#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rearr/cli.hpp"

using namespace rearr;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  args.insert(args.begin(), "rearr");
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kBump = "pl:-1:1,-0.5:1,-0.3:1.2,0.3:1.2,0.5:1,1:1";

}  // namespace

TEST(Cli, VerifyPlateauBump) {
  const auto r = run({"verify", "--u", kBump, "--weight", "1-abs(x)", "--F", "p^2", "--mode", "monotone"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["schema"], 1);
  const Json& rep = j["report"];
  EXPECT_TRUE(rep.contains("I_u"));
  EXPECT_TRUE(rep.contains("I_rearranged"));
  EXPECT_GE(rep["gap"].get<double>(), -1e-8);
  EXPECT_TRUE(rep["guaranteed"].get<bool>());
}

TEST(Cli, CounterexampleConfirmationIsSuccess) {
  const auto r = run({"counterexample", "nonconcavity", "--weight", "x^2", "--s", "0.4", "--t", "0.6", "--eps", "0.1",
                      "--delta", "0.1", "--alpha", "1.15"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_LT(j["report"]["gap"].get<double>(), 0.0);
  EXPECT_TRUE(j["confirmed"].get<bool>());
}

TEST(Cli, MalformedFunctionIsUsageError) {
  const auto r = run({"verify", "--u", "pl:bad"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("SyntaxError"), std::string::npos);
  EXPECT_NE(r.err.find("pl:x0:y0"), std::string::npos);
}

TEST(Cli, UnknownFlagIsUsageError) {
  EXPECT_EQ(run({"rearrange", "--u", kBump, "--bogus"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
}

TEST(Cli, DomainFailureIsExitOne) {
  const auto r = run({"counterexample", "nonconcavity", "--weight", "1-abs(x)", "--s", "0.4", "--t", "0.6", "--eps",
                      "0.1", "--delta", "0.1", "--alpha", "1.1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("PreconditionFailed"), std::string::npos);
}

TEST(Cli, CheckWeightVerdictExitCodes) {
  EXPECT_EQ(run({"check-weight", "--weight", "1-abs(x)"}).code, 0);
  const auto bad = run({"check-weight", "--weight", "abs(x)"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_FALSE(Json::parse(bad.out)["admissible"]["admissible"].get<bool>());
}

TEST(Cli, RearrangeRoundTrip) {
  const auto first = run({"rearrange", "--u", kBump});
  ASSERT_EQ(first.code, 0);
  const std::string result = Json::parse(first.out)["result"];
  EXPECT_EQ(result, "pl:-1:1,0:1,0.4:1.2,1:1.2");
  const auto second = run({"rearrange", "--u", result});
  ASSERT_EQ(second.code, 0);
  EXPECT_EQ(Json::parse(second.out)["result"], result);
}

TEST(Cli, JsonAndCsvCarrySameNumbers) {
  const std::vector<std::string> base{"verify", "--u", kBump, "--weight", "1-abs(x)", "--F", "p^1.5"};
  auto json_args = base;
  json_args.insert(json_args.end(), {"--format", "json"});
  auto csv_args = base;
  csv_args.insert(csv_args.end(), {"--format", "csv"});
  const auto js = run(json_args);
  const auto cs = run(csv_args);
  ASSERT_EQ(js.code, 0);
  ASSERT_EQ(cs.code, 0);

  std::vector<std::pair<std::string, std::string>> flat;
  flatten(Json::parse(js.out), "", flat);
  std::istringstream in(cs.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "key,value");
  std::size_t i = 0;
  while (std::getline(in, line)) {
    ASSERT_LT(i, flat.size());
    const auto comma = line.find(',');
    EXPECT_EQ(line.substr(0, comma), flat[i].first);
    if (line[comma + 1] != '"') EXPECT_EQ(line.substr(comma + 1), flat[i].second) << flat[i].first;
    ++i;
  }
  EXPECT_EQ(i, flat.size());
}

TEST(Cli, OutputFileAndPlot) {
  const std::string report = ::testing::TempDir() + "rearr_report.json";
  const std::string plot = ::testing::TempDir() + "rearr_plot.csv";
  const auto r = run({"rearrange", "--u", kBump, "--output", report, "--emit-plot", plot});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream rep(report);
  const Json j = Json::parse(rep);
  EXPECT_EQ(j["command"], "rearrange");
  std::ifstream p(plot);
  std::string header;
  std::getline(p, header);
  EXPECT_EQ(header.rfind("x,u,", 0), 0u);
  std::remove(report.c_str());
  std::remove(plot.c_str());
}

TEST(Cli, ParseEvaluates) {
  const auto r = run({"parse", "p^1.15", "--p", "2"});
  ASSERT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["tree"], "(p ^ 1.15)");
  EXPECT_DOUBLE_EQ(j["value"].get<double>(), std::pow(2.0, 1.15));
  const auto bad = run({"parse", "x^^2"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("offset 2"), std::string::npos);
}

TEST(Cli, GridWeightFromFile) {
  const std::string path = ::testing::TempDir() + "rearr_grid.csv";
  {
    std::ofstream f(path);
    f << "v,-1,0,1\n0,0,1,0\n2,0,2,0\n";
  }
  const auto r = run({"check-weight", "--weight", "grid:@" + path});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["admissible"]["method"], "exact-node");
  std::remove(path.c_str());
}

TEST(Cli, SmallSweep) {
  const auto r = run({"sweep", "--seed", "42", "--count", "5", "--threads", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["summary"]["instances"], 5);
  EXPECT_EQ(j["instances"].size(), 5u);
}
