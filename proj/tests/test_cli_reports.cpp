#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "convexdl/cli_reports.hpp"

using namespace convexdl;
namespace fs = std::filesystem;

namespace {

Json strip_timing(Json r) {
  r.erase("timing");
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("convexdl_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

bool usage_error_mentions(const Json& config, const std::string& path) {
  try {
    parse_scan_config(config);
  } catch (const UsageError& e) {
    for (const auto& line : e.errors)
      if (line.rfind(path + ":", 0) == 0) return true;
  }
  return false;
}

Json uniformization_replay() {
  const auto c = parse_scan_config(
      Json::parse(R"({"seed": 5, "types": [{"code": "A2", "sigma": [[0, 1]]}], "suites": ["uniformization"],
                      "budgets": {"instances": 4}})"));
  const auto dir = scratch("replay");
  cmd_scan(c, {1, dir.string()});
  // Pick an instance with nontrivial A so a perturbation of z is visible.
  for (int i = 0; i < 4; ++i) {
    std::ifstream in(dir / ("uniformization-" + std::to_string(i) + ".json"));
    Json j = Json::parse(in);
    if (j["instance"]["setup"]["A"].size() >= 2) return j;
  }
  return {};
}

int run_cli(const std::string& args) {
  const int rc = std::system((std::string(CONVEXDL_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Config, RejectsWithOffendingKey) {
  EXPECT_TRUE(usage_error_mentions(Json::parse(R"({"seed": 1, "types": ["A1"], "suites": ["nope"]})"), "/suites/0"));
  EXPECT_TRUE(usage_error_mentions(Json::parse(R"({"types": ["A1"], "suites": ["convexity"]})"), "/seed"));
  EXPECT_TRUE(usage_error_mentions(Json::parse(R"({"seed": 1, "types": ["Q7"], "suites": ["convexity"]})"), "/types/0"));
  EXPECT_TRUE(usage_error_mentions(
      Json::parse(R"({"seed": 1, "types": ["A1"], "suites": ["convexity"], "budgets": {"instances": 0}})"),
      "/budgets/instances"));
  EXPECT_TRUE(usage_error_mentions(
      Json::parse(R"({"seed": 1, "types": ["A1"], "suites": ["convexity"], "field_grid": [[6, 1]]})"), "/field_grid/0"));
  EXPECT_TRUE(usage_error_mentions(Json::parse(R"({"seed": 1, "suites": ["group"]})"), "/group_model"));
  EXPECT_TRUE(usage_error_mentions(Json::parse(R"({"seed": 1, "types": ["A1"], "suites": ["convexity"], "colour": 1})"),
                                   "/colour"));
  EXPECT_TRUE(usage_error_mentions(
      Json::parse(R"({"seed": 1, "types": [{"code": "A2", "sigma": [[0, 0]]}], "suites": ["convexity"]})"),
      "/types/0/sigma/0"));
}

TEST(Config, AcceptsExplicitCartanMatrix) {
  const auto c = parse_scan_config(
      Json::parse(R"({"seed": 1, "types": [{"cartan_matrix": [[2, -1], [-1, 2]]}], "suites": ["convexity"]})"));
  ASSERT_EQ(c.types.size(), 1u);
  EXPECT_TRUE(c.types[0].cartan.is_object());
}

TEST(Scan, RankOneConvexity) {
  const auto c = parse_scan_config(Json::parse(R"({"seed": 1, "types": ["A1"], "suites": ["convexity"]})"));
  const auto dir = scratch("a1");
  const auto r = cmd_scan(c, {1, dir.string()});
  EXPECT_TRUE(r.all_pass);
  std::ifstream in(dir / "convexity-0.json");
  const Json j = Json::parse(in);
  EXPECT_EQ(j["expected"]["classes"], 2);
  EXPECT_EQ(j["expected"]["elliptic_classes"], 1);
  EXPECT_EQ(j["expected"]["convex_counts"], Json::array({1}));
}

TEST(Scan, UniformizationFiftyInstances) {
  const auto c = parse_scan_config(Json::parse(
      R"({"seed": 2, "types": [{"code": "A2", "sigma": [[0, 1]]}], "suites": ["uniformization"],
          "field_grid": [[2, 1]], "budgets": {"instances": 50}})"));
  const auto r = cmd_scan(c, {1, ""});
  EXPECT_TRUE(r.all_pass);
  EXPECT_EQ(r.report["suites"]["uniformization"]["pass"], 50);
  EXPECT_EQ(r.report["suites"]["uniformization"]["fail"], 0);
}

TEST(Scan, GroupCrossSectionSL3) {
  const auto c = parse_scan_config(Json::parse(R"({"seed": 3, "suites": ["group"], "group_model": {"n": 3, "q": 2}})"));
  const auto r = cmd_scan(c, {1, ""});
  EXPECT_TRUE(r.all_pass);
  EXPECT_GT(r.report["suites"]["group"]["pass"].get<int>(), 0);
}

TEST(Scan, DeterministicAcrossJobCounts) {
  const Json cfg = Json::parse(
      R"({"seed": 99, "types": ["A2", "B2"], "suites": ["convexity", "uniformization", "steinberg", "affine", "howe", "lang_orbit"],
          "field_grid": [[2, 1], [3, 1]],
          "budgets": {"instances": 2, "howe_data": 3, "lang_samples": 20, "round_trips": 10}})");
  const auto c = parse_scan_config(cfg);
  const auto a = cmd_scan(c, {1, ""});
  const auto b = cmd_scan(c, {3, ""});
  EXPECT_TRUE(a.all_pass);
  EXPECT_EQ(strip_timing(a.report).dump(2), strip_timing(b.report).dump(2));
  EXPECT_TRUE(a.report.contains("timing"));

  Json other = cfg;
  other["seed"] = 100;
  const auto d = cmd_scan(parse_scan_config(other), {1, ""});
  EXPECT_NE(strip_timing(a.report)["config"], strip_timing(d.report)["config"]);
}

TEST(Scan, ReportWrittenAtomically) {
  const auto dir = scratch("report");
  Json cfg = Json::parse(R"({"seed": 1, "types": ["A1"], "suites": ["convexity"]})");
  cfg["output"] = (dir / "sub" / "report.json").string();
  cmd_scan(parse_scan_config(cfg), {1, ""});
  EXPECT_TRUE(fs::exists(dir / "sub" / "report.json"));
  EXPECT_FALSE(fs::exists(dir / "sub" / "report.json.tmp"));
  std::ifstream in(dir / "sub" / "report.json");
  const Json r = Json::parse(in);
  EXPECT_EQ(r["suites"]["convexity"]["pass"], 1);
}

TEST(Seeds, StableAndDistinct) {
  EXPECT_EQ(instance_seed(1, "howe", 3), instance_seed(1, "howe", 3));
  EXPECT_NE(instance_seed(1, "howe", 3), instance_seed(1, "howe", 4));
  EXPECT_NE(instance_seed(1, "howe", 3), instance_seed(1, "affine", 3));
  EXPECT_NE(instance_seed(1, "howe", 3), instance_seed(2, "howe", 3));
}

TEST(Verify, PassingReplayHasStatusZero) {
  const Json replay = uniformization_replay();
  ASSERT_FALSE(replay.is_null());
  const auto r = cmd_verify("uniformization", replay);
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(r.diff.empty());
}

TEST(Verify, PerturbedZGivesPointedDiff) {
  Json replay = uniformization_replay();
  ASSERT_FALSE(replay.is_null());
  Json& inst = replay["instance"];
  const int q = inst["field"]["q"];
  const std::string k = std::to_string(inst["setup"]["A"][0].get<int>());
  const int old = inst["z"].contains(k) ? inst["z"][k][0].get<int>() : 0;
  inst["z"][k] = Json::array({(old + 1) % q});
  const auto r = cmd_verify("uniformization", replay);
  EXPECT_EQ(r.status, 1);
  ASSERT_FALSE(r.diff.empty());
  for (const auto& d : r.diff) EXPECT_EQ(d.rfind("/w/", 0), 0u) << d;
}

TEST(Verify, TamperedExpectationFails) {
  Json replay = uniformization_replay();
  replay["expected"]["points"] = replay["expected"]["points"].get<int>() + 1;
  const auto r = cmd_verify("uniformization", replay);
  EXPECT_EQ(r.status, 1);
  ASSERT_EQ(r.diff.size(), 1u);
  EXPECT_EQ(r.diff[0].rfind("/points:", 0), 0u);
}

TEST(Verify, UnknownSuiteIsUsageError) {
  EXPECT_THROW(cmd_verify("nosuch", Json::object()), UsageError);
  EXPECT_THROW(run_instance("nosuch", Json::object()), UsageError);
}

TEST(Verify, SchemaViolationsListPaths) {
  Json replay = uniformization_replay();
  replay["instance"]["field"]["q"] = "two";
  replay["instance"]["setup"]["A"] = 7;
  replay["instance"]["extra"] = true;
  try {
    cmd_verify("uniformization", replay);
    FAIL() << "expected a usage error";
  } catch (const UsageError& e) {
    auto has = [&](const std::string& p) {
      for (const auto& line : e.errors)
        if (line.rfind(p + ":", 0) == 0) return true;
      return false;
    };
    EXPECT_TRUE(has("/instance/extra"));
    EXPECT_TRUE(has("/instance/field/q"));
  }
  Json wrong = uniformization_replay();
  wrong["instance"]["boundary"] = Json{{"0", Json::array({0, 1})}};
  EXPECT_THROW(cmd_verify("uniformization", wrong), UsageError);
}

TEST(Verify, EverySuiteRoundTrips) {
  const auto c = parse_scan_config(Json::parse(
      R"({"seed": 8, "types": ["A2"], "suites": ["convexity", "standard", "uniformization", "steinberg", "affine", "howe", "lang_orbit", "group"],
          "budgets": {"instances": 1, "howe_data": 2, "lang_samples": 10, "round_trips": 5},
          "group_model": {"n": 2, "q": 2, "point_sets": [{"r": 1, "twist": {"word": [1]}, "howe": {"simple_subsets": [[], [0]], "depths": ["1", "1"]}}]}})"));
  const auto dir = scratch("every");
  ASSERT_TRUE(cmd_scan(c, {1, dir.string()}).all_pass);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path());
    const Json replay = Json::parse(in);
    const auto r = cmd_verify(replay["suite"].get<std::string>(), replay);
    EXPECT_EQ(r.status, 0) << entry.path();
    ++files;
  }
  EXPECT_GE(files, 8);
}

TEST(Diff, ReportsPaths) {
  const auto d = json_diff(Json::parse(R"({"a": [1, 2], "b": {"c": true}})"), Json::parse(R"({"a": [1, 3], "d": 0})"));
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[0].rfind("/a/1:", 0), 0u);
  EXPECT_EQ(d[1].rfind("/b:", 0), 0u);
  EXPECT_EQ(d[2].rfind("/d:", 0), 0u);
}

TEST(Jobs, EnvironmentDefault) {
  setenv("CONVEXDL_JOBS", "3", 1);
  EXPECT_EQ(default_jobs(), 3);
  setenv("CONVEXDL_JOBS", "zero", 1);
  EXPECT_EQ(default_jobs(), 1);
  unsetenv("CONVEXDL_JOBS");
  EXPECT_EQ(default_jobs(), 1);
}

TEST(Binary, ExitCodes) {
  const auto dir = scratch("binary");
  {
    std::ofstream(dir / "ok.json") << R"({"seed": 1, "types": ["A1"], "suites": ["convexity"]})";
    std::ofstream(dir / "bad.json") << R"({"seed": 1, "types": ["A1"], "suites": ["bogus"]})";
  }
  EXPECT_EQ(run_cli("scan --config " + (dir / "ok.json").string() + " --out " + (dir / "r.json").string() +
                    " --instances-dir " + (dir / "inst").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "r.json"));
  EXPECT_EQ(run_cli("scan --config " + (dir / "bad.json").string()), 2);
  EXPECT_EQ(run_cli("verify --suite convexity --instance " + (dir / "inst" / "convexity-0.json").string()), 0);
  EXPECT_EQ(run_cli("verify --suite nosuch --instance " + (dir / "inst" / "convexity-0.json").string()), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
}
