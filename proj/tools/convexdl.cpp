#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "convexdl/cli_reports.hpp"

namespace {

constexpr int kUsage = 2;

convexdl::Json load_json(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw convexdl::UsageError({std::string(what) + ": cannot open " + path});
  try {
    return convexdl::Json::parse(in);
  } catch (const convexdl::Json::parse_error& e) {
    throw convexdl::UsageError({std::string(what) + ": " + path + ": " + e.what()});
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex twisted Weyl elements: scans and replayable verification suites"};
  app.require_subcommand(1);

  std::string config_path, out_path, instances_dir;
  int jobs = convexdl::default_jobs();
  auto* scan = app.add_subcommand("scan", "run the suites selected by a config file");
  scan->add_option("--config", config_path, "scan config (JSON)")->required();
  scan->add_option("--jobs", jobs, "worker threads (default from CONVEXDL_JOBS, else 1)")->check(CLI::Range(1, 1024));
  scan->add_option("--out", out_path, "report path; overrides the config's \"output\"");
  scan->add_option("--instances-dir", instances_dir, "also write every instance as a replay file here");

  std::string suite, instance_path;
  auto* verify = app.add_subcommand("verify", "replay one serialized instance");
  verify->add_option("--suite", suite, "suite name")->required();
  verify->add_option("--instance", instance_path, "replay file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*scan) {
      auto config = convexdl::parse_scan_config(load_json(config_path, "config"));
      if (!out_path.empty()) config.output = out_path;
      const auto result = convexdl::cmd_scan(config, {jobs, instances_dir});
      std::cout << result.summary;
      if (!config.output.empty()) std::cout << "report: " << config.output << '\n';
      return result.all_pass ? 0 : 1;
    }
    if (!convexdl::is_suite(suite)) throw convexdl::UsageError({"--suite: unknown suite \"" + suite + "\""});
    const auto result = convexdl::cmd_verify(suite, load_json(instance_path, "instance"));
    std::cout << "observed: " << result.observed.dump() << '\n';
    for (const auto& d : result.diff) std::cout << "diff " << d << '\n';
    std::cout << (result.status == 0 ? "verified" : "MISMATCH OR FAILURE") << '\n';
    return result.status;
  } catch (const convexdl::UsageError& e) {
    for (const auto& line : e.errors) std::cerr << "usage error: " << line << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
