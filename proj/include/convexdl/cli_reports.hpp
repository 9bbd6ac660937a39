#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace convexdl {

using Json = nlohmann::json;

// Bad config or instance file; `errors` lists one "json/path: problem" entry per violation.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(std::vector<std::string> errors);
  std::vector<std::string> errors;
};

const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);

struct Budgets {
  int enumeration_bits = 18;   // uniformization / steinberg oracle size
  int instances = 20;          // seeded instances per (type, sigma, field) cell
  int round_trips = 500;       // invert_steinberg targets per instance
  int lang_samples = 1000;     // samples per orbit profile
  int howe_data = 50;          // random Howe data per type
  int howe_max_depth = 3;
  int standard_max_rank = 3;
  std::uint64_t group_elements = 20'000'000;
  std::string affine_bound = "3";
};

struct TypeEntry {
  Json cartan;  // code string or {"cartan_matrix": [[...]]}
  std::optional<std::vector<std::vector<int>>> sigmas;  // absent: every diagram automorphism
};

struct ScanConfig {
  std::vector<TypeEntry> types;
  std::vector<std::string> suites;
  std::vector<std::pair<int, int>> field_grid;  // (q, m)
  Budgets budgets;
  std::uint64_t seed = 0;
  Json group_models = Json::array();
  std::string output;  // empty: no file
  std::string csv;     // optional count table for the group suite
  Json echo;           // config as read
};

// Throws UsageError naming the offending keys.
ScanConfig parse_scan_config(const Json& j);

// Per-instance seed from the run seed, suite name and instance index.
std::uint64_t instance_seed(std::uint64_t seed, const std::string& suite, std::uint64_t index);

struct Outcome {
  bool pass = false;
  bool refused = false;  // budget refusal: counted, not a failure
  Json observed;
};

// Re-runs one serialized instance. Throws UsageError for schema violations.
Outcome run_instance(const std::string& suite, const Json& instance);

struct ScanOptions {
  int jobs = 1;
  std::string instances_dir;  // when set, every instance is written there as a replay file
};

struct ScanResult {
  Json report;  // canonical: sorted keys, timings only under "timing"
  bool all_pass = false;
  std::string summary;
};

ScanResult cmd_scan(const ScanConfig& config, const ScanOptions& options);

// Replay file: {"suite": ..., "instance": {...}, "expected": {...}}.
struct VerifyResult {
  int status = 1;  // 0 iff the observation matches "expected" and passes
  Json observed;
  std::vector<std::string> diff;  // "/path: expected A, got B"
};

VerifyResult cmd_verify(const std::string& suite, const Json& replay);

std::vector<std::string> json_diff(const Json& expected, const Json& actual, const std::string& path = "");

// Writes via a temporary sibling and rename.
void write_atomic(const std::string& path, const std::string& contents);

int default_jobs();  // CONVEXDL_JOBS, else 1

}  // namespace convexdl
