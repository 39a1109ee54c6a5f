#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ocrhmm/eval.hpp"

namespace ocrhmm {

/// Environment variable that overrides the dataset path when no explicit
/// path is configured.
inline constexpr const char* kDataEnvVar = "OCRHMM_DATA";

struct RunConfig {
  std::filesystem::path data;  ///< empty: $OCRHMM_DATA, then data/letter.data.gz
  std::uint64_t seed = 1;
  SplitRatios ratios;
  std::vector<ClassifierKind> classifiers{kAllClassifiers.begin(), kAllClassifiers.end()};
  std::vector<FeatureSet> features{kAllFeatureSets.begin(), kAllFeatureSets.end()};
  std::vector<int> modes{1, 2, 3};
  CellConfig cell;
  HmmEstimationConfig hmm;
  std::filesystem::path out = "ocrhmm-out";
  bool parallel_cells = false;
  bool timings = true;    ///< false writes "-" in the time columns
  bool artifacts = false;  ///< dump models, emissions and decodes per cell
};

/// Raised for invalid configuration; `keys` names every offending entry.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> keys);
  const std::vector<std::string>& keys() const { return keys_; }

 private:
  std::vector<std::string> keys_;
};

/// Reads a JSON config over `base` (defaults when omitted). Unknown keys
/// and wrong types are reported together in one ConfigError.
RunConfig config_from_json(const nlohmann::json& doc, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});
nlohmann::json config_to_json(const RunConfig& config);

/// Checks ratios, tags, modes and hyperparameter ranges.
void validate_run_config(const RunConfig& config);

/// Explicit path, then $OCRHMM_DATA, then the bundled default.
std::filesystem::path resolve_data_path(const RunConfig& config);

/// Parses "a,b,c" style lists; throws ConfigError naming `key`.
SplitRatios parse_ratios(const std::string& text, const std::string& key = "ratios");
std::vector<ClassifierKind> parse_classifier_list(const std::string& text);
std::vector<FeatureSet> parse_feature_list(const std::string& text);
std::vector<int> parse_mode_list(const std::string& text);

struct RunOutcome {
  int exit_code = 0;
  EvalReport report;
  std::vector<std::string> failed_cells;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitCellFailure = 1;
inline constexpr int kExitMissingData = 2;
inline constexpr int kExitBadConfig = 3;

/// Split, features, every classifier x feature-set cell, HMM decoding and
/// the report files report.csv, report.md, manifest.json and archive.json
/// under config.out.
RunOutcome run(const RunConfig& config);

/// Download hint printed when the dataset is missing.
std::string missing_data_message(const std::filesystem::path& path);

}  // namespace ocrhmm
