#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ocrhmm/log.hpp"
#include "ocrhmm/pipeline.hpp"
#include "synthetic.hpp"

using namespace ocrhmm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ocrhmm_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path synthetic_file(const fs::path& dir) {
  const Dataset d = test_support::synthetic_dataset();
  std::ofstream out(dir / "letters.data");
  write_dataset(out, d.glyphs);
  return dir / "letters.data";
}

std::vector<std::string> config_error_keys(const nlohmann::json& doc) {
  try {
    config_from_json(doc);
  } catch (const ConfigError& e) {
    return e.keys();
  }
  return {};
}

}  // namespace

TEST(ConfigFromJson, ReadsEveryKnownKey) {
  const auto doc = nlohmann::json::parse(R"({
    "data": "x.gz", "seed": 5, "ratios": [0.5, 0.25, 0.25],
    "classifiers": ["pw", "knn"], "features": ["f", "a"], "modes": [2],
    "out": "o", "parallel_cells": true, "timings": false, "artifacts": true, "standardize": true,
    "knn": {"max_k": 9, "patience": 2},
    "parzen": {"h_lo": 0.1, "h_hi": 3, "relative_width": 0.02, "max_iterations": 7, "kernel": "hypercube"},
    "nb": {"bandwidth_floor": 0.01},
    "nn": {"hidden_nodes": {"a": 5}, "sigma": 1e-4, "lambda": 1e-6, "max_epochs": 10, "patience": 3,
           "min_gradient": 1e-7, "goal": 0.001, "seed": 4},
    "hmm": {"smoothing_alpha": 0.5, "end_model": "conditional"}
  })");
  const RunConfig c = config_from_json(doc);
  EXPECT_EQ(c.data, "x.gz");
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.ratios.train, 0.5);
  EXPECT_EQ(c.classifiers, (std::vector{ClassifierKind::pw, ClassifierKind::knn}));
  EXPECT_EQ(c.features, (std::vector{FeatureSet::f, FeatureSet::a}));
  EXPECT_EQ(c.modes, std::vector<int>{2});
  EXPECT_TRUE(c.parallel_cells && !c.timings && c.artifacts && c.cell.standardize);
  EXPECT_EQ(c.cell.knn.max_k, 9);
  EXPECT_EQ(c.cell.parzen.h_hi, 3.0);
  EXPECT_EQ(c.cell.parzen.kernel, ParzenKernel::hypercube);
  EXPECT_EQ(c.cell.naive_bayes.bandwidth_floor, 0.01);
  EXPECT_EQ(c.cell.hidden_nodes.at(FeatureSet::a), 5u);
  EXPECT_EQ(c.cell.neural.scg.max_epochs, 10);
  EXPECT_EQ(c.cell.neural.seed, 4u);
  EXPECT_EQ(c.hmm.end_model, EndModel::conditional);
  validate_run_config(c);

  // and back again
  const RunConfig again = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
}

TEST(ConfigFromJson, ReportsAllBadKeysAtOnce) {
  const auto keys = config_error_keys(nlohmann::json::parse(
      R"({"seed": "one", "colour": 1, "knn": {"max_k": 3, "typo": 1}, "hmm": {"end_model": "x"}})"));
  EXPECT_EQ(keys, (std::vector<std::string>{"seed", "knn.typo", "hmm.end_model", "colour"}));
  EXPECT_EQ(config_error_keys(nlohmann::json::parse("[1]")), std::vector<std::string>{"<root>"});
  EXPECT_TRUE(config_error_keys(nlohmann::json::object()).empty());
}

TEST(ValidateRunConfig, FlagsOutOfRangeValues) {
  RunConfig c;
  c.ratios = {0.5, 0.5, 0.5};
  c.modes = {4};
  c.cell.knn.max_k = 0;
  c.cell.parzen.h_lo = 2.0;
  c.cell.parzen.h_hi = 1.0;
  try {
    validate_run_config(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.keys(), (std::vector<std::string>{"ratios", "modes", "knn.max_k", "parzen.h_lo"}));
  }
  validate_run_config(RunConfig{});
}

TEST(ListParsers, AcceptAndReject) {
  const SplitRatios r = parse_ratios("0.6, 0.2,0.2");
  EXPECT_EQ(r.train, 0.6);
  EXPECT_THROW(parse_ratios("0.5,0.5"), ConfigError);
  EXPECT_THROW(parse_ratios("a,b,c"), ConfigError);
  EXPECT_THROW(parse_ratios("0.5x,0.25,0.25"), ConfigError);
  EXPECT_EQ(parse_classifier_list("knn,nb"), (std::vector{ClassifierKind::knn, ClassifierKind::nb}));
  EXPECT_THROW(parse_classifier_list("knn,svm"), ConfigError);
  EXPECT_EQ(parse_feature_list("h"), std::vector{FeatureSet::h});
  EXPECT_THROW(parse_feature_list("z"), ConfigError);
  EXPECT_EQ(parse_mode_list("1,3"), (std::vector<int>{1, 3}));
  EXPECT_THROW(parse_mode_list("0"), ConfigError);
}

TEST(ResolveDataPath, ExplicitThenEnvironmentThenDefault) {
  RunConfig c;
  c.data = "given.gz";
  EXPECT_EQ(resolve_data_path(c), "given.gz");
  c.data.clear();
  ::setenv(kDataEnvVar, "from_env.gz", 1);
  EXPECT_EQ(resolve_data_path(c), "from_env.gz");
  ::unsetenv(kDataEnvVar);
  EXPECT_EQ(resolve_data_path(c), "data/letter.data.gz");
}

TEST(Run, MissingDatasetExitsWithTwo) {
  const fs::path dir = scratch("missing");
  RunConfig c;
  c.data = dir / "nope.gz";
  c.out = dir / "out";
  const auto quiet = log::set_sink(nullptr);
  const RunOutcome o = run(c);
  log::set_sink(quiet);
  EXPECT_EQ(o.exit_code, kExitMissingData);
  EXPECT_FALSE(fs::exists(dir / "out" / "report.csv"));
}

TEST(Run, WritesReportsAndIsRepeatable) {
  const fs::path dir = scratch("run");
  RunConfig c;
  c.data = synthetic_file(dir);
  c.classifiers = {ClassifierKind::knn, ClassifierKind::nb};
  c.features = {FeatureSet::a, FeatureSet::f};
  c.timings = false;
  c.artifacts = true;
  c.out = dir / "first";
  const RunOutcome first = run(c);
  EXPECT_EQ(first.exit_code, kExitOk);
  EXPECT_TRUE(first.failed_cells.empty());
  ASSERT_EQ(first.report.cells.size(), 4u);

  const std::string csv = slurp(dir / "first" / "report.csv");
  int lines = 0;
  for (char ch : csv) lines += ch == '\n';
  EXPECT_EQ(lines, 1 + 4 + 3);  // header, cells, knn / nb / total averages
  for (const char* name : {"report.md", "archive.json", "manifest.json", "artifacts/knn_a_model.json",
                           "artifacts/nb_f_emissions.csv", "artifacts/knn_f_decode.csv"}) {
    EXPECT_TRUE(fs::exists(dir / "first" / name)) << name;
  }
  const auto manifest = nlohmann::json::parse(slurp(dir / "first" / "manifest.json"));
  EXPECT_EQ(manifest["dataset"]["glyphs"], test_support::synthetic_dataset().glyphs.size());
  const auto archive = nlohmann::json::parse(slurp(dir / "first" / "archive.json"));
  EXPECT_EQ(render_report(report_from_json(archive), ReportFormat::csv, {.timings = false}), csv);

  c.out = dir / "second";
  c.artifacts = false;
  run(c);
  EXPECT_EQ(slurp(dir / "second" / "report.csv"), csv);
  EXPECT_EQ(slurp(dir / "second" / "report.md"), slurp(dir / "first" / "report.md"));

  c.out = dir / "parallel";
  c.parallel_cells = true;
  run(c);
  EXPECT_EQ(slurp(dir / "parallel" / "report.csv"), csv);
}
