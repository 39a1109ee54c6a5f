#include "ocrhmm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "ocrhmm/log.hpp"
#include "ocrhmm/model_io.hpp"

namespace ocrhmm {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : ", ") + p;
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const char* end_model_name(EndModel m) { return m == EndModel::marginal ? "marginal" : "conditional"; }

// Reads known keys from one JSON object, collecting the names of bad or
// unknown entries instead of stopping at the first.
class Reader {
 public:
  Reader(const json& obj, std::string prefix, std::vector<std::string>& bad)
      : obj_(obj), prefix_(std::move(prefix)), bad_(bad) {
    if (!obj_.is_object()) bad_.push_back(prefix_.empty() ? "<root>" : prefix_);
  }
  ~Reader() {
    if (!obj_.is_object()) return;
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) bad_.push_back(name(key));
    }
  }

  template <class T, class F>
  void get(const std::string& key, F&& assign) {
    seen_.insert(key);
    if (!obj_.is_object() || !obj_.contains(key)) return;
    try {
      assign(obj_.at(key).get<T>());
    } catch (const std::exception&) {
      bad_.push_back(name(key));
    }
  }

  template <class T>
  void get(const std::string& key, T& target) {
    get<T>(key, [&](T v) { target = std::move(v); });
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    return obj_.is_object() && obj_.contains(key) ? &obj_.at(key) : nullptr;
  }

  std::string name(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

 private:
  const json& obj_;
  std::string prefix_;
  std::vector<std::string>& bad_;
  std::set<std::string> seen_;
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> keys)
    : Error("invalid configuration: " + join(keys)), keys_(std::move(keys)) {}

SplitRatios parse_ratios(const std::string& text, const std::string& key) {
  const auto parts = split_list(text);
  if (parts.size() != 3) throw ConfigError({key});
  std::array<double, 3> v{};
  for (std::size_t i = 0; i < 3; ++i) {
    try {
      std::size_t used = 0;
      v[i] = std::stod(parts[i], &used);
      if (used != parts[i].size()) throw ConfigError({key});
    } catch (const std::logic_error&) {
      throw ConfigError({key});
    }
  }
  return {v[0], v[1], v[2]};
}

std::vector<ClassifierKind> parse_classifier_list(const std::string& text) {
  std::vector<ClassifierKind> out;
  for (const auto& t : split_list(text)) {
    try {
      out.push_back(parse_classifier(t));
    } catch (const ArgumentError&) {
      throw ConfigError({"classifiers"});
    }
  }
  return out;
}

std::vector<FeatureSet> parse_feature_list(const std::string& text) {
  std::vector<FeatureSet> out;
  for (const auto& t : split_list(text)) {
    try {
      out.push_back(parse_feature_set(t));
    } catch (const ArgumentError&) {
      throw ConfigError({"features"});
    }
  }
  return out;
}

std::vector<int> parse_mode_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& t : split_list(text)) {
    if (t.size() != 1 || t[0] < '1' || t[0] > '3') throw ConfigError({"modes"});
    out.push_back(t[0] - '0');
  }
  return out;
}

RunConfig config_from_json(const json& doc, RunConfig c) {
  std::vector<std::string> bad;
  {
    Reader r(doc, "", bad);
    r.get<std::string>("data", [&](std::string v) { c.data = v; });
    r.get("seed", c.seed);
    r.get<std::vector<double>>("ratios", [&](std::vector<double> v) {
      if (v.size() != 3) throw ArgumentError("ratios");
      c.ratios = {v[0], v[1], v[2]};
    });
    r.get<std::vector<std::string>>("classifiers", [&](std::vector<std::string> v) {
      c.classifiers.clear();
      for (const auto& t : v) c.classifiers.push_back(parse_classifier(t));
    });
    r.get<std::vector<std::string>>("features", [&](std::vector<std::string> v) {
      c.features.clear();
      for (const auto& t : v) c.features.push_back(parse_feature_set(t));
    });
    r.get("modes", c.modes);
    r.get<std::string>("out", [&](std::string v) { c.out = v; });
    r.get("parallel_cells", c.parallel_cells);
    r.get("timings", c.timings);
    r.get("artifacts", c.artifacts);
    r.get("standardize", c.cell.standardize);

    if (const json* j = r.child("knn")) {
      Reader k(*j, "knn", bad);
      k.get("max_k", c.cell.knn.max_k);
      k.get("patience", c.cell.knn.patience);
    }
    if (const json* j = r.child("parzen")) {
      Reader p(*j, "parzen", bad);
      auto& pc = c.cell.parzen;
      p.get<json>("h_lo", [&](json v) {
        pc.h_lo = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
      });
      p.get<json>("h_hi", [&](json v) {
        pc.h_hi = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
      });
      p.get("relative_width", pc.relative_width);
      p.get("max_iterations", pc.max_iterations);
      p.get<std::string>("kernel", [&](std::string v) {
        if (v == "gaussian") pc.kernel = ParzenKernel::gaussian;
        else if (v == "hypercube") pc.kernel = ParzenKernel::hypercube;
        else throw ArgumentError("kernel");
      });
    }
    if (const json* j = r.child("nb")) {
      Reader n(*j, "nb", bad);
      n.get("bandwidth_floor", c.cell.naive_bayes.bandwidth_floor);
    }
    if (const json* j = r.child("nn")) {
      Reader n(*j, "nn", bad);
      auto& scg = c.cell.neural.scg;
      n.get<std::map<std::string, std::size_t>>("hidden_nodes", [&](auto v) {
        for (const auto& [tag, nodes] : v) c.cell.hidden_nodes[parse_feature_set(tag)] = nodes;
      });
      n.get("sigma", scg.sigma);
      n.get("lambda", scg.lambda);
      n.get("max_epochs", scg.max_epochs);
      n.get("patience", scg.patience);
      n.get("min_gradient", scg.min_gradient);
      n.get("goal", scg.goal);
      n.get("seed", c.cell.neural.seed);
    }
    if (const json* j = r.child("hmm")) {
      Reader h(*j, "hmm", bad);
      h.get("smoothing_alpha", c.hmm.smoothing_alpha);
      h.get<std::string>("end_model", [&](std::string v) {
        if (v == "marginal") c.hmm.end_model = EndModel::marginal;
        else if (v == "conditional") c.hmm.end_model = EndModel::conditional;
        else throw ArgumentError("end_model");
      });
    }
  }
  if (!bad.empty()) throw ConfigError(bad);
  return c;
}

RunConfig load_run_config(const fs::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"config (cannot open " + path.string() + ")"});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({"config (" + std::string(e.what()) + ")"});
  }
  return config_from_json(doc, std::move(base));
}

json config_to_json(const RunConfig& c) {
  json classifiers = json::array();
  for (auto k : c.classifiers) classifiers.push_back(classifier_tag(k));
  json features = json::array();
  for (auto f : c.features) features.push_back(std::string(1, feature_set_tag(f)));
  json hidden = json::object();
  for (FeatureSet f : kAllFeatureSets) {
    const auto it = c.cell.hidden_nodes.find(f);
    hidden[std::string(1, feature_set_tag(f))] =
        it != c.cell.hidden_nodes.end() ? it->second : default_hidden_nodes(f);
  }
  const auto& pc = c.cell.parzen;
  const auto& scg = c.cell.neural.scg;
  return json{
      {"data", c.data.string()},
      {"seed", c.seed},
      {"ratios", {c.ratios.train, c.ratios.validation, c.ratios.test}},
      {"classifiers", classifiers},
      {"features", features},
      {"modes", c.modes},
      {"out", c.out.string()},
      {"parallel_cells", c.parallel_cells},
      {"timings", c.timings},
      {"artifacts", c.artifacts},
      {"standardize", c.cell.standardize},
      {"knn", {{"max_k", c.cell.knn.max_k}, {"patience", c.cell.knn.patience}}},
      {"parzen",
       {{"h_lo", pc.h_lo ? json(*pc.h_lo) : json(nullptr)},
        {"h_hi", pc.h_hi ? json(*pc.h_hi) : json(nullptr)},
        {"relative_width", pc.relative_width},
        {"max_iterations", pc.max_iterations},
        {"kernel", pc.kernel == ParzenKernel::gaussian ? "gaussian" : "hypercube"}}},
      {"nb", {{"bandwidth_floor", c.cell.naive_bayes.bandwidth_floor}}},
      {"nn",
       {{"hidden_nodes", hidden},
        {"sigma", scg.sigma},
        {"lambda", scg.lambda},
        {"max_epochs", scg.max_epochs},
        {"patience", scg.patience},
        {"min_gradient", scg.min_gradient},
        {"goal", scg.goal},
        {"seed", c.cell.neural.seed}}},
      {"hmm", {{"smoothing_alpha", c.hmm.smoothing_alpha}, {"end_model", end_model_name(c.hmm.end_model)}}}};
}

void validate_run_config(const RunConfig& c) {
  std::vector<std::string> bad;
  const auto& r = c.ratios;
  if (r.train < 0 || r.validation < 0 || r.test < 0 ||
      std::abs(r.train + r.validation + r.test - 1.0) > 1e-9) {
    bad.push_back("ratios");
  }
  if (c.classifiers.empty()) bad.push_back("classifiers");
  if (c.features.empty()) bad.push_back("features");
  if (c.modes.empty() ||
      std::any_of(c.modes.begin(), c.modes.end(), [](int m) { return m < 1 || m > 3; })) {
    bad.push_back("modes");
  }
  if (c.cell.knn.max_k < 1) bad.push_back("knn.max_k");
  if (c.cell.knn.patience < 1) bad.push_back("knn.patience");
  const auto& pc = c.cell.parzen;
  if (pc.h_lo && !(*pc.h_lo > 0)) bad.push_back("parzen.h_lo");
  if (pc.h_hi && !(*pc.h_hi > 0)) bad.push_back("parzen.h_hi");
  if (pc.h_lo && pc.h_hi && !(*pc.h_lo < *pc.h_hi)) bad.push_back("parzen.h_lo");
  if (!(pc.relative_width > 0)) bad.push_back("parzen.relative_width");
  if (pc.max_iterations < 0) bad.push_back("parzen.max_iterations");
  if (!(c.cell.naive_bayes.bandwidth_floor > 0)) bad.push_back("nb.bandwidth_floor");
  for (const auto& [set, nodes] : c.cell.hidden_nodes) {
    if (nodes < 1) bad.push_back(std::string("nn.hidden_nodes.") + feature_set_tag(set));
  }
  const auto& scg = c.cell.neural.scg;
  if (!(scg.sigma > 0)) bad.push_back("nn.sigma");
  if (!(scg.lambda > 0)) bad.push_back("nn.lambda");
  if (scg.max_epochs < 1) bad.push_back("nn.max_epochs");
  if (scg.patience < 1) bad.push_back("nn.patience");
  if (!(c.hmm.smoothing_alpha >= 0)) bad.push_back("hmm.smoothing_alpha");
  if (c.out.empty()) bad.push_back("out");
  if (!bad.empty()) throw ConfigError(bad);
}

fs::path resolve_data_path(const RunConfig& config) {
  if (!config.data.empty()) return config.data;
  if (const char* env = std::getenv(kDataEnvVar); env && *env) return env;
  return "data/letter.data.gz";
}

std::string missing_data_message(const fs::path& path) {
  return "dataset not found: " + path.string() +
         "\nThe letter file (letter.data or letter.data.gz, tab-separated OCR letters from the "
         "Stanford 'OCR dataset' page, http://ai.stanford.edu/~btaskar/ocr/) is required.\n"
         "Pass --data PATH or set " + std::string(kDataEnvVar) +
         ". tools/make_letter_data.py can rebuild it from the pystruct wheel.";
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string artifact_stem(const CellResult& c) {
  return std::string(classifier_tag(c.classifier)) + "_" + feature_set_tag(c.features);
}

void dump_artifacts(const fs::path& dir, const Experiment& experiment, const CellResult& cell,
                    const CellArtifacts& a) {
  fs::create_directories(dir);
  const std::string stem = artifact_stem(cell);
  write_text(dir / (stem + "_model.json"), a.model.dump());
  {
    std::ofstream out(dir / (stem + "_emissions.csv"));
    write_emission_csv(out, a.emissions);
  }
  std::ofstream out(dir / (stem + "_decode.csv"));
  const auto truth = experiment.labels(Group::test);
  for (int mode = 1; mode <= 3; ++mode) {
    const auto& decoded = a.decoded[static_cast<std::size_t>(mode - 1)];
    if (decoded.empty()) continue;
    std::ostringstream block;
    write_decode_csv(block, experiment.test_words(), truth, a.base_prediction, decoded,
                     static_cast<DecodeMode>(mode));
    std::string text = block.str();
    if (out.tellp() > 0) text.erase(0, text.find('\n') + 1);  // one header per file
    out << text;
  }
}

}  // namespace

RunOutcome run(const RunConfig& config) {
  validate_run_config(config);
  const fs::path data_path = resolve_data_path(config);
  RunOutcome outcome;
  if (!fs::exists(data_path)) {
    log::error(missing_data_message(data_path));
    outcome.exit_code = kExitMissingData;
    return outcome;
  }

  const Dataset dataset = load_dataset(data_path);
  log::info("loaded " + std::to_string(dataset.glyphs.size()) + " glyphs, " +
            std::to_string(dataset.words.size()) + " words");
  SplitAssignment split = split_dataset(dataset.words, config.ratios, config.seed);
  const Experiment experiment(dataset, split, config.hmm);

  CellConfig cell_config = config.cell;
  cell_config.modes = {false, false, false};
  for (int m : config.modes) cell_config.modes[static_cast<std::size_t>(m - 1)] = true;

  struct Job {
    ClassifierKind kind;
    FeatureSet set;
  };
  std::vector<Job> jobs;
  for (ClassifierKind k : config.classifiers) {
    for (FeatureSet f : config.features) jobs.push_back({k, f});
  }

  const fs::path artifact_dir = config.out / "artifacts";
  fs::create_directories(config.out);
  auto run_job = [&](const Job& job) {
    CellArtifacts artifacts;
    CellResult r;
    try {
      r = run_cell(experiment, job.kind, job.set, cell_config,
                   config.artifacts ? &artifacts : nullptr);
      if (config.artifacts) dump_artifacts(artifact_dir, experiment, r, artifacts);
    } catch (const std::exception& e) {
      r.classifier = job.kind;
      r.features = job.set;
      r.reference_cell = is_reference_cell(job.kind, job.set);
      r.error = e.what();
      log::error(e.what());
    }
    return r;
  };

  EvalReport& report = outcome.report;
  report.seed = config.seed;
  report.ratios = config.ratios;
  report.timings_reliable = !config.parallel_cells;
  if (config.parallel_cells) {
    std::vector<std::future<CellResult>> futures;
    for (const Job& job : jobs) futures.push_back(std::async(std::launch::async, run_job, job));
    for (auto& f : futures) report.cells.push_back(f.get());
  } else {
    for (const Job& job : jobs) report.cells.push_back(run_job(job));
  }

  for (const CellResult& c : report.cells) {
    if (c.error) outcome.failed_cells.push_back(artifact_stem(c));
  }

  const RenderOptions render{.timings = config.timings};
  write_text(config.out / "report.csv", render_report(report, ReportFormat::csv, render));
  write_text(config.out / "report.md", render_report(report, ReportFormat::markdown, render));

  json archive = report_to_json(report);
  archive["hmm"] = hmm_to_json(experiment.hmm());
  write_text(config.out / "archive.json", archive.dump(1));

  json manifest{{"format", "ocrhmm-manifest"},
                {"version", 1},
                {"dataset", {{"path", data_path.string()},
                             {"glyphs", dataset.glyphs.size()},
                             {"words", dataset.words.size()}}},
                {"config", config_to_json(config)},
                {"split", split_to_json(split)},
                {"outputs", {"report.csv", "report.md", "archive.json"}},
                {"failed_cells", outcome.failed_cells}};
  if (config.artifacts) manifest["outputs"].push_back("artifacts/");
  write_text(config.out / "manifest.json", manifest.dump(1));

  if (!outcome.failed_cells.empty()) {
    log::error("failed cells: " + join(outcome.failed_cells));
    outcome.exit_code = kExitCellFailure;
  }
  return outcome;
}

}  // namespace ocrhmm
