#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "ocrhmm/dataset.hpp"
#include "ocrhmm/eval.hpp"
#include "ocrhmm/features.hpp"
#include "ocrhmm/log.hpp"
#include "ocrhmm/pipeline.hpp"

namespace fs = std::filesystem;
using namespace ocrhmm;

namespace {

void install_log_sink(int verbosity) {
  log::set_level(verbosity >= 2 ? log::Level::debug
                 : verbosity == 1 ? log::Level::info
                                  : log::Level::warning);
  log::set_sink([](log::Level level, std::string_view message) {
    static const char* const names[] = {"debug", "info", "warning", "error"};
    std::cerr << names[static_cast<int>(level)] << ": " << message << '\n';
  });
}

// Returns the dataset or exits with the missing-data status.
Dataset load_or_exit(const fs::path& configured) {
  RunConfig c;
  c.data = configured;
  const fs::path path = resolve_data_path(c);
  if (!fs::exists(path)) {
    std::cerr << missing_data_message(path) << '\n';
    std::exit(kExitMissingData);
  }
  return load_dataset(path);
}

std::ostream& output_stream(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path);
  return file;
}

int cmd_ingest(const fs::path& data, const std::string& write_path) {
  const Dataset d = load_or_exit(data);
  std::map<char, std::size_t> letters;
  for (const Glyph& g : d.glyphs) ++letters[letter_char(g.letter)];
  nlohmann::json summary{{"glyphs", d.glyphs.size()},
                         {"words", d.words.size()},
                         {"distinct_spellings", d.distinct_spellings()},
                         {"folds", d.folds()}};
  for (const auto& [c, n] : letters) summary["letters"][std::string(1, c)] = n;
  std::cout << summary.dump(1) << '\n';
  if (!write_path.empty()) {
    std::ofstream out(write_path, std::ios::binary);
    if (!out) throw Error("cannot write " + write_path);
    write_dataset(out, d.glyphs);
  }
  return kExitOk;
}

int cmd_split(const fs::path& data, std::uint64_t seed, const std::string& ratios,
              const std::string& out_path) {
  const SplitRatios r = ratios.empty() ? SplitRatios{} : parse_ratios(ratios);
  const Dataset d = load_or_exit(data);
  const SplitAssignment split = split_dataset(d.words, r, seed);
  for (Group g : kGroups) {
    log::info(std::string(group_name(g)) + ": " +
              std::to_string(split.glyph_counts[static_cast<std::size_t>(g)]) + " glyphs");
  }
  std::ofstream file;
  output_stream(out_path, file) << split_to_json(split).dump(1) << '\n';
  return kExitOk;
}

int cmd_features(const fs::path& data, const std::string& sets, const std::string& out_dir) {
  const auto list = sets.empty() ? std::vector<FeatureSet>(kAllFeatureSets.begin(), kAllFeatureSets.end())
                                 : parse_feature_list(sets);
  const Dataset d = load_or_exit(data);
  const FeatureExtractor extractor(d.glyphs);
  fs::create_directories(out_dir);
  for (FeatureSet s : list) {
    const fs::path path = fs::path(out_dir) / (std::string("features_") + feature_set_tag(s) + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    write_feature_csv(out, extractor.extract(s), d.glyphs);
    log::info("wrote " + path.string());
  }
  if (extractor.degenerate_glyphs() > 0) {
    log::warn(std::to_string(extractor.degenerate_glyphs()) + " glyphs have no active pixel");
  }
  return kExitOk;
}

int cmd_report(const std::string& archive, const std::string& format, bool timings) {
  std::ifstream in(archive);
  if (!in) throw Error("cannot open " + archive);
  const EvalReport report = report_from_json(nlohmann::json::parse(in));
  const ReportFormat f = format == "csv" ? ReportFormat::csv : ReportFormat::markdown;
  std::cout << render_report(report, f, {.timings = timings});
  return kExitOk;
}

struct RunFlags {
  std::string config, data, ratios, classifiers, features, modes, out;
  std::uint64_t seed = 0;
  bool parallel_cells = false;
  bool no_timings = false;
  bool artifacts = false;
};

int cmd_run(const RunFlags& f, const CLI::App& cmd) {
  RunConfig config;
  if (!f.config.empty()) config = load_run_config(f.config);
  if (cmd.count("--data")) config.data = f.data;
  if (cmd.count("--seed")) config.seed = f.seed;
  if (cmd.count("--ratios")) config.ratios = parse_ratios(f.ratios);
  if (cmd.count("--classifiers")) config.classifiers = parse_classifier_list(f.classifiers);
  if (cmd.count("--features")) config.features = parse_feature_list(f.features);
  if (cmd.count("--modes")) config.modes = parse_mode_list(f.modes);
  if (cmd.count("--out")) config.out = f.out;
  if (f.parallel_cells) config.parallel_cells = true;
  if (f.no_timings) config.timings = false;
  if (f.artifacts) config.artifacts = true;

  const RunOutcome outcome = run(config);
  if (outcome.exit_code == kExitOk || outcome.exit_code == kExitCellFailure) {
    std::cout << render_report(outcome.report, ReportFormat::markdown, {.timings = config.timings});
    std::cout << "\nwrote " << (config.out / "report.csv").string() << '\n';
  }
  if (!outcome.failed_cells.empty()) {
    std::cerr << "failed cells:";
    for (const auto& c : outcome.failed_cells) std::cerr << ' ' << c;
    std::cerr << '\n';
  }
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Handwritten letter recognition with HMM word correction"};
  app.require_subcommand(1);
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "More logging (repeat for debug)");

  std::string data;
  auto* ingest = app.add_subcommand("ingest", "Parse the dataset and print a summary");
  std::string ingest_write;
  ingest->add_option("--data", data, "Letter file (plain or .gz)");
  ingest->add_option("--write", ingest_write, "Re-serialize the parsed glyphs to this path");

  auto* split = app.add_subcommand("split", "Compute a word-level split and print it as JSON");
  std::uint64_t split_seed = 1;
  std::string split_ratios, split_out;
  split->add_option("--data", data, "Letter file (plain or .gz)");
  split->add_option("--seed", split_seed, "Split seed")->capture_default_str();
  split->add_option("--ratios", split_ratios, "train,validation,test (default 1/3 each)");
  split->add_option("--out", split_out, "Output file (default stdout)");

  auto* features = app.add_subcommand("features", "Write per-glyph feature CSVs");
  std::string feature_sets, feature_out = "features";
  features->add_option("--data", data, "Letter file (plain or .gz)");
  features->add_option("--features", feature_sets, "Feature sets, e.g. a,f (default all)");
  features->add_option("--out", feature_out, "Output directory")->capture_default_str();

  auto* run_cmd = app.add_subcommand("run", "Train, decode and report every requested cell");
  RunFlags rf;
  run_cmd->add_option("--config", rf.config, "JSON config; flags override it");
  run_cmd->add_option("--data", rf.data, "Letter file (plain or .gz)");
  run_cmd->add_option("--seed", rf.seed, "Split and training seed");
  run_cmd->add_option("--ratios", rf.ratios, "train,validation,test");
  run_cmd->add_option("--classifiers", rf.classifiers, "Subset of knn,nn,pw,nb");
  run_cmd->add_option("--features", rf.features, "Subset of a..h");
  run_cmd->add_option("--modes", rf.modes, "HMM modes, subset of 1,2,3");
  run_cmd->add_option("--out", rf.out, "Output directory");
  run_cmd->add_flag("--parallel-cells", rf.parallel_cells, "Run cells concurrently");
  run_cmd->add_flag("--no-timings", rf.no_timings, "Print '-' instead of times");
  run_cmd->add_flag("--artifacts", rf.artifacts, "Dump models, emissions and decodes");

  auto* report = app.add_subcommand("report", "Re-render a report from archive.json");
  std::string archive, format = "md";
  bool report_no_timings = false;
  report->add_option("archive", archive, "archive.json from a run")->required();
  report->add_option("--format", format, "csv or md")
      ->check(CLI::IsMember({"csv", "md"}))
      ->capture_default_str();
  report->add_flag("--no-timings", report_no_timings, "Print '-' instead of times");

  CLI11_PARSE(app, argc, argv);
  install_log_sink(verbosity);

  try {
    if (*ingest) return cmd_ingest(data, ingest_write);
    if (*split) return cmd_split(data, split_seed, split_ratios, split_out);
    if (*features) return cmd_features(data, feature_sets, feature_out);
    if (*run_cmd) return cmd_run(rf, *run_cmd);
    if (*report) return cmd_report(archive, format, !report_no_timings);
  } catch (const ConfigError& e) {
    std::cerr << "error: invalid configuration; offending keys:";
    for (const auto& k : e.keys()) std::cerr << ' ' << k;
    std::cerr << '\n';
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
