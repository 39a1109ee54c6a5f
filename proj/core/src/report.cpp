#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "ocrhmm/eval.hpp"

namespace ocrhmm {
namespace {

std::string fixed(double v, int decimals) {
  if (std::isnan(v)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string param_text(ClassifierKind kind, const std::optional<double>& p) {
  if (!p) return "-";
  switch (kind) {
    case ClassifierKind::knn: return fixed(*p, 0);
    case ClassifierKind::pw: return fixed(*p, 4);
    default: return fixed(*p, 2);
  }
}

std::string average_param_text(const AverageRow& row) {
  if (!row.param) return "-";
  return row.label == "pw" ? fixed(*row.param, 4) : fixed(*row.param, 2);
}

std::string display_name(const CellResult& c) {
  switch (c.classifier) {
    case ClassifierKind::knn: return "K-NN";
    case ClassifierKind::nn: return "NN (" + std::to_string(c.hidden_nodes) + ")";
    case ClassifierKind::pw: return "PW";
    case ClassifierKind::nb: return "NB";
  }
  return "?";
}

struct Row {
  std::string classifier, features;
  std::array<std::string, 8> values;  // train .. test_time
};

Row cell_row(const CellResult& c, bool markdown, const RenderOptions& opt) {
  Row r;
  r.classifier = markdown ? display_name(c) : classifier_tag(c.classifier);
  r.features = std::string(1, feature_set_tag(c.features));
  if (markdown) r.features += c.reference_cell ? ")" : ")*";
  if (c.error) {
    r.values.fill("failed");
    return r;
  }
  r.values = {fixed(c.train_accuracy, 2),
              fixed(c.test_accuracy, 2),
              fixed(c.hmm[0], 2),
              fixed(c.hmm[1], 2),
              fixed(c.hmm[2], 2),
              param_text(c.classifier, c.param),
              opt.timings ? fixed(c.train_minutes, 2) : "-",
              opt.timings ? fixed(c.test_minutes, 2) : "-"};
  return r;
}

Row average_row(const AverageRow& a, bool markdown, const RenderOptions& opt) {
  Row r;
  if (markdown) {
    r.classifier = a.label == "total" ? "**Total Average**" : "**Average (" + a.label + ")**";
  } else {
    r.classifier = a.label;
    r.features = "average";
  }
  r.values = {fixed(a.train_accuracy, 2),
              fixed(a.test_accuracy, 2),
              fixed(a.hmm[0], 2),
              fixed(a.hmm[1], 2),
              fixed(a.hmm[2], 2),
              average_param_text(a),
              opt.timings ? fixed(a.train_minutes, 2) : "-",
              opt.timings ? fixed(a.test_minutes, 2) : "-"};
  return r;
}

}  // namespace

std::string render_report(const EvalReport& report, ReportFormat format,
                          const RenderOptions& options) {
  const bool md = format == ReportFormat::markdown;
  std::ostringstream out;
  if (md) {
    out << "| Classifier | Features | Train Acc. | Test Acc. | HMM(1) | HMM(2) | HMM(3) "
           "| h/k/Ep. | Train Time | Test Time |\n"
        << "|---|---|---|---|---|---|---|---|---|---|\n";
  } else {
    out << "classifier,features,train,test,hmm1,hmm2,hmm3,param,train_time,test_time\n";
  }
  auto emit = [&](const Row& r) {
    if (md) {
      out << "| " << r.classifier << " | " << r.features;
      for (const auto& v : r.values) out << " | " << v;
      out << " |\n";
    } else {
      out << r.classifier << ',' << r.features;
      for (const auto& v : r.values) out << ',' << v;
      out << '\n';
    }
  };
  for (const CellResult& c : report.cells) emit(cell_row(c, md, options));
  for (const AverageRow& a : report.averages()) emit(average_row(a, md, options));

  if (md) {
    bool extra = false;
    for (const CellResult& c : report.cells) extra = extra || !c.reference_cell;
    if (extra) out << "\n\\* no published counterpart for this combination.\n";
    if (!report.timings_reliable) out << "\nTimes were measured with cells running in parallel.\n";
  }
  return out.str();
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const CellResult& c : report.cells) {
    nlohmann::json j{{"classifier", classifier_tag(c.classifier)},
                     {"features", std::string(1, feature_set_tag(c.features))},
                     {"train_accuracy", c.train_accuracy},
                     {"test_accuracy", c.test_accuracy},
                     {"hmm", c.hmm},
                     {"param", c.param ? nlohmann::json(*c.param) : nlohmann::json(nullptr)},
                     {"hidden_nodes", c.hidden_nodes},
                     {"train_minutes", c.train_minutes},
                     {"test_minutes", c.test_minutes},
                     {"word_accuracy", c.word_accuracy},
                     {"hmm_word_accuracy", c.hmm_word_accuracy},
                     {"reference_cell", c.reference_cell},
                     {"error", c.error ? nlohmann::json(*c.error) : nlohmann::json(nullptr)}};
    cells.push_back(std::move(j));
  }
  return nlohmann::json{{"format", "ocrhmm-report"},
                        {"version", 1},
                        {"seed", report.seed},
                        {"ratios", {report.ratios.train, report.ratios.validation,
                                    report.ratios.test}},
                        {"timings_reliable", report.timings_reliable},
                        {"cells", std::move(cells)}};
}

EvalReport report_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != "ocrhmm-report") throw ArgumentError("not a report document");
    EvalReport r;
    r.seed = doc.at("seed").get<std::uint64_t>();
    const auto ratios = doc.at("ratios").get<std::array<double, 3>>();
    r.ratios = {ratios[0], ratios[1], ratios[2]};
    r.timings_reliable = doc.value("timings_reliable", true);
    for (const auto& j : doc.at("cells")) {
      CellResult c;
      c.classifier = parse_classifier(j.at("classifier").get<std::string>());
      c.features = parse_feature_set(j.at("features").get<std::string>());
      c.train_accuracy = j.at("train_accuracy");
      c.test_accuracy = j.at("test_accuracy");
      for (std::size_t i = 0; i < 3; ++i) {
        const auto& v = j.at("hmm").at(i);
        c.hmm[i] = v.is_null() ? std::nan("") : v.get<double>();
      }
      if (!j.at("param").is_null()) c.param = j.at("param").get<double>();
      c.hidden_nodes = j.value("hidden_nodes", std::size_t{0});
      c.train_minutes = j.at("train_minutes");
      c.test_minutes = j.at("test_minutes");
      c.word_accuracy = j.value("word_accuracy", 0.0);
      if (j.contains("hmm_word_accuracy")) {
        for (std::size_t i = 0; i < 3; ++i) {
          const auto& v = j["hmm_word_accuracy"].at(i);
          c.hmm_word_accuracy[i] = v.is_null() ? std::nan("") : v.get<double>();
        }
      }
      c.reference_cell = j.value("reference_cell", true);
      if (!j.at("error").is_null()) c.error = j.at("error").get<std::string>();
      r.cells.push_back(std::move(c));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("malformed report document: ") + e.what());
  }
}

}  // namespace ocrhmm
