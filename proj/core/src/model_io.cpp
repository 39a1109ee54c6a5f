#include "ocrhmm/model_io.hpp"

#include <string>

namespace ocrhmm {
namespace {

using nlohmann::json;

json header(const char* kind) {
  return json{{"format", std::string("ocrhmm-") + kind}, {"version", kModelFormatVersion}};
}

void check_header(const json& doc, const char* kind) {
  const std::string expected = std::string("ocrhmm-") + kind;
  if (!doc.is_object() || doc.value("format", "") != expected) {
    throw ArgumentError("expected a document with format " + expected);
  }
  const int version = doc.value("version", -1);
  if (version != kModelFormatVersion) {
    throw ArgumentError(expected + ": unsupported version " + std::to_string(version));
  }
}

template <class F>
auto guarded(const char* kind, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("malformed ocrhmm-") + kind + " document: " + e.what());
  }
}

const char* kernel_name(ParzenKernel k) {
  return k == ParzenKernel::gaussian ? "gaussian" : "hypercube";
}

}  // namespace

json to_json(const LabeledFeatures& data) {
  const auto& f = data.features;
  return json{{"set", std::string(1, feature_set_tag(f.set))},
              {"dim", f.dim},
              {"values", f.values},
              {"glyph_order", f.glyph_order},
              {"labels", data.labels}};
}

LabeledFeatures labeled_features_from_json(const json& doc) {
  LabeledFeatures out;
  out.features.set = parse_feature_set(doc.at("set").get<std::string>());
  out.features.dim = doc.at("dim").get<std::size_t>();
  out.features.values = doc.at("values").get<std::vector<double>>();
  out.features.glyph_order = doc.at("glyph_order").get<std::vector<std::size_t>>();
  out.labels = doc.at("labels").get<std::vector<Letter>>();
  if (out.features.rows() != out.labels.size() ||
      out.features.values.size() != out.labels.size() * out.features.dim) {
    throw ArgumentError("feature values do not match the label count");
  }
  return out;
}

json model_to_json(const KnnModel& model) {
  json doc = header("knn");
  doc["k"] = model.k;
  doc["train"] = to_json(model.train);
  doc["search_trace"] = model.search_trace;
  return doc;
}

KnnModel knn_model_from_json(const json& doc) {
  check_header(doc, "knn");
  return guarded("knn", [&] {
    KnnModel m;
    m.k = doc.at("k").get<int>();
    m.train = labeled_features_from_json(doc.at("train"));
    m.search_trace = doc.at("search_trace").get<std::vector<std::pair<int, double>>>();
    return m;
  });
}

json model_to_json(const ParzenModel& model) {
  json doc = header("parzen");
  doc["bandwidth"] = model.bandwidth;
  doc["kernel"] = kernel_name(model.kernel);
  doc["priors"] = model.priors;
  doc["train"] = to_json(model.train);
  doc["search_trace"] = model.search_trace;
  return doc;
}

ParzenModel parzen_model_from_json(const json& doc) {
  check_header(doc, "parzen");
  return guarded("parzen", [&] {
    ParzenModel m;
    m.bandwidth = doc.at("bandwidth").get<double>();
    m.kernel = doc.at("kernel") == "hypercube" ? ParzenKernel::hypercube : ParzenKernel::gaussian;
    m.priors = doc.at("priors").get<std::array<double, kNumLetters>>();
    m.train = labeled_features_from_json(doc.at("train"));
    m.search_trace = doc.at("search_trace").get<std::vector<std::pair<double, double>>>();
    return m;
  });
}

json model_to_json(const NaiveBayesModel& model) {
  json doc = header("naive-bayes");
  doc["dim"] = model.dim;
  doc["priors"] = model.priors;
  json densities = json::array();
  for (const auto& d : model.densities) {
    densities.push_back(json{{"values", d.values},
                             {"weights", d.weights},
                             {"total", d.total},
                             {"bandwidth", d.bandwidth}});
  }
  doc["densities"] = std::move(densities);
  return doc;
}

NaiveBayesModel naive_bayes_model_from_json(const json& doc) {
  check_header(doc, "naive-bayes");
  return guarded("naive-bayes", [&] {
    NaiveBayesModel m;
    m.dim = doc.at("dim").get<std::size_t>();
    m.priors = doc.at("priors").get<std::array<double, kNumLetters>>();
    for (const auto& d : doc.at("densities")) {
      KernelDensity1D k;
      k.values = d.at("values").get<std::vector<double>>();
      k.weights = d.at("weights").get<std::vector<double>>();
      k.total = d.at("total").get<double>();
      k.bandwidth = d.at("bandwidth").get<double>();
      m.densities.push_back(std::move(k));
    }
    if (m.densities.size() != m.dim * kNumLetters) {
      throw ArgumentError("naive-bayes document has " + std::to_string(m.densities.size()) +
                          " densities, expected " + std::to_string(m.dim * kNumLetters));
    }
    return m;
  });
}

json model_to_json(const OaaNetworkModel& model) {
  json doc = header("oaa-network");
  doc["hidden_nodes"] = model.hidden_nodes;
  doc["input_min"] = model.input_min;
  doc["input_range"] = model.input_range;
  doc["epochs"] = model.epochs;
  doc["mean_epochs"] = model.mean_epochs;
  json nets = json::array();
  for (const auto& n : model.networks) {
    nets.push_back(json{{"inputs", n.inputs}, {"hidden", n.hidden}, {"params", n.params}});
  }
  doc["networks"] = std::move(nets);
  return doc;
}

OaaNetworkModel neural_model_from_json(const json& doc) {
  check_header(doc, "oaa-network");
  return guarded("oaa-network", [&] {
    OaaNetworkModel m;
    m.hidden_nodes = doc.at("hidden_nodes").get<std::size_t>();
    m.input_min = doc.at("input_min").get<std::vector<double>>();
    m.input_range = doc.at("input_range").get<std::vector<double>>();
    m.epochs = doc.at("epochs").get<std::vector<int>>();
    m.mean_epochs = doc.at("mean_epochs").get<double>();
    for (const auto& n : doc.at("networks")) {
      BinaryNetwork net;
      net.inputs = n.at("inputs").get<std::size_t>();
      net.hidden = n.at("hidden").get<std::size_t>();
      net.params = n.at("params").get<std::vector<double>>();
      if (net.params.size() != BinaryNetwork::parameter_count(net.inputs, net.hidden)) {
        throw ArgumentError("network parameter count does not match its shape");
      }
      m.networks.push_back(std::move(net));
    }
    return m;
  });
}

json emissions_to_json(const EmissionMatrix& m) {
  json rows = json::array();
  for (int l = 0; l < kNumLetters; ++l) {
    const auto r = m.probs.row(l);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return json{{"samples", m.samples()}, {"rows", std::move(rows)}, {"zero_rows", m.zero_rows}};
}

}  // namespace ocrhmm
