#pragma once

// Binary linear model over sparse named features, shared by the segmenter
// and the stylometric classifier, with a versioned JSON container.

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "tibtext/error.hpp"

namespace tibtext {

using FeatureVector = std::map<std::string, double>;

struct Prediction {
  std::string label;
  double margin = 0.0;
};

struct LinearModel {
  std::string kind;         // "segmenter" or "stylo"
  std::string template_id;  // feature template the weights belong to
  std::array<std::string, 2> labels;
  double bias = 0.0;
  std::map<std::string, double> weights;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();

  double score(const FeatureVector& fv) const {
    double s = bias;
    for (const auto& [id, v] : fv)
      if (auto it = weights.find(id); it != weights.end()) s += it->second * v;
    return s;
  }

  // A score of exactly zero goes to the first label.
  Prediction predict(const FeatureVector& fv) const {
    double s = score(fv);
    return {s >= 0.0 ? labels[0] : labels[1], s};
  }
};

inline constexpr int kModelFormatVersion = 1;

inline std::string serialize_model(const LinearModel& m) {
  nlohmann::ordered_json j;
  j["format"] = "tibtext-linear-model";
  j["version"] = kModelFormatVersion;
  j["kind"] = m.kind;
  j["template"] = m.template_id;
  j["labels"] = m.labels;
  j["bias"] = m.bias;
  nlohmann::ordered_json w = nlohmann::ordered_json::object();
  for (const auto& [id, v] : m.weights) w[id] = v;
  j["weights"] = std::move(w);
  j["meta"] = m.meta;
  return j.dump() + "\n";
}

inline LinearModel parse_model(std::string_view content) {
  LinearModel m;
  try {
    auto j = nlohmann::ordered_json::parse(content);
    if (j.value("format", "") != "tibtext-linear-model")
      throw Error(Errc::bad_format, "not a tibtext model file");
    if (j.value("version", 0) != kModelFormatVersion) throw Error(Errc::bad_format, "unsupported model version");
    m.kind = j.at("kind").get<std::string>();
    m.template_id = j.at("template").get<std::string>();
    m.labels = j.at("labels").get<std::array<std::string, 2>>();
    m.bias = j.at("bias").get<double>();
    for (const auto& [id, v] : j.at("weights").items()) m.weights[id] = v.get<double>();
    m.meta = j.value("meta", nlohmann::ordered_json::object());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::bad_format, std::string("model file: ") + e.what());
  }
  if (m.labels[0] == m.labels[1]) throw Error(Errc::bad_format, "model labels must differ");
  if (!std::isfinite(m.bias)) throw Error(Errc::bad_format, "non-finite bias");
  for (const auto& [id, v] : m.weights)
    if (!std::isfinite(v)) throw Error(Errc::bad_format, "non-finite weight for '" + id + "'");
  return m;
}

}  // namespace tibtext
