#include "shuxu/pipeline.hpp"

#include <fstream>

#include "shuxu/error.hpp"

namespace shuxu {

std::string TextClassifier::system_name() const {
  const auto& c = featurizer.config();
  return "tfidf-" + std::to_string(c.ngram_min) + "-" + std::to_string(c.ngram_max);
}

PredictionSet TextClassifier::predict(std::span<const TitleRecord> records) const {
  PredictionSet out;
  out.system_name = system_name();
  for (const auto& r : records) {
    const double p = model.predict_proba(featurizer.transform(r.title));
    out.add(r.record_id, {p >= 0.5 ? Label::Letter : Label::Preface, p});
  }
  return out;
}

nlohmann::json TextClassifier::to_json() const {
  return {{"format", "shuxu.classifier"},
          {"version", 1},
          {"featurizer", featurizer.to_json()},
          {"model", model.to_json()}};
}

TextClassifier TextClassifier::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("format", "") != "shuxu.classifier" ||
      doc.value("version", 0) != 1 || !doc.contains("featurizer") || !doc.contains("model")) {
    throw DataError("not a classifier document");
  }
  TextClassifier c{TfidfModel::from_json(doc["featurizer"]), LogRegModel::from_json(doc["model"])};
  if (c.model.dimension() != c.featurizer.dimension()) {
    throw DataError("classifier weights do not match its vocabulary");
  }
  return c;
}

TextClassifier fit_classifier(std::span<const TitleRecord> records, const FeaturizerConfig& features,
                              const TrainConfig& training) {
  std::vector<std::string> titles;
  std::vector<Label> labels;
  titles.reserve(records.size());
  labels.reserve(records.size());
  for (const auto& r : records) {
    if (!r.label) throw DataError("training record '" + r.record_id + "' is unlabeled");
    titles.push_back(r.title);
    labels.push_back(*r.label);
  }
  auto featurizer = TfidfModel::fit(titles, features);
  std::vector<FeatureVector> rows;
  rows.reserve(titles.size());
  for (const auto& t : titles) rows.push_back(featurizer.transform(t));
  auto model = train(rows, labels, featurizer.dimension(), training);
  return {std::move(featurizer), std::move(model)};
}

void save_classifier(const std::filesystem::path& path, const TextClassifier& classifier) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path.string());
  out << classifier.to_json().dump(1) << '\n';
}

TextClassifier load_classifier(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path.string());
  const auto doc = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw DataError("model file " + path.string() + " is not valid JSON");
  return TextClassifier::from_json(doc);
}

}  // namespace shuxu
