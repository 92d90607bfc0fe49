#pragma once

#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

#include "shuxu/corpus.hpp"
#include "shuxu/logreg.hpp"
#include "shuxu/predictions.hpp"
#include "shuxu/tfidf.hpp"

namespace shuxu {

// TF-IDF featurizer plus logistic regression, fitted on labeled records.
struct TextClassifier {
  TfidfModel featurizer;
  LogRegModel model;

  // e.g. "tfidf-2-3"
  std::string system_name() const;

  // Score is the Letter probability; label is Letter iff score >= 0.5.
  PredictionSet predict(std::span<const TitleRecord> records) const;

  nlohmann::json to_json() const;
  static TextClassifier from_json(const nlohmann::json& doc);
};

// Throws DataError on unlabeled records.
TextClassifier fit_classifier(std::span<const TitleRecord> records, const FeaturizerConfig& features,
                              const TrainConfig& training);

void save_classifier(const std::filesystem::path& path, const TextClassifier& classifier);
TextClassifier load_classifier(const std::filesystem::path& path);

}  // namespace shuxu
