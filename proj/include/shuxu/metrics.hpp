#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "shuxu/corpus.hpp"
#include "shuxu/predictions.hpp"

namespace shuxu {

// Letter is the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  void add(Label gold, Label predicted) noexcept;

  bool operator==(const ConfusionMatrix&) const = default;
};

struct MetricsReport {
  double accuracy = 0.0;
  double precision_letter = 0.0;
  double recall_letter = 0.0;
  double f1_letter = 0.0;
  double precision_preface = 0.0;
  double recall_preface = 0.0;
  double f1_preface = 0.0;
  double macro_f1 = 0.0;
};

// Every gold record must be labeled and predicted; otherwise DataError
// listing the offending record ids.
ConfusionMatrix confusion(const PredictionSet& predictions, std::span<const TitleRecord> gold);

// Zero denominators give 0 for precision, recall and F1. Throws DataError
// on an empty matrix.
MetricsReport compute_metrics(const ConfusionMatrix& cm);

struct MatchedEvaluation {
  MetricsReport metrics;
  ConfusionMatrix matrix;
  std::size_t matched = 0;
  std::size_t gold_size = 0;
  double coverage = 0.0;  // matched / gold_size
};

// Scores only the gold records that have a prediction. Throws DataError
// when nothing matches.
MatchedEvaluation evaluate_matched(const PredictionSet& predictions,
                                   std::span<const TitleRecord> gold);

struct ErrorEntry {
  std::string record_id;
  std::string title;
  Label gold = Label::Letter;
  Label predicted = Label::Preface;
  std::size_t length = 0;  // scalar values
};

// Misclassified records, shortest title first, then by record_id.
struct ErrorReport {
  std::vector<ErrorEntry> entries;
};

ErrorReport list_errors(const PredictionSet& predictions, std::span<const TitleRecord> gold);

nlohmann::json to_json(const ConfusionMatrix& cm);
nlohmann::json to_json(const MetricsReport& m);
nlohmann::json to_json(const ErrorReport& report);

}  // namespace shuxu
