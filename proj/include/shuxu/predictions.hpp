#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "shuxu/corpus.hpp"

namespace shuxu {

struct Prediction {
  Label label = Label::Preface;
  std::optional<double> score;  // probability of Letter, in [0, 1]

  bool operator==(const Prediction&) const = default;
};

// Per-record output of any system. Iteration order is by record_id.
struct PredictionSet {
  std::string system_name;
  std::map<std::string, Prediction> predictions;

  // Throws DataError on a duplicate id or an out-of-range score.
  void add(std::string record_id, Prediction prediction);

  std::size_t size() const noexcept { return predictions.size(); }
  const Prediction* find(const std::string& record_id) const;

  bool operator==(const PredictionSet&) const = default;
};

// JSON lines. The first line is {"system_name": ...}; each following line
// is {"record_id": ..., "label": "letter"|"preface", "score": ...} with
// score omitted when absent.
void write_predictions(std::ostream& out, const PredictionSet& predictions);
void write_predictions_file(const std::filesystem::path& path, const PredictionSet& predictions);

// Throws DataError naming the offending line on schema violations,
// unknown labels or duplicate ids.
PredictionSet load_predictions(std::istream& in);
PredictionSet load_predictions_file(const std::filesystem::path& path);

}  // namespace shuxu
