#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

namespace shuxu {

struct FeaturizerConfig {
  int ngram_min = 2;
  int ngram_max = 2;
  std::size_t min_df = 2;

  // Requires 1 <= ngram_min <= ngram_max <= 6 and min_df >= 1.
  void validate() const;

  bool operator==(const FeaturizerConfig&) const = default;
};

// Sparse vector, entries strictly increasing by index.
struct FeatureVector {
  std::vector<std::pair<std::uint32_t, double>> entries;

  bool empty() const noexcept { return entries.empty(); }
  double norm() const;

  bool operator==(const FeatureVector&) const = default;
};

// All contiguous scalar-value n-grams of each length in [n_min, n_max],
// with repetition, in order of length then position.
std::vector<std::string> extract_ngrams(std::string_view title, int n_min, int n_max);

// ln((1 + n_documents) / (1 + df)) + 1
double smoothed_idf(std::size_t n_documents, std::size_t df);

// Character n-gram TF-IDF vocabulary. Feature indices follow lexicographic
// (code point) order of the n-grams. Weights are raw counts times idf,
// L2-normalized per document.
class TfidfModel {
 public:
  // Throws UsageError on a bad config, DataError when there are no titles
  // or every n-gram falls below min_df.
  static TfidfModel fit(std::span<const std::string> titles, const FeaturizerConfig& config);

  FeatureVector transform(std::string_view title) const;

  std::size_t dimension() const noexcept { return ngrams_.size(); }
  const std::string& ngram(std::size_t index) const { return ngrams_.at(index); }
  std::optional<std::uint32_t> index_of(std::string_view ngram) const;
  std::size_t df(std::size_t index) const { return df_.at(index); }
  double idf(std::size_t index) const { return idf_.at(index); }
  std::size_t n_documents() const noexcept { return n_documents_; }
  const FeaturizerConfig& config() const noexcept { return config_; }

  // Versioned document with config, n_documents, and per-n-gram df and idf.
  nlohmann::json to_json() const;
  // Recomputes idf and rejects the document if it disagrees with the
  // stored values or violates the vocabulary invariants.
  static TfidfModel from_json(const nlohmann::json& doc);

  bool operator==(const TfidfModel& other) const {
    return config_ == other.config_ && n_documents_ == other.n_documents_ &&
           ngrams_ == other.ngrams_ && df_ == other.df_ && idf_ == other.idf_;
  }

 private:
  TfidfModel(FeaturizerConfig config, std::size_t n_documents, std::vector<std::string> ngrams,
             std::vector<std::size_t> df);

  FeaturizerConfig config_;
  std::size_t n_documents_ = 0;
  std::vector<std::string> ngrams_;
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

inline TfidfModel fit_tfidf(std::span<const std::string> titles, const FeaturizerConfig& config) {
  return TfidfModel::fit(titles, config);
}

inline FeatureVector transform(const TfidfModel& model, std::string_view title) {
  return model.transform(title);
}

}  // namespace shuxu
