#include "shuxu/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "shuxu/error.hpp"
#include "shuxu/text.hpp"

namespace shuxu {

namespace {
constexpr std::string_view kFormat = "shuxu.tfidf";
constexpr int kVersion = 1;
}  // namespace

void FeaturizerConfig::validate() const {
  if (ngram_min < 1 || ngram_min > ngram_max || ngram_max > 6) {
    throw UsageError("n-gram range must satisfy 1 <= min <= max <= 6");
  }
  if (min_df < 1) throw UsageError("min_df must be at least 1");
}

double FeatureVector::norm() const {
  double sum = 0.0;
  for (const auto& [index, weight] : entries) sum += weight * weight;
  return std::sqrt(sum);
}

std::vector<std::string> extract_ngrams(std::string_view title, int n_min, int n_max) {
  const std::u32string cps = text::decode_utf8(title);
  std::vector<std::string> out;
  for (int n = n_min; n <= n_max; ++n) {
    const auto len = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + len <= cps.size(); ++i) {
      out.push_back(text::encode_utf8(std::u32string_view(cps).substr(i, len)));
    }
  }
  return out;
}

double smoothed_idf(std::size_t n_documents, std::size_t df) {
  return std::log((1.0 + static_cast<double>(n_documents)) / (1.0 + static_cast<double>(df))) +
         1.0;
}

TfidfModel::TfidfModel(FeaturizerConfig config, std::size_t n_documents,
                       std::vector<std::string> ngrams, std::vector<std::size_t> df)
    : config_(config), n_documents_(n_documents), ngrams_(std::move(ngrams)), df_(std::move(df)) {
  idf_.reserve(df_.size());
  index_.reserve(ngrams_.size());
  for (std::size_t i = 0; i < ngrams_.size(); ++i) {
    idf_.push_back(smoothed_idf(n_documents_, df_[i]));
    index_.emplace(ngrams_[i], static_cast<std::uint32_t>(i));
  }
}

TfidfModel TfidfModel::fit(std::span<const std::string> titles, const FeaturizerConfig& config) {
  config.validate();
  if (titles.empty()) throw DataError("cannot fit TF-IDF on zero titles");
  // std::map keeps n-grams in byte order, which for UTF-8 is code point order.
  std::map<std::string, std::size_t> df;
  for (const auto& title : titles) {
    auto grams = extract_ngrams(title, config.ngram_min, config.ngram_max);
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    for (auto& g : grams) ++df[std::move(g)];
  }
  std::vector<std::string> ngrams;
  std::vector<std::size_t> counts;
  for (auto& [gram, count] : df) {
    if (count < config.min_df) continue;
    ngrams.push_back(gram);
    counts.push_back(count);
  }
  if (ngrams.empty()) {
    throw DataError("no n-gram reaches min_df=" + std::to_string(config.min_df) +
                    "; the vocabulary would be empty");
  }
  return TfidfModel(config, titles.size(), std::move(ngrams), std::move(counts));
}

std::optional<std::uint32_t> TfidfModel::index_of(std::string_view ngram) const {
  auto it = index_.find(std::string(ngram));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FeatureVector TfidfModel::transform(std::string_view title) const {
  std::map<std::uint32_t, double> counts;
  for (const auto& g : extract_ngrams(title, config_.ngram_min, config_.ngram_max)) {
    if (auto it = index_.find(g); it != index_.end()) counts[it->second] += 1.0;
  }
  FeatureVector out;
  out.entries.reserve(counts.size());
  double sum = 0.0;
  for (const auto& [index, count] : counts) {
    const double w = count * idf_[index];
    out.entries.emplace_back(index, w);
    sum += w * w;
  }
  if (sum > 0.0) {
    const double norm = std::sqrt(sum);
    for (auto& entry : out.entries) entry.second /= norm;
  }
  return out;
}

nlohmann::json TfidfModel::to_json() const {
  nlohmann::json vocab = nlohmann::json::array();
  for (std::size_t i = 0; i < ngrams_.size(); ++i) {
    vocab.push_back({{"ngram", ngrams_[i]}, {"df", df_[i]}, {"idf", idf_[i]}});
  }
  return {
      {"format", kFormat},
      {"version", kVersion},
      {"config",
       {{"ngram_min", config_.ngram_min},
        {"ngram_max", config_.ngram_max},
        {"min_df", config_.min_df},
        {"tf", "raw"},
        {"idf", "smooth"},
        {"norm", "l2"}}},
      {"n_documents", n_documents_},
      {"vocabulary", std::move(vocab)},
  };
}

TfidfModel TfidfModel::from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kFormat) throw DataError("not a TF-IDF model");
    if (doc.at("version").get<int>() != kVersion) {
      throw DataError("unsupported TF-IDF model version");
    }
    FeaturizerConfig config;
    const auto& c = doc.at("config");
    config.ngram_min = c.at("ngram_min").get<int>();
    config.ngram_max = c.at("ngram_max").get<int>();
    config.min_df = c.at("min_df").get<std::size_t>();
    config.validate();
    const auto n_documents = doc.at("n_documents").get<std::size_t>();
    std::vector<std::string> ngrams;
    std::vector<std::size_t> df;
    std::vector<double> stored_idf;
    for (const auto& entry : doc.at("vocabulary")) {
      ngrams.push_back(entry.at("ngram").get<std::string>());
      df.push_back(entry.at("df").get<std::size_t>());
      stored_idf.push_back(entry.at("idf").get<double>());
      if (df.back() < config.min_df || df.back() > n_documents) {
        throw DataError("df of '" + ngrams.back() + "' is inconsistent with the model");
      }
      if (ngrams.size() > 1 && !(ngrams[ngrams.size() - 2] < ngrams.back())) {
        throw DataError("vocabulary is not in strictly increasing n-gram order");
      }
    }
    TfidfModel model(config, n_documents, std::move(ngrams), std::move(df));
    for (std::size_t i = 0; i < stored_idf.size(); ++i) {
      if (std::abs(model.idf_[i] - stored_idf[i]) > 1e-12 * std::max(1.0, model.idf_[i])) {
        throw DataError("stored idf of '" + model.ngrams_[i] + "' does not match its df");
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed TF-IDF model: ") + e.what());
  }
}

}  // namespace shuxu
