#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shuxu/corpus.hpp"
#include "shuxu/logreg.hpp"
#include "shuxu/metrics.hpp"
#include "shuxu/rules.hpp"
#include "shuxu/splitter.hpp"
#include "shuxu/tfidf.hpp"

namespace shuxu {

struct SystemSpec {
  enum class Kind { Rule, Tfidf, External };

  Kind kind = Kind::Rule;
  std::string name;
  RuleKind rule = RuleKind::VerbOrShu;
  FeaturizerConfig featurizer;
  std::filesystem::path predictions_path;
};

// Accepts a rule name (majority, ends-with-shu, starts-with-verb,
// verb-and-shu, verb-or-shu), tfidf-MIN-MAX, or external:PATH /
// external:NAME=PATH. Throws UsageError otherwise.
SystemSpec resolve_system(std::string_view text);

struct ComparisonRow {
  std::string system;
  MetricsReport metrics;
  ConfusionMatrix matrix;
  double coverage = 1.0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;  // invocation order
  std::size_t train_size = 0;
  std::size_t eval_size = 0;
  Fold eval_fold = Fold::Test;
};

struct CompareOptions {
  TrainConfig training;
  std::size_t min_df = 2;
  Fold eval_fold = Fold::Test;
  // Called with exactly the records each trainable system is fitted on.
  std::function<void(std::string_view system, std::span<const TitleRecord> fit_records)> on_fit;
};

// Fits trainable systems on the train fold and scores every system on the
// evaluation fold. External predictions are scored on the matched subset.
ComparisonTable run_compare(const Corpus& corpus, const SplitAssignment& split,
                            std::span<const SystemSpec> systems, const CompareOptions& options = {});

// `generated_at` goes into a metadata header and is the only
// nondeterministic part of either rendering.
nlohmann::json to_json(const ComparisonTable& table,
                       const std::optional<std::string>& generated_at = std::nullopt);
std::string to_markdown(const ComparisonTable& table,
                        const std::optional<std::string>& generated_at = std::nullopt);

}  // namespace shuxu
