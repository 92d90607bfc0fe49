#include "shuxu/report.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "shuxu/error.hpp"
#include "shuxu/pipeline.hpp"
#include "shuxu/predictions.hpp"

namespace shuxu {

namespace {

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

SystemSpec resolve_system(std::string_view text) {
  SystemSpec spec;
  if (auto kind = parse_rule_kind(text)) {
    spec.kind = SystemSpec::Kind::Rule;
    spec.rule = *kind;
    spec.name = std::string(text);
    return spec;
  }
  if (text.starts_with("tfidf-")) {
    const auto rest = text.substr(6);
    const auto dash = rest.find('-');
    const auto lo = dash == std::string_view::npos ? std::nullopt : parse_int(rest.substr(0, dash));
    const auto hi = dash == std::string_view::npos ? std::nullopt : parse_int(rest.substr(dash + 1));
    if (!lo || !hi) throw UsageError("malformed TF-IDF system '" + std::string(text) + "'");
    spec.kind = SystemSpec::Kind::Tfidf;
    spec.featurizer.ngram_min = *lo;
    spec.featurizer.ngram_max = *hi;
    spec.featurizer.validate();
    spec.name = std::string(text);
    return spec;
  }
  if (text.starts_with("external:")) {
    auto rest = text.substr(9);
    spec.kind = SystemSpec::Kind::External;
    if (const auto eq = rest.find('='); eq != std::string_view::npos) {
      spec.name = std::string(rest.substr(0, eq));
      rest = rest.substr(eq + 1);
    }
    if (rest.empty()) throw UsageError("external system needs a predictions path");
    spec.predictions_path = std::filesystem::path(std::string(rest));
    return spec;
  }
  throw UsageError("unknown system '" + std::string(text) + "'");
}

ComparisonTable run_compare(const Corpus& corpus, const SplitAssignment& split,
                            std::span<const SystemSpec> systems, const CompareOptions& options) {
  if (systems.empty()) throw UsageError("no systems to compare");
  const auto train_records = split.select(corpus, Fold::Train);
  const auto eval_records = split.select(corpus, options.eval_fold);
  if (eval_records.empty()) throw DataError("evaluation fold is empty");

  ComparisonTable table;
  table.train_size = train_records.size();
  table.eval_size = eval_records.size();
  table.eval_fold = options.eval_fold;

  for (const auto& system : systems) {
    ComparisonRow row;
    switch (system.kind) {
      case SystemSpec::Kind::Rule: {
        RuleSpec rule;
        rule.kind = system.rule;
        const auto predictions = predict_rule(eval_records, rule);
        row.system = system.name.empty() ? predictions.system_name : system.name;
        row.matrix = confusion(predictions, eval_records);
        break;
      }
      case SystemSpec::Kind::Tfidf: {
        if (options.on_fit) options.on_fit(system.name, train_records);
        FeaturizerConfig features = system.featurizer;
        features.min_df = options.min_df;
        const auto classifier = fit_classifier(train_records, features, options.training);
        const auto predictions = classifier.predict(eval_records);
        row.system = system.name.empty() ? classifier.system_name() : system.name;
        row.matrix = confusion(predictions, eval_records);
        break;
      }
      case SystemSpec::Kind::External: {
        const auto predictions = load_predictions_file(system.predictions_path);
        const auto matched = evaluate_matched(predictions, eval_records);
        row.system = system.name.empty() ? predictions.system_name : system.name;
        row.matrix = matched.matrix;
        row.coverage = matched.coverage;
        break;
      }
    }
    row.metrics = compute_metrics(row.matrix);
    table.rows.push_back(std::move(row));
  }
  return table;
}

nlohmann::json to_json(const ComparisonTable& table, const std::optional<std::string>& generated_at) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"system", r.system},
                    {"metrics", to_json(r.metrics)},
                    {"confusion", to_json(r.matrix)},
                    {"evaluated", r.matrix.total()},
                    {"coverage", r.coverage}});
  }
  nlohmann::json doc = {
      {"format", "shuxu.comparison"},
      {"version", 1},
      {"train_size", table.train_size},
      {"eval_fold", to_string(table.eval_fold)},
      {"eval_size", table.eval_size},
      {"systems", std::move(rows)},
  };
  if (generated_at) doc["metadata"] = {{"generated_at", *generated_at}};
  return doc;
}

std::string to_markdown(const ComparisonTable& table,
                        const std::optional<std::string>& generated_at) {
  std::ostringstream out;
  if (generated_at) out << "<!-- generated_at: " << *generated_at << " -->\n";
  out << "| System | Accuracy | P (letter) | R (letter) | F1 (letter) | Macro-F1 | TP/FP/FN/TN "
         "| Coverage |\n";
  out << "|---|---:|---:|---:|---:|---:|---|---:|\n";
  char buf[64];
  auto fixed = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };
  for (const auto& r : table.rows) {
    out << "| " << r.system << " | " << fixed(r.metrics.accuracy) << " | "
        << fixed(r.metrics.precision_letter) << " | " << fixed(r.metrics.recall_letter) << " | "
        << fixed(r.metrics.f1_letter) << " | " << fixed(r.metrics.macro_f1) << " | "
        << r.matrix.tp << "/" << r.matrix.fp << "/" << r.matrix.fn << "/" << r.matrix.tn << " | "
        << fixed(r.coverage) << " |\n";
  }
  return out.str();
}

}  // namespace shuxu
