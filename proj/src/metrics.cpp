#include "shuxu/metrics.hpp"

#include <algorithm>

#include "shuxu/error.hpp"
#include "shuxu/text.hpp"

namespace shuxu {

void ConfusionMatrix::add(Label gold, Label predicted) noexcept {
  if (gold == Label::Letter) {
    (predicted == Label::Letter ? tp : fn) += 1;
  } else {
    (predicted == Label::Letter ? fp : tn) += 1;
  }
}

namespace {

// Resolves each gold record to its prediction, failing with every
// unlabeled or unpredicted id at once.
std::vector<std::pair<const TitleRecord*, const Prediction*>> pair_up(
    const PredictionSet& predictions, std::span<const TitleRecord> gold) {
  std::vector<std::pair<const TitleRecord*, const Prediction*>> out;
  std::vector<std::string> unlabeled;
  std::vector<std::string> missing;
  for (const auto& r : gold) {
    if (!r.label) {
      unlabeled.push_back(r.record_id);
      continue;
    }
    const Prediction* p = predictions.find(r.record_id);
    if (!p) {
      missing.push_back(r.record_id);
      continue;
    }
    out.emplace_back(&r, p);
  }
  auto join = [](const std::vector<std::string>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size() && i < 20; ++i) s += (i ? ", " : "") + ids[i];
    if (ids.size() > 20) s += ", ... (" + std::to_string(ids.size()) + " total)";
    return s;
  };
  if (!unlabeled.empty()) throw DataError("gold records without labels: " + join(unlabeled));
  if (!missing.empty()) throw DataError("no prediction for gold records: " + join(missing));
  return out;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

ConfusionMatrix confusion(const PredictionSet& predictions, std::span<const TitleRecord> gold) {
  ConfusionMatrix cm;
  for (const auto& [record, prediction] : pair_up(predictions, gold)) {
    cm.add(*record->label, prediction->label);
  }
  return cm;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw DataError("empty confusion matrix");
  MetricsReport m;
  m.accuracy = ratio(cm.tp + cm.tn, cm.total());
  m.precision_letter = ratio(cm.tp, cm.tp + cm.fp);
  m.recall_letter = ratio(cm.tp, cm.tp + cm.fn);
  m.f1_letter = harmonic(m.precision_letter, m.recall_letter);
  m.precision_preface = ratio(cm.tn, cm.tn + cm.fn);
  m.recall_preface = ratio(cm.tn, cm.tn + cm.fp);
  m.f1_preface = harmonic(m.precision_preface, m.recall_preface);
  m.macro_f1 = (m.f1_letter + m.f1_preface) / 2.0;
  return m;
}

MatchedEvaluation evaluate_matched(const PredictionSet& predictions,
                                   std::span<const TitleRecord> gold) {
  std::vector<TitleRecord> matched;
  for (const auto& r : gold) {
    if (predictions.find(r.record_id)) matched.push_back(r);
  }
  if (matched.empty()) throw DataError("no predicted record_id matches the gold set");
  MatchedEvaluation out;
  out.matrix = confusion(predictions, matched);
  out.metrics = compute_metrics(out.matrix);
  out.matched = matched.size();
  out.gold_size = gold.size();
  out.coverage = ratio(matched.size(), gold.size());
  return out;
}

ErrorReport list_errors(const PredictionSet& predictions, std::span<const TitleRecord> gold) {
  ErrorReport report;
  for (const auto& [record, prediction] : pair_up(predictions, gold)) {
    if (*record->label == prediction->label) continue;
    report.entries.push_back({record->record_id, record->title, *record->label,
                              prediction->label, text::scalar_length(record->title)});
  }
  std::sort(report.entries.begin(), report.entries.end(), [](const auto& a, const auto& b) {
    return a.length != b.length ? a.length < b.length : a.record_id < b.record_id;
  });
  return report;
}

nlohmann::json to_json(const ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
}

nlohmann::json to_json(const MetricsReport& m) {
  return {
      {"accuracy", m.accuracy},
      {"precision_letter", m.precision_letter},
      {"recall_letter", m.recall_letter},
      {"f1_letter", m.f1_letter},
      {"precision_preface", m.precision_preface},
      {"recall_preface", m.recall_preface},
      {"f1_preface", m.f1_preface},
      {"macro_f1", m.macro_f1},
  };
}

nlohmann::json to_json(const ErrorReport& report) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : report.entries) {
    out.push_back({{"record_id", e.record_id},
                   {"title", e.title},
                   {"gold", to_string(e.gold)},
                   {"predicted", to_string(e.predicted)},
                   {"length", e.length}});
  }
  return out;
}

}  // namespace shuxu
