#include "shuxu/predictions.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "shuxu/error.hpp"

namespace shuxu {

void PredictionSet::add(std::string record_id, Prediction prediction) {
  if (prediction.score &&
      !(std::isfinite(*prediction.score) && *prediction.score >= 0.0 && *prediction.score <= 1.0)) {
    throw DataError("score for '" + record_id + "' is outside [0, 1]");
  }
  auto [it, inserted] = predictions.emplace(std::move(record_id), prediction);
  if (!inserted) throw DataError("duplicate prediction for '" + it->first + "'");
}

const Prediction* PredictionSet::find(const std::string& record_id) const {
  auto it = predictions.find(record_id);
  return it == predictions.end() ? nullptr : &it->second;
}

void write_predictions(std::ostream& out, const PredictionSet& predictions) {
  out << nlohmann::json{{"system_name", predictions.system_name}}.dump() << '\n';
  for (const auto& [id, p] : predictions.predictions) {
    nlohmann::json line = {{"record_id", id}, {"label", to_string(p.label)}};
    if (p.score) line["score"] = *p.score;
    out << line.dump() << '\n';
  }
}

void write_predictions_file(const std::filesystem::path& path, const PredictionSet& predictions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write predictions file " + path.string());
  write_predictions(out, predictions);
}

PredictionSet load_predictions(std::istream& in) {
  PredictionSet set;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  auto fail = [&](const std::string& why) -> DataError {
    return DataError("predictions line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto obj = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded() || !obj.is_object()) throw fail("not a JSON object");
    if (!have_header) {
      if (!obj.contains("system_name") || !obj["system_name"].is_string()) {
        throw fail("first line must carry a string system_name");
      }
      set.system_name = obj["system_name"].get<std::string>();
      have_header = true;
      continue;
    }
    if (!obj.contains("record_id") || !obj["record_id"].is_string()) {
      throw fail("missing string record_id");
    }
    if (!obj.contains("label") || !obj["label"].is_string()) throw fail("missing string label");
    const auto label_text = obj["label"].get<std::string>();
    const auto label = parse_label(label_text);
    if (!label) throw fail("unknown label '" + label_text + "'");
    Prediction p{*label, std::nullopt};
    if (obj.contains("score") && !obj["score"].is_null()) {
      if (!obj["score"].is_number()) throw fail("score is not a number");
      p.score = obj["score"].get<double>();
    }
    auto id = obj["record_id"].get<std::string>();
    if (set.predictions.contains(id)) throw fail("duplicate record_id '" + id + "'");
    try {
      set.add(std::move(id), p);
    } catch (const DataError& e) {
      throw fail(e.what());
    }
  }
  if (!have_header) throw DataError("predictions file is empty");
  return set;
}

PredictionSet load_predictions_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open predictions file " + path.string());
  return load_predictions(in);
}

}  // namespace shuxu
