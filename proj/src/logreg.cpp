#include "shuxu/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shuxu/error.hpp"

namespace shuxu {

namespace {
constexpr std::string_view kFormat = "shuxu.logreg";
constexpr int kVersion = 1;
constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-20;

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}
}  // namespace

void TrainConfig::validate() const {
  if (!(l2_strength > 0.0)) throw UsageError("l2_strength must be positive");
  if (!(class_weight_scale > 0.0) || !std::isfinite(class_weight_scale)) {
    throw UsageError("class_weight_scale must be positive and finite");
  }
  if (max_iterations < 1) throw UsageError("max_iterations must be at least 1");
  if (!(gradient_tolerance > 0.0)) throw UsageError("gradient_tolerance must be positive");
}

ClassWeights balanced_class_weights(std::size_t n_letter, std::size_t n_preface) {
  const double n = static_cast<double>(n_letter + n_preface);
  return {n / (2.0 * static_cast<double>(n_letter)), n / (2.0 * static_cast<double>(n_preface))};
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double x) noexcept {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

LogisticObjective::LogisticObjective(std::span<const FeatureVector> features,
                                     std::span<const Label> labels, std::size_t dimension,
                                     ClassWeights weights, double l2_strength)
    : features_(features),
      labels_(labels),
      dimension_(dimension),
      weights_(weights),
      l2_strength_(l2_strength) {}

double LogisticObjective::margin(const FeatureVector& x, std::span<const double> params) const {
  double z = params[dimension_];
  for (const auto& [index, value] : x.entries) z += params[index] * value;
  return z;
}

double LogisticObjective::value(std::span<const double> params) const {
  double loss = 0.0;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const bool letter = labels_[i] == Label::Letter;
    const double y = letter ? 1.0 : -1.0;
    const double c = letter ? weights_.letter : weights_.preface;
    loss += c * softplus(-y * margin(features_[i], params));
  }
  if (std::isfinite(l2_strength_)) {
    double sq = 0.0;
    for (std::size_t j = 0; j < dimension_; ++j) sq += params[j] * params[j];
    loss += sq / (2.0 * l2_strength_);
  }
  return loss;
}

double LogisticObjective::value_and_gradient(std::span<const double> params,
                                             std::span<double> gradient) const {
  std::fill(gradient.begin(), gradient.end(), 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const bool letter = labels_[i] == Label::Letter;
    const double y = letter ? 1.0 : -1.0;
    const double c = letter ? weights_.letter : weights_.preface;
    const double m = -y * margin(features_[i], params);
    loss += c * softplus(m);
    // d softplus(-y z) / dz = -y * sigmoid(-y z)
    const double dz = -y * c * sigmoid(m);
    for (const auto& [index, value] : features_[i].entries) gradient[index] += dz * value;
    gradient[dimension_] += dz;
  }
  if (std::isfinite(l2_strength_)) {
    double sq = 0.0;
    for (std::size_t j = 0; j < dimension_; ++j) {
      sq += params[j] * params[j];
      gradient[j] += params[j] / l2_strength_;
    }
    loss += sq / (2.0 * l2_strength_);
  }
  return loss;
}

LogRegModel::LogRegModel(std::vector<double> weights, double bias, ClassWeights class_weights,
                         TrainConfig config, TrainDiagnostics diagnostics)
    : weights_(std::move(weights)),
      bias_(bias),
      class_weights_(class_weights),
      config_(config),
      diagnostics_(std::move(diagnostics)) {
  for (double w : weights_) {
    if (!std::isfinite(w)) throw DataError("model weights must be finite");
  }
  if (!std::isfinite(bias_)) throw DataError("model bias must be finite");
}

double LogRegModel::decision(const FeatureVector& x) const {
  double z = bias_;
  for (const auto& [index, value] : x.entries) {
    if (index >= weights_.size()) {
      throw DataError("feature index " + std::to_string(index) + " exceeds model dimension " +
                      std::to_string(weights_.size()));
    }
    z += weights_[index] * value;
  }
  return z;
}

Label LogRegModel::predict(const FeatureVector& x) const {
  return predict_proba(x) >= 0.5 ? Label::Letter : Label::Preface;
}

nlohmann::json LogRegModel::to_json() const {
  nlohmann::json config = {
      {"l2_strength", config_.l2_strength},
      {"balanced_weights", config_.balanced_weights},
      {"class_weight_scale", config_.class_weight_scale},
      {"max_iterations", config_.max_iterations},
      {"gradient_tolerance", config_.gradient_tolerance},
  };
  // JSON has no infinity.
  if (!std::isfinite(config_.l2_strength)) config["l2_strength"] = nullptr;
  return {
      {"format", kFormat},
      {"version", kVersion},
      {"config", std::move(config)},
      {"class_weights", {{"letter", class_weights_.letter}, {"preface", class_weights_.preface}}},
      {"bias", bias_},
      {"weights", weights_},
      {"diagnostics",
       {{"final_loss", diagnostics_.final_loss},
        {"iterations", diagnostics_.iterations},
        {"gradient_norm", diagnostics_.gradient_norm},
        {"converged", diagnostics_.converged}}},
  };
}

LogRegModel LogRegModel::from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kFormat) throw DataError("not a logreg model");
    if (doc.at("version").get<int>() != kVersion) throw DataError("unsupported logreg version");
    const auto& c = doc.at("config");
    TrainConfig config;
    config.l2_strength = c.at("l2_strength").is_null() ? std::numeric_limits<double>::infinity()
                                                       : c.at("l2_strength").get<double>();
    config.balanced_weights = c.at("balanced_weights").get<bool>();
    config.class_weight_scale = c.at("class_weight_scale").get<double>();
    config.max_iterations = c.at("max_iterations").get<int>();
    config.gradient_tolerance = c.at("gradient_tolerance").get<double>();
    const auto& d = doc.at("diagnostics");
    TrainDiagnostics diag;
    diag.final_loss = d.at("final_loss").get<double>();
    diag.iterations = d.at("iterations").get<int>();
    diag.gradient_norm = d.at("gradient_norm").get<double>();
    diag.converged = d.at("converged").get<bool>();
    const auto& cw = doc.at("class_weights");
    return LogRegModel(doc.at("weights").get<std::vector<double>>(), doc.at("bias").get<double>(),
                       {cw.at("letter").get<double>(), cw.at("preface").get<double>()}, config,
                       std::move(diag));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed logreg model: ") + e.what());
  }
}

LogRegModel train(std::span<const FeatureVector> features, std::span<const Label> labels,
                  std::size_t dimension, const TrainConfig& config) {
  config.validate();
  if (features.size() != labels.size()) {
    throw DataError("feature and label counts differ");
  }
  if (features.size() < 2) throw DataError("training needs at least two examples");
  const auto n_letter =
      static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::Letter));
  const std::size_t n_preface = labels.size() - n_letter;
  if (n_letter == 0 || n_preface == 0) {
    throw DataError("training data contains a single class");
  }
  for (const auto& x : features) {
    for (const auto& [index, value] : x.entries) {
      if (!std::isfinite(value)) throw DataError("non-finite feature value");
      if (index >= dimension) throw DataError("feature index exceeds dimension");
    }
  }

  ClassWeights weights = config.balanced_weights ? balanced_class_weights(n_letter, n_preface)
                                                 : ClassWeights{};
  weights.letter *= config.class_weight_scale;
  weights.preface *= config.class_weight_scale;

  const LogisticObjective objective(features, labels, dimension, weights, config.l2_strength);
  const std::size_t p = objective.parameter_count();
  std::vector<double> params(p, 0.0);
  std::vector<double> gradient(p, 0.0);
  std::vector<double> candidate(p, 0.0);

  TrainDiagnostics diag;
  double loss = objective.value_and_gradient(params, gradient);
  diag.loss_history.push_back(loss);
  double step = 1.0;
  while (true) {
    const double gnorm = norm2(gradient);
    diag.gradient_norm = gnorm;
    if (gnorm <= config.gradient_tolerance) {
      diag.converged = true;
      break;
    }
    if (diag.iterations >= config.max_iterations) break;

    const double decrease = kArmijo * gnorm * gnorm;
    double t = step;
    double candidate_loss = 0.0;
    bool accepted = false;
    while (t >= kMinStep) {
      for (std::size_t j = 0; j < p; ++j) candidate[j] = params[j] - t * gradient[j];
      candidate_loss = objective.value(candidate);
      if (candidate_loss <= loss - t * decrease) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // no representable descent step remains

    params.swap(candidate);
    loss = objective.value_and_gradient(params, gradient);
    diag.loss_history.push_back(loss);
    ++diag.iterations;
    step = t * 2.0;
  }
  diag.final_loss = loss;

  const double bias = params.back();
  params.pop_back();
  return LogRegModel(std::move(params), bias, weights, config, std::move(diag));
}

TopFeatures top_features(const LogRegModel& model, const TfidfModel& vocab, std::size_t k) {
  if (model.dimension() != vocab.dimension()) {
    throw DataError("model dimension " + std::to_string(model.dimension()) +
                    " does not match vocabulary size " + std::to_string(vocab.dimension()));
  }
  std::vector<std::size_t> positive;
  std::vector<std::size_t> negative;
  const auto& w = model.weights();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > 0.0) positive.push_back(i);
    if (w[i] < 0.0) negative.push_back(i);
  }
  auto ranked = [&](std::vector<std::size_t>& idx) {
    // Indices follow n-gram order, so index order breaks ties lexicographically.
    const std::size_t take = std::min(k, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double wa = std::abs(w[a]);
                        const double wb = std::abs(w[b]);
                        return wa != wb ? wa > wb : a < b;
                      });
    std::vector<WeightedNgram> out;
    for (std::size_t i = 0; i < take; ++i) out.push_back({vocab.ngram(idx[i]), w[idx[i]]});
    return out;
  };
  return {ranked(positive), ranked(negative)};
}

}  // namespace shuxu
