#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "shuxu/corpus.hpp"
#include "shuxu/tfidf.hpp"

namespace shuxu {

struct TrainConfig {
  // Inverse regularization: the penalty is ||w||^2 / (2 * l2_strength).
  // Must be positive; +infinity disables the penalty.
  double l2_strength = 1.0;
  bool balanced_weights = true;
  // Common factor applied to both class weights.
  double class_weight_scale = 1.0;
  int max_iterations = 1000;
  double gradient_tolerance = 1e-6;

  void validate() const;
};

struct ClassWeights {
  double letter = 1.0;
  double preface = 1.0;

  bool operator==(const ClassWeights&) const = default;
};

// n_total / (2 * n_class) for each class.
ClassWeights balanced_class_weights(std::size_t n_letter, std::size_t n_preface);

double sigmoid(double z) noexcept;
// log(1 + exp(x)) without overflow.
double softplus(double x) noexcept;

// Weighted, L2-regularized negative log-likelihood over sparse rows.
// Parameters are laid out as [w_0 .. w_{d-1}, bias]; the bias is not
// penalized. Letter is the y = +1 class.
class LogisticObjective {
 public:
  LogisticObjective(std::span<const FeatureVector> features, std::span<const Label> labels,
                    std::size_t dimension, ClassWeights weights, double l2_strength);

  std::size_t parameter_count() const noexcept { return dimension_ + 1; }
  double value(std::span<const double> params) const;
  // Writes the gradient into `gradient` and returns the value.
  double value_and_gradient(std::span<const double> params, std::span<double> gradient) const;

 private:
  double margin(const FeatureVector& x, std::span<const double> params) const;

  std::span<const FeatureVector> features_;
  std::span<const Label> labels_;
  std::size_t dimension_;
  ClassWeights weights_;
  double l2_strength_;
};

struct TrainDiagnostics {
  double final_loss = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
  std::vector<double> loss_history;  // loss after each accepted step, starting at zero weights
};

class LogRegModel {
 public:
  LogRegModel() = default;
  LogRegModel(std::vector<double> weights, double bias, ClassWeights class_weights,
              TrainConfig config, TrainDiagnostics diagnostics);

  const std::vector<double>& weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }
  const ClassWeights& class_weights() const noexcept { return class_weights_; }
  const TrainConfig& config() const noexcept { return config_; }
  const TrainDiagnostics& diagnostics() const noexcept { return diagnostics_; }
  std::size_t dimension() const noexcept { return weights_.size(); }

  // w.x + b. Throws DataError if x has an index outside the model.
  double decision(const FeatureVector& x) const;
  double predict_proba(const FeatureVector& x) const { return sigmoid(decision(x)); }
  // Letter iff probability >= 0.5.
  Label predict(const FeatureVector& x) const;

  nlohmann::json to_json() const;
  static LogRegModel from_json(const nlohmann::json& doc);

  bool operator==(const LogRegModel& other) const {
    return weights_ == other.weights_ && bias_ == other.bias_ &&
           class_weights_ == other.class_weights_;
  }

 private:
  std::vector<double> weights_;
  double bias_ = 0.0;
  ClassWeights class_weights_;
  TrainConfig config_;
  TrainDiagnostics diagnostics_;
};

// Full-batch gradient descent with Armijo backtracking from zero weights.
// Throws DataError on single-class input, length mismatch or non-finite
// feature values.
LogRegModel train(std::span<const FeatureVector> features, std::span<const Label> labels,
                  std::size_t dimension, const TrainConfig& config = {});

inline double predict_proba(const LogRegModel& model, const FeatureVector& x) {
  return model.predict_proba(x);
}

struct WeightedNgram {
  std::string ngram;
  double weight = 0.0;
};

struct TopFeatures {
  std::vector<WeightedNgram> letter;   // positive weights, |w| descending
  std::vector<WeightedNgram> preface;  // negative weights, |w| descending
};

// Throws DataError if the model and vocabulary dimensions differ.
TopFeatures top_features(const LogRegModel& model, const TfidfModel& vocab, std::size_t k);

}  // namespace shuxu
