// Copyright 2026 The ksynergy Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ksyn/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "ksyn/error.hpp"

namespace ksyn {

namespace {

Vector standardize(const SvmModel& model, const Vector& x) {
  return (x - model.feature_mean).cwiseQuotient(model.feature_scale);
}

double decision(const SvmModel& model, const Vector& x_std) { return model.weights.dot(x_std) + model.bias; }

double objective_std(const Vector& w, double b, const std::vector<Vector>& xs, const std::vector<int>& ys, double c) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    hinge += std::max(0.0, 1.0 - ys[i] * (w.dot(xs[i]) + b));
  }
  return 0.5 * (w.squaredNorm() + b * b) + c * hinge;
}

}  // namespace

SvmModel svm_train(const std::vector<Vector>& features, const std::vector<int>& labels, const SvmOptions& options,
                   std::string negative_label, std::string positive_label) {
  if (features.empty() || features.size() != labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "features and labels must be non-empty and of equal length");
  }
  if (!(options.c > 0.0)) throw Error(ErrorCode::kInvalidArgument, "SVM penalty C must be > 0");
  if (options.epochs < 1) throw Error(ErrorCode::kInvalidArgument, "SVM epochs must be positive");
  const Eigen::Index dim = features.front().size();
  bool has_pos = false;
  bool has_neg = false;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != dim) throw Error(ErrorCode::kDimensionMismatch, "features differ in length");
    if (!features[i].allFinite()) throw Error(ErrorCode::kInvalidArgument, "features must be finite");
    if (labels[i] == 1) {
      has_pos = true;
    } else if (labels[i] == -1) {
      has_neg = true;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "labels must be +1 or -1");
    }
  }
  if (!has_pos || !has_neg) throw Error(ErrorCode::kSingleClass, "training data contains a single class");

  SvmModel model;
  model.negative_label = std::move(negative_label);
  model.positive_label = std::move(positive_label);
  const double n = static_cast<double>(features.size());
  model.feature_mean = Vector::Zero(dim);
  for (const auto& f : features) model.feature_mean += f;
  model.feature_mean /= n;
  model.feature_scale = Vector::Zero(dim);
  for (const auto& f : features) model.feature_scale += (f - model.feature_mean).cwiseAbs2();
  model.feature_scale = (model.feature_scale / n).cwiseSqrt();
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (!(model.feature_scale(j) > 0.0)) model.feature_scale(j) = 1.0;
  }

  std::vector<Vector> xs;
  xs.reserve(features.size());
  for (const auto& f : features) xs.push_back(standardize(model, f));

  // Pegasos on the equivalent objective λ/2‖(w,b)‖² + mean hinge, λ = 1/(C·n).
  const double lambda = 1.0 / (options.c * n);
  Vector w = Vector::Zero(dim);
  double b = 0.0;
  Vector best_w = w;
  double best_b = b;
  double best_obj = objective_std(w, b, xs, labels, options.c);

  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::uint64_t step = 0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      ++step;
      const double eta = 1.0 / (lambda * static_cast<double>(step));
      const double margin = labels[i] * (w.dot(xs[i]) + b);
      const double shrink = 1.0 - eta * lambda;
      w *= shrink;
      b *= shrink;
      if (margin < 1.0) {
        w += (eta * labels[i]) * xs[i];
        b += eta * labels[i];
      }
    }
    const double obj = objective_std(w, b, xs, labels, options.c);
    if (std::isfinite(obj) && obj < best_obj) {
      best_obj = obj;
      best_w = w;
      best_b = b;
    }
    model.objective_trace.push_back(best_obj);
  }
  model.weights = best_w;
  model.bias = best_b;
  return model;
}

double svm_objective(const SvmModel& model, const std::vector<Vector>& features, const std::vector<int>& labels,
                     double c) {
  std::vector<Vector> xs;
  for (const auto& f : features) xs.push_back(standardize(model, f));
  return objective_std(model.weights, model.bias, xs, labels, c);
}

Classification svm_classify(const SvmModel& model, const Vector& feature) {
  if (feature.size() != model.weights.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "feature has " + std::to_string(feature.size()) +
                                                   " entries, model expects " + std::to_string(model.weights.size()));
  }
  const double score = decision(model, standardize(model, feature));
  return {score >= 0.0 ? model.positive_label : model.negative_label, score};
}

MulticlassSvm svm_train_multiclass(const std::vector<Vector>& features, const std::vector<std::string>& labels,
                                   const SvmOptions& options) {
  if (features.size() != labels.size()) throw Error(ErrorCode::kDimensionMismatch, "features and labels differ");
  const std::set<std::string> classes(labels.begin(), labels.end());
  if (classes.size() < 2) throw Error(ErrorCode::kSingleClass, "training data contains a single class");
  MulticlassSvm out;
  std::uint64_t offset = 0;
  for (const auto& cls : classes) {
    std::vector<int> ys;
    ys.reserve(labels.size());
    for (const auto& l : labels) ys.push_back(l == cls ? 1 : -1);
    SvmOptions opts = options;
    opts.seed = options.seed + offset++;
    out.models.push_back(svm_train(features, ys, opts, "not-" + cls, cls));
  }
  return out;
}

Classification svm_classify(const MulticlassSvm& model, const Vector& feature) {
  if (model.models.empty()) throw Error(ErrorCode::kInvalidArgument, "multiclass model is empty");
  Classification best{"", -std::numeric_limits<double>::infinity()};
  for (const auto& m : model.models) {
    const Classification c = svm_classify(m, feature);
    if (c.score > best.score) best = {m.positive_label, c.score};
  }
  return best;
}

}  // namespace ksyn
