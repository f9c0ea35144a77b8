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

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ksyn/linalg.hpp"

namespace ksyn {

struct SvmOptions {
  double c = 1.0;
  int epochs = 200;
  std::uint64_t seed = 0;
};

/// Binary linear SVM over standardized features.
struct SvmModel {
  Vector weights;
  double bias = 0.0;
  std::string negative_label = "negative";
  std::string positive_label = "positive";
  Vector feature_mean;
  Vector feature_scale;
  /// Best primal objective after each epoch (non-increasing).
  std::vector<double> objective_trace;
};

struct Classification {
  std::string label;
  double score = 0.0;
};

/// Soft-margin linear SVM trained by seeded stochastic subgradient descent on
/// ½‖w‖² + C·Σ max(0, 1 − y(w·x̂ + b)). Labels are ±1.
SvmModel svm_train(const std::vector<Vector>& features, const std::vector<int>& labels, const SvmOptions& options,
                   std::string negative_label = "negative", std::string positive_label = "positive");

/// Primal objective of a model on (features, ±1 labels).
double svm_objective(const SvmModel& model, const std::vector<Vector>& features, const std::vector<int>& labels,
                     double c);

/// Score 0 falls to the positive class.
Classification svm_classify(const SvmModel& model, const Vector& feature);

/// One-vs-rest composition of binary models.
struct MulticlassSvm {
  std::vector<SvmModel> models;  // positive_label of each is its class
};

MulticlassSvm svm_train_multiclass(const std::vector<Vector>& features, const std::vector<std::string>& labels,
                                   const SvmOptions& options);

/// Class with the largest one-vs-rest score.
Classification svm_classify(const MulticlassSvm& model, const Vector& feature);

}  // namespace ksyn
