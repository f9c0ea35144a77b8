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

#include <string>
#include <vector>

#include "ksyn/linalg.hpp"

namespace ksyn {

/// Joint angles of the hand in radians.
using JointConfiguration = Vector;
/// Coordinates inside the synergy subspace.
using SynergyPoint = Vector;

inline constexpr double kDefaultVarianceThreshold = 0.85;

/// Demonstrated postures centered on a nominal posture: row k is ϑ_k − θ₀.
class ConfigurationMatrix {
 public:
  /// Builds the matrix from raw postures. When `theta0` is empty the sample
  /// mean of the postures is used as the nominal posture.
  static ConfigurationMatrix from_postures(const std::vector<std::vector<double>>& postures,
                                           const std::vector<double>& theta0 = {});
  static ConfigurationMatrix from_postures(const std::vector<JointConfiguration>& postures,
                                           const JointConfiguration& theta0 = {});

  const Matrix& rows() const { return rows_; }
  const JointConfiguration& theta0() const { return theta0_; }
  Eigen::Index joint_dim() const { return rows_.cols(); }
  Eigen::Index count() const { return rows_.rows(); }

 private:
  ConfigurationMatrix(Matrix rows, JointConfiguration theta0)
      : rows_(std::move(rows)), theta0_(std::move(theta0)) {}

  Matrix rows_;
  JointConfiguration theta0_;
};

/// Orthonormal synergy directions (J×S), the posture they are anchored at, and
/// the variance fraction captured by each retained direction.
struct SynergyBasis {
  Matrix e_hat;
  JointConfiguration theta0;
  Vector variance_fractions;

  Eigen::Index joint_dim() const { return e_hat.rows(); }
  Eigen::Index synergy_dim() const { return e_hat.cols(); }
};

/// PCA over the sample covariance (divisor K−1). Keeps the smallest number
/// of leading components whose cumulative explained variance reaches
/// `variance_threshold`. Each column is sign-normalized so that its
/// largest-magnitude entry is positive.
SynergyBasis fit_synergy_basis(const ConfigurationMatrix& configs,
                               double variance_threshold = kDefaultVarianceThreshold);

/// Explained-variance fraction of every principal component, descending.
Vector explained_variance(const ConfigurationMatrix& configs);

/// e = Ê†(ϑ − θ₀).
SynergyPoint project(const SynergyBasis& basis, const JointConfiguration& posture);

/// ϑ = Ê e + θ₀.
JointConfiguration reconstruct(const SynergyBasis& basis, const SynergyPoint& e);

/// Grasp and manipulation addends summed before reconstruction.
JointConfiguration reconstruct(const SynergyBasis& basis, const SynergyPoint& grasp_part,
                               const SynergyPoint& manipulation_part);

}  // namespace ksyn
