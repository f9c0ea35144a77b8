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

#include "ksyn/synergy.hpp"

#include <cmath>
#include <string>

#include "ksyn/error.hpp"

namespace ksyn {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " has non-finite entries");
}

struct Spectrum {
  Vector values;   // descending
  Matrix vectors;  // matching columns
};

Spectrum covariance_spectrum(const ConfigurationMatrix& configs) {
  const Matrix& c = configs.rows();
  const Eigen::RowVectorXd mean = c.colwise().mean();
  const Matrix centered = c.rowwise() - mean;
  const Matrix cov = (centered.transpose() * centered) / static_cast<double>(c.rows() - 1);

  const double scale = 1.0 + c.cwiseAbs2().maxCoeff();
  if (cov.trace() <= 1e-24 * scale) {
    throw Error(ErrorCode::kZeroVariance, "all demonstrations are identical");
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(cov));
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kZeroVariance, "eigen-decomposition of the configuration covariance failed");
  }
  // Eigen returns ascending order.
  Spectrum s;
  s.values = es.eigenvalues().reverse().cwiseMax(0.0);
  s.vectors = es.eigenvectors().rowwise().reverse();
  return s;
}

}  // namespace

ConfigurationMatrix ConfigurationMatrix::from_postures(const std::vector<std::vector<double>>& postures,
                                                       const std::vector<double>& theta0) {
  if (postures.empty()) throw Error(ErrorCode::kInvalidArgument, "no postures supplied");
  const std::size_t joints = postures.front().size();
  std::vector<JointConfiguration> rows;
  rows.reserve(postures.size());
  for (std::size_t k = 0; k < postures.size(); ++k) {
    if (postures[k].size() != joints) {
      throw Error(ErrorCode::kDimensionMismatch, "posture " + std::to_string(k) + " has " +
                                                     std::to_string(postures[k].size()) + " joints, expected " +
                                                     std::to_string(joints));
    }
    rows.push_back(to_vector(postures[k]));
  }
  return from_postures(rows, theta0.empty() ? JointConfiguration{} : to_vector(theta0));
}

ConfigurationMatrix ConfigurationMatrix::from_postures(const std::vector<JointConfiguration>& postures,
                                                       const JointConfiguration& theta0) {
  if (postures.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "configuration matrix needs at least 2 demonstrations");
  }
  const Eigen::Index joints = postures.front().size();
  if (joints == 0) throw Error(ErrorCode::kDimensionMismatch, "postures have zero joints");
  Matrix rows(static_cast<Eigen::Index>(postures.size()), joints);
  for (std::size_t k = 0; k < postures.size(); ++k) {
    if (postures[k].size() != joints) {
      throw Error(ErrorCode::kDimensionMismatch, "posture " + std::to_string(k) + " has " +
                                                     std::to_string(postures[k].size()) + " joints, expected " +
                                                     std::to_string(joints));
    }
    rows.row(static_cast<Eigen::Index>(k)) = postures[k].transpose();
  }
  require_finite(rows, "posture");

  JointConfiguration nominal = theta0;
  if (nominal.size() == 0) {
    nominal = rows.colwise().mean().transpose();
  } else if (nominal.size() != joints) {
    throw Error(ErrorCode::kDimensionMismatch, "theta0 length does not match joint count");
  }
  require_finite(nominal, "theta0");
  rows.rowwise() -= nominal.transpose();
  return ConfigurationMatrix(std::move(rows), std::move(nominal));
}

Vector explained_variance(const ConfigurationMatrix& configs) {
  const Spectrum s = covariance_spectrum(configs);
  return s.values / s.values.sum();
}

SynergyBasis fit_synergy_basis(const ConfigurationMatrix& configs, double variance_threshold) {
  if (!(variance_threshold > 0.0 && variance_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "variance_threshold must lie in (0, 1]");
  }
  const Spectrum s = covariance_spectrum(configs);
  const Vector fractions = s.values / s.values.sum();

  Eigen::Index keep = 0;
  double cumulative = 0.0;
  while (keep < fractions.size()) {
    cumulative += fractions(keep);
    ++keep;
    // Tolerance so that a threshold of exactly 1.0 is reachable despite rounding.
    if (cumulative >= variance_threshold - 1e-12) break;
  }

  SynergyBasis basis;
  basis.e_hat = s.vectors.leftCols(keep);
  for (Eigen::Index j = 0; j < keep; ++j) {
    Eigen::Index arg = 0;
    basis.e_hat.col(j).cwiseAbs().maxCoeff(&arg);
    if (basis.e_hat(arg, j) < 0.0) basis.e_hat.col(j) *= -1.0;
  }
  // Anchor at the centroid of the demonstrations so projection is consistent
  // with the centered PCA.
  basis.theta0 = configs.theta0() + configs.rows().colwise().mean().transpose();
  basis.variance_fractions = fractions.head(keep);
  return basis;
}

SynergyPoint project(const SynergyBasis& basis, const JointConfiguration& posture) {
  if (posture.size() != basis.joint_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "posture has " + std::to_string(posture.size()) +
                                                   " joints, basis expects " + std::to_string(basis.joint_dim()));
  }
  // Orthonormal columns: the pseudo-inverse is the transpose.
  return basis.e_hat.transpose() * (posture - basis.theta0);
}

JointConfiguration reconstruct(const SynergyBasis& basis, const SynergyPoint& e) {
  if (e.size() != basis.synergy_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "synergy point has " + std::to_string(e.size()) +
                                                   " coordinates, basis has " + std::to_string(basis.synergy_dim()));
  }
  return basis.e_hat * e + basis.theta0;
}

JointConfiguration reconstruct(const SynergyBasis& basis, const SynergyPoint& grasp_part,
                               const SynergyPoint& manipulation_part) {
  if (grasp_part.size() != manipulation_part.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "grasp and manipulation addends differ in length");
  }
  return reconstruct(basis, SynergyPoint(grasp_part + manipulation_part));
}

}  // namespace ksyn
