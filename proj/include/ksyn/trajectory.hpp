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
#include <vector>

#include "ksyn/synergy.hpp"

namespace ksyn {

/// One demonstration: joint postures with their (unnormalized) timestamps.
struct Demonstration {
  std::vector<double> times;
  std::vector<JointConfiguration> postures;
};

/// Synergy coefficients sampled over normalized time.
struct SynergyTrajectory {
  std::vector<double> times;
  std::vector<SynergyPoint> values;

  std::size_t size() const { return times.size(); }
  Eigen::Index dim() const { return values.empty() ? 0 : values.front().size(); }
};

/// Mixture over the joint (t, e) space; input dimension 1, output dimension S.
struct GmmModel {
  std::vector<double> priors;
  std::vector<Vector> means;        // each of length 1 + S
  std::vector<Matrix> covariances;  // each (1 + S)×(1 + S)

  std::size_t components() const { return priors.size(); }
  Eigen::Index output_dim() const { return means.empty() ? 0 : means.front().size() - 1; }
};

struct GmmOptions {
  std::size_t components = 5;
  std::uint64_t seed = 0;
  int max_iter = 200;
  double tol = 1e-6;
  /// Lower bound on covariance eigenvalues, scaled by trace(data covariance)/D.
  double covariance_floor = 1e-6;
};

struct GmmFitResult {
  GmmModel model;
  /// Log-likelihood of the data under the parameters entering each E-step.
  std::vector<double> log_likelihood;
  int iterations = 0;
  bool converged = false;
};

/// Probabilistic reference: per grid time a mean and a covariance.
struct ReferenceTrajectory {
  std::vector<double> times;
  std::vector<SynergyPoint> means;
  std::vector<Matrix> covariances;

  std::size_t size() const { return times.size(); }
  Eigen::Index dim() const { return means.empty() ? 0 : means.front().size(); }
};

struct GaussianConditional {
  SynergyPoint mean;
  Matrix covariance;
};

/// Uniform grid of `count` points over [0, 1].
std::vector<double> uniform_grid(std::size_t count);

/// Projects every posture of every demonstration, normalizes its time span to
/// [0, 1] and resamples the coefficients linearly onto `grid`.
std::vector<SynergyTrajectory> interpolate_coefficients(const std::vector<Demonstration>& demos,
                                                        const SynergyBasis& basis,
                                                        const std::vector<double>& grid);

/// Same as above for coefficient sequences that are already in synergy space.
SynergyTrajectory resample(const SynergyTrajectory& trajectory, const std::vector<double>& grid);

GmmFitResult fit_gmm_traced(const std::vector<SynergyTrajectory>& trajectories, const GmmOptions& options);
GmmModel fit_gmm(const std::vector<SynergyTrajectory>& trajectories, const GmmOptions& options);

/// Log-likelihood of joint samples (each row: t, e...) under the model.
double gmm_log_likelihood(const GmmModel& model, const Matrix& samples);

/// h_n(t): responsibility of each component for input t.
Vector gmr_responsibilities(const GmmModel& model, double t);

/// Gaussian mixture regression of e given t.
GaussianConditional gmr_condition(const GmmModel& model, double t);

ReferenceTrajectory generate_reference(const GmmModel& model, const std::vector<double>& grid);

void validate(const GmmModel& model);
void validate(const ReferenceTrajectory& reference);

}  // namespace ksyn
