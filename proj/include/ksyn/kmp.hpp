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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ksyn/trajectory.hpp"

namespace ksyn {

enum class KernelKind { kExponential, kGaussian, kCauchy };

std::string_view to_string(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view name);

inline constexpr double kDefaultLengthScale = 0.05;
inline constexpr double kDefaultSigma2 = 1.0;
inline constexpr double kDefaultAlpha = 1.0;
inline constexpr double kDefaultLambda = 1.0;

/// Stationary kernel over time. `alpha` is set for the Cauchy kernel only.
class KernelSpec {
 public:
  static KernelSpec exponential(double length_scale = kDefaultLengthScale, double sigma2 = kDefaultSigma2);
  static KernelSpec gaussian(double length_scale = kDefaultLengthScale, double sigma2 = kDefaultSigma2);
  static KernelSpec cauchy(double length_scale = kDefaultLengthScale, double sigma2 = kDefaultSigma2,
                           double alpha = kDefaultAlpha);
  /// Kind plus parameters; `alpha` is ignored unless kind is Cauchy.
  static KernelSpec make(KernelKind kind, double length_scale = kDefaultLengthScale,
                         double sigma2 = kDefaultSigma2, double alpha = kDefaultAlpha);

  KernelKind kind() const { return kind_; }
  double length_scale() const { return length_scale_; }
  double sigma2() const { return sigma2_; }
  std::optional<double> alpha() const { return alpha_; }

  bool operator==(const KernelSpec&) const = default;

 private:
  KernelSpec(KernelKind kind, double l, double s2, std::optional<double> alpha);

  KernelKind kind_;
  double length_scale_;
  double sigma2_;
  std::optional<double> alpha_;
};

/// Exponential  σ² exp(−|Δ|/l)
/// Gaussian     σ² exp(−Δ²/(2l²))
/// Cauchy       σ² (1 + Δ²/(2αl²))^(−α)
double kernel_eval(const KernelSpec& spec, double t1, double t2);

/// Block matrix with block (i, j) = k(tᵢ, tⱼ)·I_dim.
Matrix build_kernel_matrix(const KernelSpec& spec, const std::vector<double>& times, Eigen::Index dim);

/// Which regularizer enters the mean system. `kCovariance` solves
/// (K + λΣ)⁻¹μ so low-variance points (via-points) are tracked tightly;
/// `kIdentity` is the (K + λI)⁻¹μ form.
enum class MeanRegularizer { kCovariance, kIdentity };

inline constexpr double kMaxCondition = 1e12;

/// Fitted kernelized movement primitive. Immutable; predictions are const and
/// safe to call concurrently.
class KmpModel {
 public:
  const KernelSpec& kernel() const { return kernel_; }
  double lambda() const { return lambda_; }
  MeanRegularizer mean_regularizer() const { return mean_regularizer_; }
  const ReferenceTrajectory& reference() const { return reference_; }
  /// Stacked (K + λ·R)⁻¹μ, length N·S.
  const Vector& mean_factor() const { return mean_factor_; }
  /// (K + λΣ)⁻¹, size N·S square.
  const Matrix& cov_factor() const { return cov_factor_; }
  std::size_t size() const { return reference_.size(); }
  Eigen::Index dim() const { return reference_.dim(); }

 private:
  friend KmpModel kmp_fit(const ReferenceTrajectory&, const KernelSpec&, double, MeanRegularizer);
  KmpModel(KernelSpec kernel, double lambda, MeanRegularizer reg, ReferenceTrajectory reference)
      : kernel_(std::move(kernel)), lambda_(lambda), mean_regularizer_(reg), reference_(std::move(reference)) {}

  KernelSpec kernel_;
  double lambda_;
  MeanRegularizer mean_regularizer_;
  ReferenceTrajectory reference_;
  Vector mean_factor_;
  Matrix cov_factor_;
};

KmpModel kmp_fit(const ReferenceTrajectory& reference, const KernelSpec& spec, double lambda = kDefaultLambda,
                 MeanRegularizer mean_regularizer = MeanRegularizer::kCovariance);

SynergyPoint kmp_predict_mean(const KmpModel& model, double t_star);

/// (N/λ)(k(t*,t*)·I − k*(K + λΣ)⁻¹k*ᵀ)
Matrix kmp_predict_cov(const KmpModel& model, double t_star);

/// Mean and covariance on a grid.
ReferenceTrajectory kmp_predict(const KmpModel& model, const std::vector<double>& grid);

/// Desired (time, value, confidence) constraint for adaptation.
struct ViaPoint {
  double t_star = 0.0;
  SynergyPoint desired_e;
  Matrix desired_cov;
};

/// Half the smallest spacing between consecutive reference times (0 when the
/// reference has fewer than two points).
double default_via_radius(const ReferenceTrajectory& reference);

/// Replaces the nearest reference point within `radius` of the via time, or
/// inserts the via-point keeping times sorted.
ReferenceTrajectory insert_via_point(const ReferenceTrajectory& reference, const ViaPoint& via, double radius);
ReferenceTrajectory insert_via_point(const ReferenceTrajectory& reference, const ViaPoint& via);

/// Per grid point product of Gaussians N(μ_d, Σ_d/Υ_d). `priorities[d][n]`
/// weights trajectory d at point n.
ReferenceTrajectory fuse_priorities(const std::vector<ReferenceTrajectory>& trajectories,
                                    const std::vector<std::vector<double>>& priorities);

}  // namespace ksyn
