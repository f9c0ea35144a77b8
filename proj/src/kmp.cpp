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

#include "ksyn/kmp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ksyn/error.hpp"

namespace ksyn {

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::kExponential: return "Exponential";
    case KernelKind::kGaussian: return "Gaussian";
    case KernelKind::kCauchy: return "Cauchy";
  }
  return "Unknown";
}

KernelKind parse_kernel_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "exponential" || lower == "exp") return KernelKind::kExponential;
  if (lower == "gaussian" || lower == "gauss" || lower == "rbf") return KernelKind::kGaussian;
  if (lower == "cauchy") return KernelKind::kCauchy;
  throw Error(ErrorCode::kInvalidArgument, "unknown kernel kind '" + std::string(name) + "'");
}

KernelSpec::KernelSpec(KernelKind kind, double l, double s2, std::optional<double> alpha)
    : kind_(kind), length_scale_(l), sigma2_(s2), alpha_(alpha) {
  if (!(l > 0.0) || !std::isfinite(l)) throw Error(ErrorCode::kInvalidArgument, "kernel length scale must be > 0");
  if (!(s2 > 0.0) || !std::isfinite(s2)) throw Error(ErrorCode::kInvalidArgument, "kernel sigma2 must be > 0");
  if (kind == KernelKind::kCauchy) {
    if (!alpha || !(*alpha > 0.0) || !std::isfinite(*alpha)) {
      throw Error(ErrorCode::kInvalidArgument, "Cauchy kernel alpha must be > 0");
    }
  } else if (alpha) {
    throw Error(ErrorCode::kInvalidArgument, "alpha is only defined for the Cauchy kernel");
  }
}

KernelSpec KernelSpec::exponential(double length_scale, double sigma2) {
  return {KernelKind::kExponential, length_scale, sigma2, std::nullopt};
}

KernelSpec KernelSpec::gaussian(double length_scale, double sigma2) {
  return {KernelKind::kGaussian, length_scale, sigma2, std::nullopt};
}

KernelSpec KernelSpec::cauchy(double length_scale, double sigma2, double alpha) {
  return {KernelKind::kCauchy, length_scale, sigma2, alpha};
}

KernelSpec KernelSpec::make(KernelKind kind, double length_scale, double sigma2, double alpha) {
  return kind == KernelKind::kCauchy ? cauchy(length_scale, sigma2, alpha)
                                     : KernelSpec(kind, length_scale, sigma2, std::nullopt);
}

double kernel_eval(const KernelSpec& spec, double t1, double t2) {
  const double d = std::abs(t1 - t2);
  const double l = spec.length_scale();
  switch (spec.kind()) {
    case KernelKind::kExponential:
      return spec.sigma2() * std::exp(-d / l);
    case KernelKind::kGaussian:
      return spec.sigma2() * std::exp(-(d * d) / (2.0 * l * l));
    case KernelKind::kCauchy: {
      const double a = *spec.alpha();
      return spec.sigma2() * std::pow(1.0 + (d * d) / (2.0 * a * l * l), -a);
    }
  }
  return 0.0;
}

Matrix build_kernel_matrix(const KernelSpec& spec, const std::vector<double>& times, Eigen::Index dim) {
  if (times.empty()) throw Error(ErrorCode::kInvalidArgument, "kernel matrix needs at least one time");
  if (dim < 1) throw Error(ErrorCode::kDimensionMismatch, "kernel block dimension must be positive");
  const auto n = static_cast<Eigen::Index>(times.size());
  Matrix k = Matrix::Zero(n * dim, n * dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = kernel_eval(spec, times[static_cast<std::size_t>(i)], times[static_cast<std::size_t>(j)]);
      for (Eigen::Index s = 0; s < dim; ++s) {
        k(i * dim + s, j * dim + s) = v;
        k(j * dim + s, i * dim + s) = v;
      }
    }
  }
  return k;
}

namespace {

Eigen::LDLT<Matrix> factorize(const Matrix& a, const char* what) {
  Eigen::LDLT<Matrix> ldlt(a);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() * kMaxCondition >= 1.0)) {
    throw Error(ErrorCode::kSingularSystem, std::string(what) + " is ill-conditioned (condition estimate > 1e12)");
  }
  return ldlt;
}

/// Stacked k* contracted with a stacked vector: Σᵢ k(t*, tᵢ)·v_i.
Vector contract(const KmpModel& model, double t_star, const Vector& stacked) {
  const Eigen::Index s = model.dim();
  Vector out = Vector::Zero(s);
  const auto& times = model.reference().times;
  for (std::size_t i = 0; i < times.size(); ++i) {
    out += kernel_eval(model.kernel(), t_star, times[i]) * stacked.segment(static_cast<Eigen::Index>(i) * s, s);
  }
  return out;
}

void validate_via(const ViaPoint& via, Eigen::Index dim) {
  if (!std::isfinite(via.t_star)) throw Error(ErrorCode::kInvalidArgument, "via-point time must be finite");
  if (via.desired_e.size() != dim || via.desired_cov.rows() != dim || via.desired_cov.cols() != dim) {
    throw Error(ErrorCode::kDimensionMismatch, "via-point dimension does not match the reference");
  }
  if (!via.desired_cov.isApprox(via.desired_cov.transpose(), 1e-12)) {
    throw Error(ErrorCode::kInvalidArgument, "via-point covariance must be symmetric");
  }
  Eigen::LLT<Matrix> llt(via.desired_cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument, "via-point covariance must be positive definite");
  }
}

}  // namespace

KmpModel kmp_fit(const ReferenceTrajectory& reference, const KernelSpec& spec, double lambda,
                 MeanRegularizer mean_regularizer) {
  if (reference.size() == 0) throw Error(ErrorCode::kInvalidArgument, "reference trajectory is empty");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::kInvalidArgument, "lambda must be > 0");
  validate(reference);

  const Eigen::Index s = reference.dim();
  const auto n = static_cast<Eigen::Index>(reference.size());
  const Matrix k = build_kernel_matrix(spec, reference.times, s);

  Matrix sigma = Matrix::Zero(n * s, n * s);
  Vector mu(n * s);
  for (Eigen::Index i = 0; i < n; ++i) {
    sigma.block(i * s, i * s, s, s) = reference.covariances[static_cast<std::size_t>(i)];
    mu.segment(i * s, s) = reference.means[static_cast<std::size_t>(i)];
  }

  KmpModel model(spec, lambda, mean_regularizer, reference);
  const auto cov_system = factorize(k + lambda * sigma, "K + λΣ");
  model.cov_factor_ = cov_system.solve(Matrix::Identity(n * s, n * s));
  model.cov_factor_ = symmetrize(model.cov_factor_);
  if (mean_regularizer == MeanRegularizer::kCovariance) {
    model.mean_factor_ = cov_system.solve(mu);
  } else {
    model.mean_factor_ = factorize(k + lambda * Matrix::Identity(n * s, n * s), "K + λI").solve(mu);
  }
  return model;
}

SynergyPoint kmp_predict_mean(const KmpModel& model, double t_star) {
  return contract(model, t_star, model.mean_factor());
}

Matrix kmp_predict_cov(const KmpModel& model, double t_star) {
  const Eigen::Index s = model.dim();
  const auto& times = model.reference().times;
  const auto n = static_cast<Eigen::Index>(times.size());
  Vector kvals(n);
  for (Eigen::Index i = 0; i < n; ++i) kvals(i) = kernel_eval(model.kernel(), t_star, times[static_cast<std::size_t>(i)]);

  // k*(K+λΣ)⁻¹k*ᵀ block by block: each S×S block of the factor is scaled by kᵢkⱼ.
  Matrix quad = Matrix::Zero(s, s);
  const Matrix& c = model.cov_factor();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (kvals(i) == 0.0) continue;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (kvals(j) == 0.0) continue;
      quad += (kvals(i) * kvals(j)) * c.block(i * s, j * s, s, s);
    }
  }
  const double kss = kernel_eval(model.kernel(), t_star, t_star);
  const Matrix cov = (static_cast<double>(n) / model.lambda()) * (kss * Matrix::Identity(s, s) - quad);
  return symmetrize(cov);
}

ReferenceTrajectory kmp_predict(const KmpModel& model, const std::vector<double>& grid) {
  ReferenceTrajectory out;
  for (double t : grid) {
    out.times.push_back(t);
    out.means.push_back(kmp_predict_mean(model, t));
    out.covariances.push_back(kmp_predict_cov(model, t));
  }
  return out;
}

double default_via_radius(const ReferenceTrajectory& reference) {
  if (reference.size() < 2) return 0.0;
  double spacing = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < reference.size(); ++i) {
    spacing = std::min(spacing, reference.times[i] - reference.times[i - 1]);
  }
  return 0.5 * spacing;
}

ReferenceTrajectory insert_via_point(const ReferenceTrajectory& reference, const ViaPoint& via, double radius) {
  validate(reference);
  validate_via(via, reference.size() == 0 ? via.desired_e.size() : reference.dim());
  if (!(radius >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "via radius must be >= 0");

  ReferenceTrajectory out = reference;
  std::size_t nearest = out.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double d = std::abs(out.times[i] - via.t_star);
    if (d <= radius && d < best) {
      best = d;
      nearest = i;
    }
  }
  if (nearest < out.size()) {
    out.times[nearest] = via.t_star;
    out.means[nearest] = via.desired_e;
    out.covariances[nearest] = via.desired_cov;
  } else {
    out.times.push_back(via.t_star);
    out.means.push_back(via.desired_e);
    out.covariances.push_back(via.desired_cov);
  }

  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return out.times[a] < out.times[b]; });
  ReferenceTrajectory sorted;
  for (std::size_t i : order) {
    sorted.times.push_back(out.times[i]);
    sorted.means.push_back(out.means[i]);
    sorted.covariances.push_back(out.covariances[i]);
  }
  validate(sorted);
  return sorted;
}

ReferenceTrajectory insert_via_point(const ReferenceTrajectory& reference, const ViaPoint& via) {
  return insert_via_point(reference, via, default_via_radius(reference));
}

ReferenceTrajectory fuse_priorities(const std::vector<ReferenceTrajectory>& trajectories,
                                    const std::vector<std::vector<double>>& priorities) {
  if (trajectories.empty()) throw Error(ErrorCode::kInvalidArgument, "nothing to fuse");
  if (priorities.size() != trajectories.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one priority row per trajectory is required");
  }
  const ReferenceTrajectory& first = trajectories.front();
  const std::size_t n = first.size();
  const Eigen::Index s = first.dim();
  for (std::size_t d = 0; d < trajectories.size(); ++d) {
    validate(trajectories[d]);
    if (trajectories[d].size() != n || trajectories[d].dim() != s || priorities[d].size() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "trajectory " + std::to_string(d) + " does not share the grid");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(trajectories[d].times[i] - first.times[i]) > 1e-12) {
        throw Error(ErrorCode::kDimensionMismatch, "trajectory " + std::to_string(d) + " uses a different grid");
      }
      if (!(priorities[d][i] > 0.0)) throw Error(ErrorCode::kInvalidArgument, "priorities must be > 0");
    }
  }

  ReferenceTrajectory fused;
  fused.times = first.times;
  for (std::size_t i = 0; i < n; ++i) {
    Matrix precision = Matrix::Zero(s, s);
    Vector info = Vector::Zero(s);
    for (std::size_t d = 0; d < trajectories.size(); ++d) {
      Eigen::LLT<Matrix> llt(trajectories[d].covariances[i]);
      if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::kSingularCovariance,
                    "covariance of trajectory " + std::to_string(d) + " at point " + std::to_string(i));
      }
      const Matrix inv = llt.solve(Matrix::Identity(s, s));
      precision += priorities[d][i] * inv;
      info += priorities[d][i] * (inv * trajectories[d].means[i]);
    }
    Eigen::LLT<Matrix> fused_llt(symmetrize(precision));
    if (fused_llt.info() != Eigen::Success) {
      throw Error(ErrorCode::kSingularCovariance, "fused precision at point " + std::to_string(i));
    }
    const Matrix cov = symmetrize(fused_llt.solve(Matrix::Identity(s, s)));
    fused.means.push_back(cov * info);
    fused.covariances.push_back(cov);
  }
  return fused;
}

}  // namespace ksyn
