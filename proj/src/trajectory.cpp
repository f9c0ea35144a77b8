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

#include "ksyn/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "ksyn/error.hpp"

namespace ksyn {

namespace {

double log_sum_exp(const Vector& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

/// Cached Cholesky factor of one component for repeated density evaluation.
struct ComponentDensity {
  Vector mean;
  Eigen::LLT<Matrix> llt;
  double log_norm = 0.0;

  ComponentDensity(const Vector& mu, const Matrix& cov) : mean(mu), llt(cov) {
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::kDegenerateComponent, "component covariance is not positive definite");
    }
    const Matrix& l = llt.matrixLLT();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
    log_norm = -0.5 * (static_cast<double>(mu.size()) * std::log(2.0 * std::numbers::pi) + log_det);
  }

  double log_pdf(const Vector& x) const {
    const Vector z = llt.matrixL().solve(x - mean);
    return log_norm - 0.5 * z.squaredNorm();
  }
};

Matrix stack_samples(const std::vector<SynergyTrajectory>& trajectories) {
  std::size_t total = 0;
  Eigen::Index dim = -1;
  for (const auto& tr : trajectories) {
    if (tr.times.size() != tr.values.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "trajectory times and values differ in length");
    }
    for (const auto& v : tr.values) {
      if (dim < 0) dim = v.size();
      if (v.size() != dim) throw Error(ErrorCode::kDimensionMismatch, "trajectories mix synergy dimensions");
    }
    total += tr.size();
  }
  if (total == 0 || dim <= 0) throw Error(ErrorCode::kInvalidArgument, "no samples to fit");

  Matrix x(static_cast<Eigen::Index>(total), dim + 1);
  Eigen::Index row = 0;
  for (const auto& tr : trajectories) {
    for (std::size_t i = 0; i < tr.size(); ++i, ++row) {
      x(row, 0) = tr.times[i];
      x.row(row).tail(dim) = tr.values[i].transpose();
    }
  }
  if (!x.allFinite()) throw Error(ErrorCode::kInvalidArgument, "samples contain non-finite values");
  return x;
}

Matrix sample_covariance(const Matrix& x) {
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Matrix c = x.rowwise() - mean;
  return (c.transpose() * c) / static_cast<double>(std::max<Eigen::Index>(x.rows() - 1, 1));
}

/// k-means++ seeding: first center uniform, the rest drawn proportionally to
/// squared distance from the nearest chosen center.
std::vector<Eigen::Index> kmeans_pp_seeds(const Matrix& x, std::size_t k, std::mt19937_64& rng) {
  const Eigen::Index m = x.rows();
  std::vector<Eigen::Index> seeds;
  std::uniform_int_distribution<Eigen::Index> first(0, m - 1);
  seeds.push_back(first(rng));
  Vector d2 = (x.rowwise() - x.row(seeds.back())).rowwise().squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (seeds.size() < k) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      pick = m - 1;
      for (Eigen::Index i = 0; i < m; ++i) {
        acc += d2(i);
        if (acc >= target && d2(i) > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);
    }
    seeds.push_back(pick);
    d2 = d2.cwiseMin((x.rowwise() - x.row(pick)).rowwise().squaredNorm());
  }
  return seeds;
}

// Raises eigenvalues below the floor; untouched covariances keep the M-step exact.
Matrix floor_covariance(const Matrix& cov, double floor) {
  const Matrix sym = symmetrize(cov);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.eigenvalues().minCoeff() >= floor) return sym;
  const Vector clamped = es.eigenvalues().cwiseMax(floor);
  return symmetrize(es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose());
}

void m_step(const Matrix& x, const Matrix& resp, double floor, GmmModel& model) {
  const Eigen::Index m = x.rows();
  const std::size_t k = static_cast<std::size_t>(resp.cols());
  for (std::size_t n = 0; n < k; ++n) {
    const auto col = resp.col(static_cast<Eigen::Index>(n));
    const double nk = col.sum();
    if (!(nk > 1e-10)) {
      throw Error(ErrorCode::kDegenerateComponent, "component " + std::to_string(n) + " lost all support");
    }
    model.priors[n] = nk / static_cast<double>(m);
    const Vector mean = (x.transpose() * col) / nk;
    const Matrix centered = x.rowwise() - mean.transpose();
    model.means[n] = mean;
    model.covariances[n] = floor_covariance((centered.transpose() * col.asDiagonal() * centered) / nk, floor);
  }
  // Guard against accumulated rounding in the prior sum.
  double total = 0.0;
  for (double p : model.priors) total += p;
  for (double& p : model.priors) p /= total;
}

}  // namespace

std::vector<double> uniform_grid(std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {0.0};
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = static_cast<double>(i) / static_cast<double>(count - 1);
  return grid;
}

SynergyTrajectory resample(const SynergyTrajectory& trajectory, const std::vector<double>& grid) {
  const auto& t = trajectory.times;
  if (t.size() < 2 || trajectory.values.size() != t.size()) {
    throw Error(ErrorCode::kEmptyDemo, "trajectory needs at least 2 samples");
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw Error(ErrorCode::kNonMonotonicTime, "timestamps must strictly increase");
  }
  SynergyTrajectory out;
  out.times = grid;
  out.values.reserve(grid.size());
  for (double g : grid) {
    if (!(g >= t.front() && g <= t.back())) {
      throw Error(ErrorCode::kInvalidArgument, "grid time " + std::to_string(g) + " outside the trajectory span");
    }
    auto hi = std::upper_bound(t.begin(), t.end(), g);
    if (hi == t.end()) --hi;
    const std::size_t j = static_cast<std::size_t>(hi - t.begin());
    const double w = (g - t[j - 1]) / (t[j] - t[j - 1]);
    out.values.push_back((1.0 - w) * trajectory.values[j - 1] + w * trajectory.values[j]);
  }
  return out;
}

std::vector<SynergyTrajectory> interpolate_coefficients(const std::vector<Demonstration>& demos,
                                                        const SynergyBasis& basis,
                                                        const std::vector<double>& grid) {
  std::vector<SynergyTrajectory> out;
  out.reserve(demos.size());
  for (std::size_t d = 0; d < demos.size(); ++d) {
    const Demonstration& demo = demos[d];
    if (demo.times.size() < 2) {
      throw Error(ErrorCode::kEmptyDemo, "demonstration " + std::to_string(d) + " has fewer than 2 samples");
    }
    if (demo.postures.size() != demo.times.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "demonstration " + std::to_string(d) +
                                                     " has mismatched times and postures");
    }
    for (std::size_t i = 1; i < demo.times.size(); ++i) {
      if (!(demo.times[i] > demo.times[i - 1])) {
        throw Error(ErrorCode::kNonMonotonicTime, "demonstration " + std::to_string(d) +
                                                      " timestamps are not strictly increasing");
      }
    }
    SynergyTrajectory projected;
    const double t0 = demo.times.front();
    const double span = demo.times.back() - t0;
    for (std::size_t i = 0; i < demo.times.size(); ++i) {
      projected.times.push_back((demo.times[i] - t0) / span);
      projected.values.push_back(project(basis, demo.postures[i]));
    }
    // Normalization can leave the last stamp a hair off 1.
    projected.times.back() = 1.0;
    out.push_back(resample(projected, grid));
  }
  return out;
}

double gmm_log_likelihood(const GmmModel& model, const Matrix& samples) {
  std::vector<ComponentDensity> dens;
  for (std::size_t n = 0; n < model.components(); ++n) dens.emplace_back(model.means[n], model.covariances[n]);
  double ll = 0.0;
  Vector terms(static_cast<Eigen::Index>(model.components()));
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    const Vector x = samples.row(i).transpose();
    for (std::size_t n = 0; n < dens.size(); ++n) {
      terms(static_cast<Eigen::Index>(n)) = std::log(model.priors[n]) + dens[n].log_pdf(x);
    }
    ll += log_sum_exp(terms);
  }
  return ll;
}

GmmFitResult fit_gmm_traced(const std::vector<SynergyTrajectory>& trajectories, const GmmOptions& options) {
  if (options.components < 1) throw Error(ErrorCode::kInvalidArgument, "GMM needs at least one component");
  if (options.max_iter < 1) throw Error(ErrorCode::kInvalidArgument, "max_iter must be positive");
  const Matrix x = stack_samples(trajectories);
  const Eigen::Index m = x.rows();
  const Eigen::Index d = x.cols();
  const std::size_t k = options.components;
  if (static_cast<std::size_t>(m) < k * static_cast<std::size_t>(d + 1)) {
    throw Error(ErrorCode::kInvalidArgument, "need at least N·(S+2) samples: have " + std::to_string(m));
  }

  const Matrix data_cov = sample_covariance(x);
  const double floor = options.covariance_floor * data_cov.trace() / static_cast<double>(d);

  std::mt19937_64 rng(options.seed);
  const auto seeds = kmeans_pp_seeds(x, k, rng);

  // Hard assignment to the nearest seed gives the initial responsibilities.
  Matrix resp = Matrix::Zero(m, static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < k; ++n) {
      const double dist = (x.row(i) - x.row(seeds[n])).squaredNorm();
      if (dist < best_d) {
        best_d = dist;
        best = static_cast<Eigen::Index>(n);
      }
    }
    resp(i, best) = 1.0;
  }

  GmmFitResult result;
  GmmModel& model = result.model;
  model.priors.assign(k, 0.0);
  model.means.assign(k, Vector::Zero(d));
  model.covariances.assign(k, Matrix::Identity(d, d));
  for (std::size_t n = 0; n < k; ++n) {
    const auto col = resp.col(static_cast<Eigen::Index>(n));
    const double nk = col.sum();
    model.priors[n] = std::max(nk, 1.0) / static_cast<double>(m);
    if (nk >= 2.0) {
      model.means[n] = (x.transpose() * col) / nk;
      const Matrix centered = x.rowwise() - model.means[n].transpose();
      model.covariances[n] = floor_covariance((centered.transpose() * col.asDiagonal() * centered) / nk, floor);
    } else {
      model.means[n] = x.row(seeds[n]).transpose();
      model.covariances[n] = floor_covariance(data_cov, floor);
    }
  }
  double prior_total = 0.0;
  for (double p : model.priors) prior_total += p;
  for (double& p : model.priors) p /= prior_total;

  Vector terms(static_cast<Eigen::Index>(k));
  for (int iter = 0; iter < options.max_iter; ++iter) {
    std::vector<ComponentDensity> dens;
    dens.reserve(k);
    for (std::size_t n = 0; n < k; ++n) dens.emplace_back(model.means[n], model.covariances[n]);

    double ll = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const Vector xi = x.row(i).transpose();
      for (std::size_t n = 0; n < k; ++n) {
        terms(static_cast<Eigen::Index>(n)) = std::log(model.priors[n]) + dens[n].log_pdf(xi);
      }
      const double lse = log_sum_exp(terms);
      ll += lse;
      resp.row(i) = (terms.array() - lse).exp().transpose();
    }
    if (!std::isfinite(ll)) throw Error(ErrorCode::kDegenerateComponent, "log-likelihood became non-finite");
    result.log_likelihood.push_back(ll);
    result.iterations = iter;
    if (iter > 0 && ll - result.log_likelihood[result.log_likelihood.size() - 2] < options.tol) {
      result.converged = true;
      break;
    }
    m_step(x, resp, floor, model);
  }
  validate(model);
  return result;
}

GmmModel fit_gmm(const std::vector<SynergyTrajectory>& trajectories, const GmmOptions& options) {
  return fit_gmm_traced(trajectories, options).model;
}

Vector gmr_responsibilities(const GmmModel& model, double t) {
  const std::size_t k = model.components();
  Vector logw(static_cast<Eigen::Index>(k));
  for (std::size_t n = 0; n < k; ++n) {
    const double var = model.covariances[n](0, 0);
    const double diff = t - model.means[n](0);
    logw(static_cast<Eigen::Index>(n)) = std::log(model.priors[n]) - 0.5 * std::log(2.0 * std::numbers::pi * var) -
                                         0.5 * diff * diff / var;
  }
  const double lse = log_sum_exp(logw);
  return (logw.array() - lse).exp();
}

GaussianConditional gmr_condition(const GmmModel& model, double t) {
  const Eigen::Index s = model.output_dim();
  const Vector h = gmr_responsibilities(model, t);
  std::vector<Vector> cond_means;
  std::vector<Matrix> cond_covs;
  Vector mean = Vector::Zero(s);
  for (std::size_t n = 0; n < model.components(); ++n) {
    const Vector& mu = model.means[n];
    const Matrix& cov = model.covariances[n];
    const double var_t = cov(0, 0);
    const Vector cross = cov.block(1, 0, s, 1);
    cond_means.push_back(mu.tail(s) + cross * ((t - mu(0)) / var_t));
    cond_covs.push_back(cov.bottomRightCorner(s, s) - cross * cross.transpose() / var_t);
    mean += h(static_cast<Eigen::Index>(n)) * cond_means.back();
  }
  Matrix cov = Matrix::Zero(s, s);
  for (std::size_t n = 0; n < model.components(); ++n) {
    const Vector dm = cond_means[n] - mean;
    cov += h(static_cast<Eigen::Index>(n)) * (cond_covs[n] + dm * dm.transpose());
  }
  return {mean, symmetrize(cov)};
}

ReferenceTrajectory generate_reference(const GmmModel& model, const std::vector<double>& grid) {
  validate(model);
  ReferenceTrajectory ref;
  for (double t : grid) {
    if (!ref.times.empty() && !(t > ref.times.back())) {
      throw Error(ErrorCode::kNonMonotonicTime, "reference grid must strictly increase");
    }
    GaussianConditional c = gmr_condition(model, t);
    ref.times.push_back(t);
    ref.means.push_back(std::move(c.mean));
    ref.covariances.push_back(std::move(c.covariance));
  }
  return ref;
}

void validate(const GmmModel& model) {
  const std::size_t k = model.components();
  if (k == 0 || model.means.size() != k || model.covariances.size() != k) {
    throw Error(ErrorCode::kInvalidArgument, "GMM components are inconsistent");
  }
  double total = 0.0;
  const Eigen::Index d = model.means.front().size();
  if (d < 2) throw Error(ErrorCode::kDimensionMismatch, "GMM joint dimension must be at least 2");
  for (std::size_t n = 0; n < k; ++n) {
    if (!(model.priors[n] > 0.0)) throw Error(ErrorCode::kInvalidArgument, "GMM priors must be positive");
    total += model.priors[n];
    if (model.means[n].size() != d || model.covariances[n].rows() != d || model.covariances[n].cols() != d) {
      throw Error(ErrorCode::kDimensionMismatch, "GMM component dimensions differ");
    }
    Eigen::LLT<Matrix> llt(model.covariances[n]);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::kDegenerateComponent, "GMM covariance " + std::to_string(n) + " is not positive definite");
    }
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::kInvalidArgument, "GMM priors do not sum to 1");
}

void validate(const ReferenceTrajectory& reference) {
  const std::size_t n = reference.times.size();
  if (reference.means.size() != n || reference.covariances.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "reference trajectory fields differ in length");
  }
  const Eigen::Index s = reference.dim();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && !(reference.times[i] > reference.times[i - 1])) {
      throw Error(ErrorCode::kNonMonotonicTime, "reference times must strictly increase");
    }
    if (reference.means[i].size() != s || reference.covariances[i].rows() != s ||
        reference.covariances[i].cols() != s) {
      throw Error(ErrorCode::kDimensionMismatch, "reference point " + std::to_string(i) + " has wrong dimension");
    }
  }
}

}  // namespace ksyn
