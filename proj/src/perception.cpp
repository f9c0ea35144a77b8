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

#include "ksyn/perception.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>

#include "ksyn/error.hpp"

namespace ksyn {

PointCloud PointCloud::select(const std::vector<std::size_t>& indices) const {
  PointCloud out;
  out.points.reserve(indices.size());
  for (std::size_t i : indices) out.points.push_back(points.at(i));
  return out;
}

namespace {

/// Plane through three points, or nothing when they are (nearly) collinear.
std::optional<PlaneModel> plane_through(const Point3& a, const Point3& b, const Point3& c) {
  const Eigen::Vector3d u = b - a;
  const Eigen::Vector3d v = c - a;
  Eigen::Vector3d n = u.cross(v);
  const double norm = n.norm();
  if (!(norm > 1e-9 * u.norm() * v.norm()) || norm == 0.0) return std::nullopt;
  n /= norm;
  Eigen::Index arg = 0;
  n.cwiseAbs().maxCoeff(&arg);
  if (n(arg) < 0.0) n = -n;
  return PlaneModel{n, -n.dot(a)};
}

std::size_t count_inliers(const PointCloud& cloud, const PlaneModel& plane, double threshold) {
  std::size_t count = 0;
  for (const auto& p : cloud.points) {
    if (plane.distance(p) <= threshold) ++count;
  }
  return count;
}

/// Deterministic fallback: first point, farthest point from it, and the point
/// farthest from the line through both.
std::optional<PlaneModel> spread_triple_plane(const PointCloud& cloud) {
  const auto& pts = cloud.points;
  const Point3& a = pts.front();
  std::size_t ib = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = (pts[i] - a).squaredNorm();
    if (d > best) {
      best = d;
      ib = i;
    }
  }
  const Eigen::Vector3d dir = pts[ib] - a;
  if (!(dir.squaredNorm() > 0.0)) return std::nullopt;
  std::size_t ic = 0;
  best = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = dir.cross(pts[i] - a).squaredNorm();
    if (d > best) {
      best = d;
      ic = i;
    }
  }
  return plane_through(a, pts[ib], pts[ic]);
}

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 73856093ULL;
    h ^= static_cast<std::uint64_t>(k.y) * 19349663ULL;
    h ^= static_cast<std::uint64_t>(k.z) * 83492791ULL;
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

RansacResult ransac_plane(const PointCloud& cloud, int iterations, double inlier_threshold, std::uint64_t seed) {
  if (cloud.size() < 3) throw Error(ErrorCode::kDegenerateCloud, "RANSAC needs at least 3 points");
  if (iterations < 1) throw Error(ErrorCode::kInvalidArgument, "RANSAC iterations must be positive");
  if (!(inlier_threshold > 0.0)) throw Error(ErrorCode::kInvalidArgument, "inlier threshold must be > 0");

  RansacResult result;
  std::optional<PlaneModel> best;
  std::size_t best_count = 0;
  auto consider = [&](const PlaneModel& plane) {
    const std::size_t count = count_inliers(cloud, plane, inlier_threshold);
    result.candidate_inlier_counts.push_back(count);
    if (!best || count > best_count) {
      best = plane;
      best_count = count;
    }
  };

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, cloud.size() - 1);
  for (int it = 0; it < iterations; ++it) {
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    std::size_t k = pick(rng);
    if (i == j || j == k || i == k) continue;
    if (auto plane = plane_through(cloud.points[i], cloud.points[j], cloud.points[k])) consider(*plane);
  }
  if (!best) {
    auto plane = spread_triple_plane(cloud);
    if (!plane) throw Error(ErrorCode::kDegenerateCloud, "no non-collinear point triple in the cloud");
    consider(*plane);
  }

  result.plane = *best;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    (result.plane.distance(cloud.points[i]) <= inlier_threshold ? result.inliers : result.outliers).push_back(i);
  }
  return result;
}

std::vector<Cluster> euclidean_cluster(const PointCloud& cloud, double epsilon, std::size_t min_points) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be > 0");
  if (min_points < 1) throw Error(ErrorCode::kInvalidArgument, "min_points must be >= 1");
  const auto& pts = cloud.points;
  const std::size_t n = pts.size();
  const double eps2 = epsilon * epsilon;

  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> grid;
  const bool use_grid = n > kBruteForceNeighborLimit;
  auto cell_of = [&](const Point3& p) {
    return CellKey{static_cast<std::int64_t>(std::floor(p.x() / epsilon)),
                   static_cast<std::int64_t>(std::floor(p.y() / epsilon)),
                   static_cast<std::int64_t>(std::floor(p.z() / epsilon))};
  };
  if (use_grid) {
    for (std::size_t i = 0; i < n; ++i) grid[cell_of(pts[i])].push_back(i);
  }

  std::vector<char> visited(n, 0);
  std::vector<std::size_t> neighbors;
  auto collect_neighbors = [&](std::size_t i) {
    neighbors.clear();
    if (!use_grid) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!visited[j] && (pts[j] - pts[i]).squaredNorm() <= eps2) neighbors.push_back(j);
      }
      return;
    }
    const CellKey c = cell_of(pts[i]);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          auto it = grid.find(CellKey{c.x + dx, c.y + dy, c.z + dz});
          if (it == grid.end()) continue;
          for (std::size_t j : it->second) {
            if (!visited[j] && (pts[j] - pts[i]).squaredNorm() <= eps2) neighbors.push_back(j);
          }
        }
      }
    }
  };

  std::vector<Cluster> clusters;
  std::deque<std::size_t> frontier;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (visited[seed]) continue;
    visited[seed] = 1;
    std::vector<std::size_t> members{seed};
    frontier.assign(1, seed);
    while (!frontier.empty()) {
      const std::size_t i = frontier.front();
      frontier.pop_front();
      collect_neighbors(i);
      for (std::size_t j : neighbors) {
        visited[j] = 1;
        members.push_back(j);
        frontier.push_back(j);
      }
    }
    if (members.size() < min_points) continue;
    std::sort(members.begin(), members.end());
    Cluster cl;
    cl.indices = std::move(members);
    cl.points.reserve(cl.indices.size());
    for (std::size_t i : cl.indices) cl.points.push_back(pts[i]);
    clusters.push_back(std::move(cl));
  }
  std::stable_sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.indices.front() < b.indices.front();
  });
  return clusters;
}

Vector extract_features(const Cluster& cluster) {
  if (cluster.points.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot featurize an empty cluster");
  Eigen::Vector3d lo = cluster.points.front();
  Eigen::Vector3d hi = lo;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : cluster.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
    mean += p;
  }
  const double count = static_cast<double>(cluster.points.size());
  mean /= count;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : cluster.points) cov += (p - mean) * (p - mean).transpose();
  cov /= count;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov, Eigen::EigenvaluesOnly);
  const Eigen::Vector3d ev = es.eigenvalues().reverse().cwiseMax(0.0);

  Vector f(kFeatureDim);
  f << hi - lo, ev, count;
  return f;
}

Vector ObjectPose::as_vector() const {
  Vector v(6);
  v << centroid, extents;
  return v;
}

ObjectPose estimate_pose(const Cluster& cluster, const std::string& label, double score) {
  if (cluster.points.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot estimate the pose of an empty cluster");
  ObjectPose pose;
  Eigen::Vector3d lo = cluster.points.front();
  Eigen::Vector3d hi = lo;
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& p : cluster.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
    sum += p;
  }
  pose.centroid = sum / static_cast<double>(cluster.points.size());
  pose.extents = hi - lo;
  pose.label = label;
  pose.score = score;
  return pose;
}

ViaPoint pose_to_synergy(const Vector& pose, const SynergyMappingParams& params, const SynergyBasis& basis,
                         double t_star, double variance) {
  const Eigen::Index j = basis.joint_dim();
  if (params.motion_transfer.rows() != pose.size() || params.motion_transfer.cols() != j) {
    throw Error(ErrorCode::kDimensionMismatch, "motion transfer matrix must be " + std::to_string(pose.size()) + "x" +
                                                   std::to_string(j));
  }
  if (params.compliance.rows() != j || params.compliance.cols() != j) {
    throw Error(ErrorCode::kDimensionMismatch, "compliance matrix must be " + std::to_string(j) + "x" +
                                                   std::to_string(j));
  }
  if (!(variance > 0.0)) throw Error(ErrorCode::kInvalidArgument, "via-point variance must be > 0");
  const Matrix transfer_pinv = checked_pinv(params.motion_transfer, "motion transfer matrix");
  const Vector joint_offset = params.compliance * (transfer_pinv * pose);
  ViaPoint via;
  via.t_star = t_star;
  via.desired_e = basis.e_hat.transpose() * joint_offset;
  via.desired_cov = variance * Matrix::Identity(basis.synergy_dim(), basis.synergy_dim());
  return via;
}

ViaPoint pose_to_synergy(const ObjectPose& pose, const SynergyMappingParams& params, const SynergyBasis& basis,
                         double t_star, double variance) {
  return pose_to_synergy(pose.as_vector(), params, basis, t_star, variance);
}

}  // namespace ksyn
