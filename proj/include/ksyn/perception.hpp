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

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ksyn/kmp.hpp"
#include "ksyn/synergy.hpp"

namespace ksyn {

using Point3 = Eigen::Vector3d;

struct PointCloud {
  std::vector<Point3> points;

  std::size_t size() const { return points.size(); }
  /// Sub-cloud of the given indices, in index order.
  PointCloud select(const std::vector<std::size_t>& indices) const;
};

/// ax + by + cz + d = 0 with a unit normal.
struct PlaneModel {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double d = 0.0;

  double distance(const Point3& p) const { return std::abs(normal.dot(p) + d); }
};

struct RansacResult {
  PlaneModel plane;
  std::vector<std::size_t> inliers;
  std::vector<std::size_t> outliers;
  /// Inlier count of every candidate plane that was scored, in sampling order.
  std::vector<std::size_t> candidate_inlier_counts;
};

/// Plane with the most inliers among planes through randomly sampled
/// non-collinear triples. Deterministic for a given seed.
RansacResult ransac_plane(const PointCloud& cloud, int iterations, double inlier_threshold, std::uint64_t seed);

/// Connected component of the ε-neighbor graph. Members are sorted ascending
/// and carry a copy of their coordinates.
struct Cluster {
  std::vector<std::size_t> indices;
  std::vector<Point3> points;

  std::size_t size() const { return indices.size(); }
};

/// Clouds up to this size use the all-pairs neighbor search.
inline constexpr std::size_t kBruteForceNeighborLimit = 2000;

/// Euclidean clustering: points closer than or equal to ε are linked;
/// components with fewer than `min_points` members are dropped. Clusters are
/// ordered by descending size, then by smallest member index.
std::vector<Cluster> euclidean_cluster(const PointCloud& cloud, double epsilon, std::size_t min_points);

inline constexpr Eigen::Index kFeatureDim = 7;

/// Bounding-box extents (3), covariance eigenvalues descending (3), count (1).
Vector extract_features(const Cluster& cluster);

struct ObjectPose {
  Point3 centroid = Point3::Zero();
  Eigen::Vector3d extents = Eigen::Vector3d::Zero();
  std::string label;
  double score = 0.0;

  /// (centroid, extents) as the 6-vector consumed by pose_to_synergy.
  Vector as_vector() const;
};

ObjectPose estimate_pose(const Cluster& cluster, const std::string& label, double score = 0.0);

/// Hand compliance (J×J) and motion transfer (6×J) matrices.
struct SynergyMappingParams {
  Matrix compliance;
  Matrix motion_transfer;
};

/// e_O = Ê†·C_h·A_m†·O_p, returned as a via-point at `t_star` with covariance
/// `variance`·I.
ViaPoint pose_to_synergy(const Vector& pose, const SynergyMappingParams& params, const SynergyBasis& basis,
                         double t_star, double variance);
ViaPoint pose_to_synergy(const ObjectPose& pose, const SynergyMappingParams& params, const SynergyBasis& basis,
                         double t_star, double variance);

}  // namespace ksyn
