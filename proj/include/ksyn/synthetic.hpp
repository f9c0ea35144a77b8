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
#include <vector>

#include "ksyn/evaluation.hpp"
#include "ksyn/perception.hpp"
#include "ksyn/trajectory.hpp"

namespace ksyn {

/// Waypoints and force band of one manipulation task. Synergy coordinates are
/// in the generator frame.
struct TaskScenario {
  std::string task;
  std::string grasp_label;
  std::string place_label;
  /// Open-hand coordinates the approach starts from.
  Vector preshape;
  Vector grasp_coords;
  Vector manipulation_start;
  Vector manipulation_end;
  double mu = 0.0;
  double grip_lower = 0.0;
  double grip_upper = 0.0;
  double mass = 0.0;  // kg
  double grasp_time = 0.35;
  double release_time = 0.5;
  double manipulation_start_time = 0.6;
  double manipulation_end_time = 0.9;
};

/// Built-in scenarios: "egg" and "ketchup". Throws UnknownTask otherwise.
TaskScenario task_scenario(const std::string& task);
std::vector<std::string> task_names();

inline constexpr Eigen::Index kHandJoints = 6;

/// Orthonormal J×2 directions and nominal posture used to synthesize hand
/// motion.
Matrix generator_directions();
JointConfiguration generator_theta0();

/// Noise-free synergy coefficients of the scenario at normalized time t.
SynergyPoint scenario_coefficients(const TaskScenario& scenario, double t);

struct DemoTruth {
  Matrix directions;
  JointConfiguration theta0;
  std::vector<double> times;  // normalized
  std::vector<SynergyPoint> coefficients;
};

struct DemoSet {
  std::vector<Demonstration> demos;
  DemoTruth truth;
};

/// `count` demonstrations of `samples` postures over `duration` seconds with
/// additive joint noise of standard deviation `noise` radians.
DemoSet generate_synthetic_demos(const TaskScenario& scenario, std::size_t count, double noise, std::uint64_t seed,
                                 std::size_t samples = 101, double duration = 4.0);
DemoSet generate_synthetic_demos(const std::string& task, std::size_t count, double noise, std::uint64_t seed);

struct ObjectAnnotation {
  std::string label;
  Point3 centroid = Point3::Zero();
  Eigen::Vector3d extents = Eigen::Vector3d::Zero();
  std::size_t size = 0;
};

struct SyntheticScene {
  PointCloud cloud;
  std::vector<std::size_t> plane_indices;
  std::vector<std::vector<std::size_t>> object_indices;
  /// Centroid and extents of the noise-free object surfaces.
  std::vector<ObjectAnnotation> objects;
};

std::vector<std::string> object_labels();

/// Visible surface samples of a labeled object resting on z = 0 at `base`
/// (x, y), uniformly scaled. Throws InvalidArgument for unknown labels.
std::vector<Point3> object_surface(const std::string& label, const Eigen::Vector2d& base, double scale = 1.0);

/// Table plane plus the task's two objects. Placement is jittered by the seed;
/// `noise` is the per-coordinate sensor noise in meters.
SyntheticScene generate_synthetic_scene(const std::string& task, std::uint64_t seed, double noise = 0.001);

/// Annotations of the unjittered, noise-free scene.
std::vector<ObjectAnnotation> nominal_objects(const std::string& task);

struct LabeledFeatures {
  std::vector<Vector> features;
  std::vector<std::string> labels;
};

/// Features of randomly scaled, noisy instances of every object label.
LabeledFeatures svm_training_set(std::size_t per_class, std::uint64_t seed, double noise = 0.001);

struct KernelBenchmark {
  ReferenceTrajectory reference;
  std::vector<ObjectInstance> instances;
};

struct KernelBenchmarkOptions {
  std::size_t reference_points = 11;
  std::size_t evaluation_points = 201;
  std::vector<double> via_times{0.25, 0.5, 0.75, 1.0};
  double via_variance = 1e-6;
  std::size_t demos = 6;
  double noise = 0.003;
  std::size_t gmm_components = 8;
};

/// Three-object adaptation benchmark: the reference is the GMR of a base
/// motion; every object carries the GMR of its own demonstrations as the
/// actual trajectory and via-points sampled from it.
KernelBenchmark make_kernel_benchmark(std::uint64_t seed, const KernelBenchmarkOptions& options = {});

}  // namespace ksyn
