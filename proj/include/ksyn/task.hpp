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

#include <filesystem>
#include <string>
#include <vector>

#include "ksyn/classifier.hpp"
#include "ksyn/config.hpp"
#include "ksyn/force.hpp"
#include "ksyn/io.hpp"
#include "ksyn/kmp.hpp"
#include "ksyn/perception.hpp"

namespace ksyn {

/// Stage names in execution order.
const std::vector<std::string>& task_stages();

/// Contacts, stiffness, Jacobian and motor constants for grasping an object of
/// the given pose with a three-finger hand of `joints` joints.
GraspModel make_grasp_model(const ObjectPose& pose, double stiffness, double motor_constant,
                            Eigen::Index joints = kHandJoints);

/// External wrench the contacts must supply to hold an object of `mass` kg.
Vector holding_wrench(double mass);

/// Scenario coordinates (generator frame) expressed in a fitted basis.
SynergyPoint to_fitted_frame(const SynergyBasis& basis, const SynergyPoint& generator_coords);

struct TaskResult {
  /// Ordered stage records; see task_stages().
  Json log;

  std::vector<Demonstration> demos;
  SynergyBasis basis;
  GmmFitResult gmm;
  ReferenceTrajectory reference;  // GMR on the KMP reference grid
  ReferenceTrajectory actual;     // GMR on the prediction grid
  PointCloud cloud;
  RansacResult ransac;
  std::vector<Cluster> clusters;
  std::vector<ObjectPose> poses;
  MulticlassSvm classifier;
  std::vector<ViaPoint> via_points;
  ReferenceTrajectory prediction;
  std::vector<SynergyPoint> grasp_parts;
  std::vector<SynergyPoint> manipulation_parts;
  std::vector<JointConfiguration> joints;
  GraspModel grasp;
  ForceLoopResult force;

  /// Predicted distance to the manipulation end-point never increases during
  /// the manipulation phase.
  bool manipulation_monotone = false;
  /// Largest step-to-step increase of that distance (0 when monotone).
  double manipulation_max_regression = 0.0;
  bool all_stable = false;
  double final_grip = 0.0;
};

/// Runs the full pipeline: synergy basis, reference encoding, perception,
/// via-points, KMP adaptation, reconstruction, force loop, metrics. Failures
/// are rethrown as StageError naming the stage.
TaskResult run_task(const PipelineConfig& config);

/// Writes the task log and every artifact into `dir`.
void write_task_artifacts(const TaskResult& result, const std::filesystem::path& dir);

}  // namespace ksyn
