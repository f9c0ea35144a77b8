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

#include "ksyn/task.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "ksyn/error.hpp"
#include "ksyn/evaluation.hpp"
#include "ksyn/synthetic.hpp"

namespace ksyn {

namespace {

constexpr double kGravity = 9.81;

template <typename F>
auto run_stage(const std::string& stage, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

Json pose_json(const ObjectPose& pose, std::size_t size) { return to_json(pose, size); }

Json forces_json(const ContactForceSet& forces) {
  Json j = Json::array();
  for (const auto& f : forces) j.push_back(Json::array({f.x(), f.y(), f.z()}));
  return j;
}

Vector pose_vector(const ObjectAnnotation& a) {
  Vector v(6);
  v << a.centroid, a.extents;
  return v;
}

const ObjectPose& find_pose(const std::vector<ObjectPose>& poses, const std::string& label) {
  const ObjectPose* best = nullptr;
  for (const auto& p : poses) {
    if (p.label == label && (best == nullptr || p.score > best->score)) best = &p;
  }
  if (best == nullptr) throw Error(ErrorCode::kInvalidArgument, "no cluster classified as '" + label + "'");
  return *best;
}

const ObjectAnnotation& find_nominal(const std::vector<ObjectAnnotation>& objects, const std::string& label) {
  for (const auto& o : objects) {
    if (o.label == label) return o;
  }
  throw Error(ErrorCode::kInvalidArgument, "scene has no nominal '" + label + "'");
}

std::vector<Demonstration> load_demos(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return read_demos_csv(in);
}

PointCloud load_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return read_cloud(in);
}

}  // namespace

const std::vector<std::string>& task_stages() {
  static const std::vector<std::string> stages{"synergy_basis", "reference", "perception", "via_points",
                                               "kmp_adaptation", "reconstruction", "force_loop", "metrics"};
  return stages;
}

GraspModel make_grasp_model(const ObjectPose& pose, double stiffness, double motor_constant, Eigen::Index joints) {
  if (joints < 4) throw Error(ErrorCode::kInvalidArgument, "grasp model needs at least four hand joints");
  const double radius = std::max(0.5 * std::max(pose.extents.x(), pose.extents.y()), 1e-3);
  GraspModel m;
  m.grasp = grasp_matrix(tripod_contacts(Eigen::Vector3d::Zero(), radius));

  // Thumb closes with joints 0 and 1, index with joint 2, middle with joint 3.
  m.internal_stiffness = Matrix::Zero(9, joints);
  m.internal_stiffness(2, 0) = stiffness;
  m.internal_stiffness(2, 1) = stiffness;
  m.internal_stiffness(5, 2) = stiffness;
  m.internal_stiffness(8, 3) = stiffness;

  // Six motors drive the normal and vertical tangential load of each contact.
  Matrix select = Matrix::Zero(9, 6);
  for (Eigen::Index c = 0; c < 3; ++c) {
    select(3 * c, 2 * c) = 1.0;
    select(3 * c + 2, 2 * c + 1) = 1.0;
  }
  Matrix mix = Matrix::Identity(6, 6);
  for (Eigen::Index i = 0; i + 1 < 6; ++i) {
    mix(i, i + 1) = 0.2;
    mix(i + 1, i) = 0.1;
  }
  m.hand_jacobian = select * mix;
  m.motor_constants = Vector::Constant(6, motor_constant);
  validate(m);
  return m;
}

Vector holding_wrench(double mass) {
  Vector w = Vector::Zero(6);
  w(2) = mass * kGravity;
  return w;
}

SynergyPoint to_fitted_frame(const SynergyBasis& basis, const SynergyPoint& generator_coords) {
  const Matrix directions = generator_directions();
  if (basis.joint_dim() != directions.rows() || generator_coords.size() != directions.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "scenario coordinates need a 6-joint basis and two entries");
  }
  return project(basis, generator_theta0() + directions * generator_coords);
}

TaskResult run_task(const PipelineConfig& config) {
  run_stage("config", [&] {
    validate(config);
    return 0;
  });
  TaskResult r;
  const TaskScenario& scenario = config.scenario;
  Json stages = Json::array();

  // Synergy subspace from demonstrations.
  run_stage("synergy_basis", [&] {
    if (config.paths.demos.empty()) {
      r.demos = generate_synthetic_demos(scenario, config.demos.count, config.demos.noise, config.demos.seed,
                                         config.demos.samples, config.demos.duration)
                    .demos;
    } else {
      r.demos = load_demos(config.paths.demos);
    }
    if (config.paths.basis.empty()) {
      std::vector<JointConfiguration> postures;
      for (const auto& d : r.demos) postures.insert(postures.end(), d.postures.begin(), d.postures.end());
      r.basis = fit_synergy_basis(ConfigurationMatrix::from_postures(postures), config.variance_threshold);
    } else {
      r.basis = synergy_basis_from_json(read_json_file(config.paths.basis));
    }
    stages.push_back(Json{{"stage", "synergy_basis"},
                          {"source", config.paths.basis.empty() ? "fitted" : "loaded"},
                          {"demonstrations", r.demos.size()},
                          {"joint_dim", r.basis.joint_dim()},
                          {"synergy_dim", r.basis.synergy_dim()},
                          {"variance_fractions", vector_json(r.basis.variance_fractions)},
                          {"basis", to_json(r.basis)}});
    return 0;
  });

  // Probabilistic reference by GMM/GMR.
  run_stage("reference", [&] {
    const auto trajectories = interpolate_coefficients(r.demos, r.basis, uniform_grid(config.gmm.grid_points));
    GmmOptions options;
    options.components = config.gmm.components;
    options.seed = config.gmm.seed;
    options.max_iter = config.gmm.max_iter;
    options.tol = config.gmm.tol;
    r.gmm = fit_gmm_traced(trajectories, options);
    r.reference = generate_reference(r.gmm.model, uniform_grid(config.kmp.reference_points));
    r.actual = generate_reference(r.gmm.model, uniform_grid(config.kmp.prediction_points));
    stages.push_back(Json{{"stage", "reference"},
                          {"components", r.gmm.model.components()},
                          {"iterations", r.gmm.iterations},
                          {"converged", r.gmm.converged},
                          {"log_likelihood", r.gmm.log_likelihood.empty() ? 0.0 : r.gmm.log_likelihood.back()},
                          {"reference_points", r.reference.size()},
                          {"gmm", to_json(r.gmm.model)}});
    return 0;
  });

  // Scene segmentation, recognition and centroid poses.
  run_stage("perception", [&] {
    r.cloud = config.paths.scene.empty() ? generate_synthetic_scene(config.task, config.scene.seed, config.scene.noise).cloud
                                         : load_cloud(config.paths.scene);
    r.ransac = ransac_plane(r.cloud, config.ransac.iterations, config.ransac.threshold, config.ransac.seed);
    const PointCloud objects = r.cloud.select(r.ransac.outliers);
    r.clusters = euclidean_cluster(objects, config.clustering.epsilon, config.clustering.min_points);

    const LabeledFeatures training = svm_training_set(config.svm.samples_per_class, config.svm.seed);
    r.classifier = svm_train_multiclass(training.features, training.labels,
                                        SvmOptions{config.svm.c, config.svm.epochs, config.svm.seed});
    std::size_t correct = 0;
    for (std::size_t i = 0; i < training.features.size(); ++i) {
      correct += svm_classify(r.classifier, training.features[i]).label == training.labels[i] ? 1 : 0;
    }

    Json clusters = Json::array();
    for (const auto& c : r.clusters) {
      const Classification cls = svm_classify(r.classifier, extract_features(c));
      r.poses.push_back(estimate_pose(c, cls.label, cls.score));
      clusters.push_back(pose_json(r.poses.back(), c.size()));
    }
    stages.push_back(
        Json{{"stage", "perception"},
             {"points", r.cloud.size()},
             {"plane", Json{{"normal", vector_json(r.ransac.plane.normal)}, {"d", r.ransac.plane.d}}},
             {"plane_inliers", r.ransac.inliers.size()},
             {"svm_training_accuracy", static_cast<double>(correct) / static_cast<double>(training.features.size())},
             {"clusters", clusters}});
    return 0;
  });

  // Object poses become synergy-space via and end points.
  SynergyPoint grasp_target;
  SynergyPoint end_target;
  std::optional<KmpModel> kmp;
  run_stage("via_points", [&] {
    const auto nominal = nominal_objects(config.task);
    const ObjectPose& grasp_pose = find_pose(r.poses, scenario.grasp_label);
    const ObjectPose& place_pose = find_pose(r.poses, scenario.place_label);
    const Vector grasp_offset = grasp_pose.as_vector() - pose_vector(find_nominal(nominal, scenario.grasp_label));
    const Vector place_offset = place_pose.as_vector() - pose_vector(find_nominal(nominal, scenario.place_label));

    ViaPoint grasp = pose_to_synergy(grasp_offset, config.mapping, r.basis, scenario.grasp_time, config.kmp.via_variance);
    ViaPoint place = pose_to_synergy(place_offset, config.mapping, r.basis, 1.0, config.kmp.via_variance);
    const SynergyPoint grasp_offset_e = grasp.desired_e;
    const SynergyPoint place_offset_e = place.desired_e;
    grasp.desired_e += to_fitted_frame(r.basis, scenario.grasp_coords);
    place.desired_e += to_fitted_frame(r.basis, scenario.manipulation_end);
    grasp_target = grasp.desired_e;
    end_target = place.desired_e;
    r.via_points = {grasp, place};
    stages.push_back(Json{{"stage", "via_points"},
                          {"grasp_object", scenario.grasp_label},
                          {"place_object", scenario.place_label},
                          {"pose_offsets", Json{{scenario.grasp_label, vector_json(grasp_offset)},
                                                {scenario.place_label, vector_json(place_offset)}}},
                          {"synergy_offsets", Json::array({vector_json(grasp_offset_e), vector_json(place_offset_e)})},
                          {"via_points", Json::array({to_json(grasp), to_json(place)})}});
    return 0;
  });

  // KMP adaptation and prediction; the grasp part holds the grasp coordinates
  // after release and the manipulation part carries the remainder.
  run_stage("kmp_adaptation", [&] {
    ReferenceTrajectory adapted = r.reference;
    for (const auto& via : r.via_points) adapted = insert_via_point(adapted, via);
    kmp.emplace(kmp_fit(adapted, config.kmp.kernel, config.kmp.lambda));
    r.prediction = kmp_predict(*kmp, uniform_grid(config.kmp.prediction_points));
    Json steps = Json::array();
    for (std::size_t i = 0; i < r.prediction.size(); ++i) {
      const double t = r.prediction.times[i];
      const SynergyPoint& e = r.prediction.means[i];
      SynergyPoint grasp_part = t <= scenario.release_time ? e : grasp_target;
      SynergyPoint manipulation_part = e - grasp_part;
      steps.push_back(Json{{"t", t},
                           {"e", vector_json(e)},
                           {"grasp", vector_json(grasp_part)},
                           {"manipulation", vector_json(manipulation_part)}});
      r.grasp_parts.push_back(std::move(grasp_part));
      r.manipulation_parts.push_back(std::move(manipulation_part));
    }
    stages.push_back(Json{{"stage", "kmp_adaptation"},
                          {"kernel", to_json(config.kmp.kernel)},
                          {"lambda", config.kmp.lambda},
                          {"reference_points", adapted.size()},
                          {"steps", steps}});
    return 0;
  });

  run_stage("reconstruction", [&] {
    Json steps = Json::array();
    for (std::size_t i = 0; i < r.prediction.size(); ++i) {
      r.joints.push_back(reconstruct(r.basis, r.grasp_parts[i], r.manipulation_parts[i]));
      steps.push_back(Json{{"t", r.prediction.times[i]}, {"joints", vector_json(r.joints.back())}});
    }
    stages.push_back(Json{{"stage", "reconstruction"}, {"steps", steps}});
    return 0;
  });

  // Grip force regulation with friction-cone checks.
  run_stage("force_loop", [&] {
    const ObjectPose& grasp_pose = find_pose(r.poses, scenario.grasp_label);
    r.grasp = make_grasp_model(grasp_pose, config.force.stiffness, config.force.motor_constant, r.basis.joint_dim());
    r.force = simulate_force_loop(r.grasp, r.basis, holding_wrench(scenario.mass), config.force.loop);
    r.all_stable = true;
    Json steps = Json::array();
    for (const auto& s : r.force.steps) {
      bool stable = true;
      for (bool b : s.stable) stable = stable && b;
      r.all_stable = r.all_stable && stable;
      Json flags = Json::array();
      for (bool b : s.stable) flags.push_back(b);
      steps.push_back(Json{{"t", s.time},
                           {"target", s.target},
                           {"measured", s.measured},
                           {"delta_e", vector_json(s.delta_e)},
                           {"forces", forces_json(s.forces)},
                           {"currents", vector_json(s.currents)},
                           {"stable", flags}});
    }
    r.final_grip = r.force.steps.empty() ? 0.0 : r.force.steps.back().measured;
    stages.push_back(Json{{"stage", "force_loop"},
                          {"mu", config.force.loop.mu},
                          {"band", Json::array({config.force.loop.lower, config.force.loop.upper})},
                          {"grasp", to_json(r.grasp)},
                          {"settled", r.force.settled},
                          {"settle_time", r.force.settle_time},
                          {"final_grip", r.final_grip},
                          {"all_stable", r.all_stable},
                          {"steps", steps}});
    return 0;
  });

  run_stage("metrics", [&] {
    const auto [score_r, score_rmse] = score_trajectory(r.actual, r.prediction);
    Json via_errors = Json::array();
    for (const auto& via : r.via_points) {
      via_errors.push_back((kmp_predict_mean(*kmp, via.t_star) - via.desired_e).cwiseAbs().maxCoeff());
    }
    r.manipulation_max_regression = 0.0;
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.prediction.size(); ++i) {
      const double t = r.prediction.times[i];
      if (t < scenario.manipulation_start_time || t > scenario.manipulation_end_time) continue;
      const double dist = (r.prediction.means[i] - end_target).norm();
      r.manipulation_max_regression = std::max(r.manipulation_max_regression, dist - previous);
      previous = dist;
    }
    r.manipulation_monotone = r.manipulation_max_regression <= 0.0;
    const double final_error = r.force.steps.empty() ? 0.0 : r.force.steps.back().target - r.final_grip;
    const bool in_band = r.final_grip >= config.force.loop.lower && r.final_grip <= config.force.loop.upper;
    stages.push_back(Json{{"stage", "metrics"},
                          {"R", score_r},
                          {"rMSE", score_rmse},
                          {"via_point_errors", via_errors},
                          {"manipulation_monotone", r.manipulation_monotone},
                          {"manipulation_max_regression", r.manipulation_max_regression},
                          {"final_grip", r.final_grip},
                          {"final_force_error", final_error},
                          {"grip_in_band", in_band},
                          {"all_stable", r.all_stable}});
    return 0;
  });

  r.log = Json{{"task", config.task}, {"config", to_json(config)}, {"stages", stages}};
  return r;
}

void write_task_artifacts(const TaskResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_json_file(dir / "task_log.json", r.log);
  write_json_file(dir / "synergy_basis.json", to_json(r.basis));
  write_json_file(dir / "gmm.json", to_json(r.gmm.model));
  write_text_file(dir / "reference.csv", reference_to_csv(r.reference));
  write_text_file(dir / "prediction.csv", comparison_to_csv(r.actual, r.prediction));
  std::vector<std::size_t> sizes;
  for (const auto& c : r.clusters) sizes.push_back(c.size());
  write_json_file(dir / "segmentation.json", segmentation_json(r.ransac.plane, r.poses, sizes));
  std::vector<std::vector<double>> joints;
  std::vector<std::string> header{"t"};
  for (Eigen::Index j = 0; j < r.basis.joint_dim(); ++j) header.push_back("q" + std::to_string(j + 1));
  for (std::size_t i = 0; i < r.joints.size(); ++i) {
    std::vector<double> row{r.prediction.times[i]};
    for (Eigen::Index j = 0; j < r.joints[i].size(); ++j) row.push_back(r.joints[i](j));
    joints.push_back(std::move(row));
  }
  write_text_file(dir / "joints.csv", matrix_to_csv(joints, header));
  write_text_file(dir / "force_target.csv", force_profile_to_csv(r.force.target));
  write_text_file(dir / "force_measured.csv", force_profile_to_csv(r.force.measured));
}

}  // namespace ksyn
