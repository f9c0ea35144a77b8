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

#include "ksyn/config.hpp"

#include <algorithm>
#include <string>
#include <type_traits>

#include "ksyn/error.hpp"

namespace ksyn {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::kConfigInvalid, what); }

void check_keys(const Json& user, const Json& schema, const std::string& path) {
  if (!user.is_object()) invalid(path + " must be an object");
  for (const auto& [key, value] : user.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!schema.contains(key)) {
      if (where == "kmp.kernel.alpha") continue;
      invalid("unknown key '" + where + "'");
    }
    if (schema.at(key).is_object() && where != "kmp.kernel") check_keys(value, schema.at(key), where);
  }
}

template <typename T>
T get(const Json& obj, const char* key, const std::string& path) {
  if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
    const Json& v = obj.at(key);
    const bool ok = std::is_unsigned_v<T> ? v.is_number_unsigned() : v.is_number_integer();
    if (!ok) {
      invalid("'" + path + "." + key + "' must be " + (std::is_unsigned_v<T> ? "a non-negative integer" : "an integer"));
    }
  }
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    invalid("'" + path + "." + key + "' has the wrong type");
  }
}

Vector get_vector(const Json& obj, const char* key, const std::string& path) {
  try {
    return vector_from_json(obj.at(key));
  } catch (const std::exception&) {
    invalid("'" + path + "." + key + "' must be an array of numbers");
  }
}

Matrix get_matrix(const Json& obj, const char* key, const std::string& path) {
  try {
    return matrix_from_json(obj.at(key));
  } catch (const std::exception&) {
    invalid("'" + path + "." + key + "' must be an array of equal-length rows");
  }
}

Json scenario_json(const TaskScenario& s) {
  return Json{{"grasp_label", s.grasp_label},
              {"place_label", s.place_label},
              {"preshape", vector_json(s.preshape)},
              {"grasp", vector_json(s.grasp_coords)},
              {"manipulation_start", vector_json(s.manipulation_start)},
              {"manipulation_end", vector_json(s.manipulation_end)},
              {"grasp_time", s.grasp_time},
              {"release_time", s.release_time},
              {"manipulation_start_time", s.manipulation_start_time},
              {"manipulation_end_time", s.manipulation_end_time},
              {"mass", s.mass}};
}

}  // namespace

void apply_seed(PipelineConfig& c, std::uint64_t seed) {
  c.demos.seed = seed;
  c.scene.seed = seed + 1;
  c.gmm.seed = seed + 2;
  c.ransac.seed = seed + 3;
  c.svm.seed = seed + 4;
}

PipelineConfig default_config(const std::string& task, std::uint64_t seed) {
  PipelineConfig c;
  c.task = task;
  c.scenario = task_scenario(task);
  c.force.loop.mu = c.scenario.mu;
  c.force.loop.lower = c.scenario.grip_lower;
  c.force.loop.upper = c.scenario.grip_upper;
  c.mapping.compliance = 0.8 * Matrix::Identity(kHandJoints, kHandJoints);
  c.mapping.motion_transfer = Matrix::Zero(6, kHandJoints);
  c.mapping.motion_transfer.diagonal() << 2.0, 2.0, 2.0, 0.2, 0.2, 0.2;
  apply_seed(c, seed);
  return c;
}

Json to_json(const PipelineConfig& c) {
  const auto& l = c.force.loop;
  return Json{
      {"task", c.task},
      {"paths", {{"demos", c.paths.demos}, {"scene", c.paths.scene}, {"basis", c.paths.basis}, {"output", c.paths.output}}},
      {"demos",
       {{"count", c.demos.count},
        {"noise", c.demos.noise},
        {"samples", c.demos.samples},
        {"duration", c.demos.duration},
        {"seed", c.demos.seed}}},
      {"scene", {{"noise", c.scene.noise}, {"seed", c.scene.seed}}},
      {"synergy", {{"variance_threshold", c.variance_threshold}}},
      {"gmm",
       {{"components", c.gmm.components},
        {"seed", c.gmm.seed},
        {"max_iter", c.gmm.max_iter},
        {"tol", c.gmm.tol},
        {"grid_points", c.gmm.grid_points}}},
      {"kmp",
       {{"kernel", to_json(c.kmp.kernel)},
        {"lambda", c.kmp.lambda},
        {"reference_points", c.kmp.reference_points},
        {"prediction_points", c.kmp.prediction_points},
        {"via_variance", c.kmp.via_variance}}},
      {"clustering", {{"epsilon", c.clustering.epsilon}, {"min_points", c.clustering.min_points}}},
      {"ransac", {{"iterations", c.ransac.iterations}, {"threshold", c.ransac.threshold}, {"seed", c.ransac.seed}}},
      {"svm",
       {{"c", c.svm.c},
        {"epochs", c.svm.epochs},
        {"samples_per_class", c.svm.samples_per_class},
        {"seed", c.svm.seed}}},
      {"force",
       {{"mu", l.mu},
        {"gain", l.gain},
        {"lower", l.lower},
        {"upper", l.upper},
        {"ramp_rate", l.ramp_rate},
        {"dt", l.dt},
        {"lag", l.lag},
        {"hold", l.hold},
        {"settle_tolerance", l.settle_tolerance},
        {"max_steps", l.max_steps},
        {"stiffness", c.force.stiffness},
        {"motor_constant", c.force.motor_constant}}},
      {"mapping",
       {{"compliance", matrix_json(c.mapping.compliance)},
        {"motion_transfer", matrix_json(c.mapping.motion_transfer)}}},
      {"scenario", scenario_json(c.scenario)}};
}

PipelineConfig config_from_json(const Json& user) {
  if (!user.is_object()) invalid("config must be a JSON object");
  std::string task = "egg";
  if (user.contains("task")) {
    if (!user.at("task").is_string()) invalid("'task' must be a string");
    task = user.at("task").get<std::string>();
  }
  PipelineConfig c;
  try {
    c = default_config(task);
  } catch (const Error& e) {
    invalid(e.what());
  }
  Json merged = to_json(c);
  check_keys(user, merged, "");
  Json patch = user;
  if (patch.contains("kmp") && patch["kmp"].contains("kernel")) {
    merged["kmp"]["kernel"] = patch["kmp"]["kernel"];
    patch["kmp"].erase("kernel");
  }
  merged.merge_patch(patch);

  const Json& p = merged.at("paths");
  c.paths.demos = get<std::string>(p, "demos", "paths");
  c.paths.scene = get<std::string>(p, "scene", "paths");
  c.paths.basis = get<std::string>(p, "basis", "paths");
  c.paths.output = get<std::string>(p, "output", "paths");

  const Json& d = merged.at("demos");
  c.demos.count = get<std::size_t>(d, "count", "demos");
  c.demos.noise = get<double>(d, "noise", "demos");
  c.demos.samples = get<std::size_t>(d, "samples", "demos");
  c.demos.duration = get<double>(d, "duration", "demos");
  c.demos.seed = get<std::uint64_t>(d, "seed", "demos");

  const Json& sc = merged.at("scene");
  c.scene.noise = get<double>(sc, "noise", "scene");
  c.scene.seed = get<std::uint64_t>(sc, "seed", "scene");

  c.variance_threshold = get<double>(merged.at("synergy"), "variance_threshold", "synergy");

  const Json& g = merged.at("gmm");
  c.gmm.components = get<std::size_t>(g, "components", "gmm");
  c.gmm.seed = get<std::uint64_t>(g, "seed", "gmm");
  c.gmm.max_iter = get<int>(g, "max_iter", "gmm");
  c.gmm.tol = get<double>(g, "tol", "gmm");
  c.gmm.grid_points = get<std::size_t>(g, "grid_points", "gmm");

  const Json& k = merged.at("kmp");
  const Json& kernel = k.at("kernel");
  if (!kernel.is_object() || !kernel.contains("kind") || !kernel.at("kind").is_string()) {
    invalid("'kmp.kernel.kind' must be a string");
  }
  for (const auto& [key, value] : kernel.items()) {
    if (key != "kind" && key != "l" && key != "sigma2" && key != "alpha") invalid("unknown key 'kmp.kernel." + key + "'");
    if (key != "kind" && !value.is_number()) invalid("'kmp.kernel." + key + "' must be a number");
  }
  try {
    const KernelKind kind = parse_kernel_kind(kernel.at("kind").get<std::string>());
    if (kernel.contains("alpha") && kind != KernelKind::kCauchy) invalid("'kmp.kernel.alpha' is only valid for cauchy");
    c.kmp.kernel = kernel_spec_from_json(kernel);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigInvalid) throw;
    invalid(std::string("kmp.kernel: ") + e.what());
  }
  c.kmp.lambda = get<double>(k, "lambda", "kmp");
  c.kmp.reference_points = get<std::size_t>(k, "reference_points", "kmp");
  c.kmp.prediction_points = get<std::size_t>(k, "prediction_points", "kmp");
  c.kmp.via_variance = get<double>(k, "via_variance", "kmp");

  const Json& cl = merged.at("clustering");
  c.clustering.epsilon = get<double>(cl, "epsilon", "clustering");
  c.clustering.min_points = get<std::size_t>(cl, "min_points", "clustering");

  const Json& r = merged.at("ransac");
  c.ransac.iterations = get<int>(r, "iterations", "ransac");
  c.ransac.threshold = get<double>(r, "threshold", "ransac");
  c.ransac.seed = get<std::uint64_t>(r, "seed", "ransac");

  const Json& s = merged.at("svm");
  c.svm.c = get<double>(s, "c", "svm");
  c.svm.epochs = get<int>(s, "epochs", "svm");
  c.svm.samples_per_class = get<std::size_t>(s, "samples_per_class", "svm");
  c.svm.seed = get<std::uint64_t>(s, "seed", "svm");

  const Json& f = merged.at("force");
  auto& l = c.force.loop;
  l.mu = get<double>(f, "mu", "force");
  l.gain = get<double>(f, "gain", "force");
  l.lower = get<double>(f, "lower", "force");
  l.upper = get<double>(f, "upper", "force");
  l.ramp_rate = get<double>(f, "ramp_rate", "force");
  l.dt = get<double>(f, "dt", "force");
  l.lag = get<double>(f, "lag", "force");
  l.hold = get<double>(f, "hold", "force");
  l.settle_tolerance = get<double>(f, "settle_tolerance", "force");
  l.max_steps = get<int>(f, "max_steps", "force");
  c.force.stiffness = get<double>(f, "stiffness", "force");
  c.force.motor_constant = get<double>(f, "motor_constant", "force");

  const Json& m = merged.at("mapping");
  c.mapping.compliance = get_matrix(m, "compliance", "mapping");
  c.mapping.motion_transfer = get_matrix(m, "motion_transfer", "mapping");

  const Json& sn = merged.at("scenario");
  c.scenario.grasp_label = get<std::string>(sn, "grasp_label", "scenario");
  c.scenario.place_label = get<std::string>(sn, "place_label", "scenario");
  c.scenario.preshape = get_vector(sn, "preshape", "scenario");
  c.scenario.grasp_coords = get_vector(sn, "grasp", "scenario");
  c.scenario.manipulation_start = get_vector(sn, "manipulation_start", "scenario");
  c.scenario.manipulation_end = get_vector(sn, "manipulation_end", "scenario");
  c.scenario.grasp_time = get<double>(sn, "grasp_time", "scenario");
  c.scenario.release_time = get<double>(sn, "release_time", "scenario");
  c.scenario.manipulation_start_time = get<double>(sn, "manipulation_start_time", "scenario");
  c.scenario.manipulation_end_time = get<double>(sn, "manipulation_end_time", "scenario");
  c.scenario.mass = get<double>(sn, "mass", "scenario");
  c.scenario.mu = l.mu;
  c.scenario.grip_lower = l.lower;
  c.scenario.grip_upper = l.upper;

  validate(c);
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  Json j;
  try {
    j = read_json_file(path);
  } catch (const Error& e) {
    invalid(e.what());
  }
  return config_from_json(j);
}

void validate(const PipelineConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) invalid(what);
  };
  require(c.task == "egg" || c.task == "ketchup", "task must be 'egg' or 'ketchup'");
  require(c.demos.count >= 2, "demos.count must be >= 2");
  require(c.demos.noise >= 0.0, "demos.noise must be >= 0");
  require(c.demos.samples >= 2, "demos.samples must be >= 2");
  require(c.demos.duration > 0.0, "demos.duration must be > 0");
  require(c.scene.noise >= 0.0, "scene.noise must be >= 0");
  require(c.variance_threshold > 0.0 && c.variance_threshold <= 1.0, "synergy.variance_threshold must be in (0, 1]");
  require(c.gmm.components >= 1, "gmm.components must be >= 1");
  require(c.gmm.max_iter >= 1, "gmm.max_iter must be >= 1");
  require(c.gmm.tol > 0.0, "gmm.tol must be > 0");
  require(c.gmm.grid_points >= 2, "gmm.grid_points must be >= 2");
  require(c.kmp.lambda > 0.0, "kmp.lambda must be > 0");
  require(c.kmp.reference_points >= 2, "kmp.reference_points must be >= 2");
  require(c.kmp.prediction_points >= 2, "kmp.prediction_points must be >= 2");
  require(c.kmp.via_variance > 0.0, "kmp.via_variance must be > 0");
  require(c.clustering.epsilon > 0.0, "clustering.epsilon must be > 0");
  require(c.clustering.min_points >= 1, "clustering.min_points must be >= 1");
  require(c.ransac.iterations >= 1, "ransac.iterations must be >= 1");
  require(c.ransac.threshold > 0.0, "ransac.threshold must be > 0");
  require(c.svm.c > 0.0, "svm.c must be > 0");
  require(c.svm.epochs >= 1, "svm.epochs must be >= 1");
  require(c.svm.samples_per_class >= 1, "svm.samples_per_class must be >= 1");
  const auto& l = c.force.loop;
  require(l.mu > 0.0, "force.mu must be > 0");
  require(l.gain > 0.0, "force.gain must be > 0");
  require(l.lower > 0.0 && l.upper >= l.lower, "force band must satisfy 0 < lower <= upper");
  require(l.ramp_rate > 0.0, "force.ramp_rate must be > 0");
  require(l.dt > 0.0 && l.lag > 0.0, "force.dt and force.lag must be > 0");
  require(l.hold >= 0.0, "force.hold must be >= 0");
  require(l.settle_tolerance > 0.0, "force.settle_tolerance must be > 0");
  require(l.max_steps >= 1, "force.max_steps must be >= 1");
  require(c.force.stiffness > 0.0, "force.stiffness must be > 0");
  require(c.force.motor_constant > 0.0, "force.motor_constant must be > 0");
  require(c.mapping.compliance.rows() == kHandJoints && c.mapping.compliance.cols() == kHandJoints,
          "mapping.compliance must be 6x6");
  require(c.mapping.motion_transfer.rows() == 6 && c.mapping.motion_transfer.cols() == kHandJoints,
          "mapping.motion_transfer must be 6x6");
  require(c.mapping.compliance.allFinite() && c.mapping.motion_transfer.allFinite(), "mapping must be finite");
  const auto& s = c.scenario;
  require(s.preshape.size() == 2 && s.grasp_coords.size() == 2 && s.manipulation_start.size() == 2 &&
              s.manipulation_end.size() == 2,
          "scenario coordinates must have two entries");
  require(0.0 < s.grasp_time && s.grasp_time <= s.release_time && s.release_time < s.manipulation_start_time &&
              s.manipulation_start_time < s.manipulation_end_time && s.manipulation_end_time <= 1.0,
          "scenario times must satisfy 0 < grasp <= release < manipulation start < end <= 1");
  require(s.mass > 0.0, "scenario.mass must be > 0");
  const auto labels = object_labels();
  require(std::find(labels.begin(), labels.end(), s.grasp_label) != labels.end() &&
              std::find(labels.begin(), labels.end(), s.place_label) != labels.end(),
          "scenario labels must name known objects");
}

}  // namespace ksyn
