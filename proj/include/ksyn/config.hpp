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

#include "ksyn/force.hpp"
#include "ksyn/io.hpp"
#include "ksyn/kmp.hpp"
#include "ksyn/perception.hpp"
#include "ksyn/synthetic.hpp"

namespace ksyn {

struct PipelineConfig {
  std::string task = "egg";

  struct Paths {
    std::string demos;   // demo CSV; synthesized when empty
    std::string scene;   // ASCII cloud; synthesized when empty
    std::string basis;   // synergy basis JSON; fitted when empty
    std::string output;  // artifacts directory; nothing written when empty
  } paths;

  struct Demos {
    std::size_t count = 8;
    double noise = 0.002;
    std::size_t samples = 101;
    double duration = 4.0;
    std::uint64_t seed = 0;
  } demos;

  struct Scene {
    double noise = 0.001;
    std::uint64_t seed = 0;
  } scene;

  double variance_threshold = 0.95;

  struct Gmm {
    std::size_t components = 5;
    std::uint64_t seed = 0;
    int max_iter = 200;
    double tol = 1e-6;
    std::size_t grid_points = 101;
  } gmm;

  struct Kmp {
    KernelSpec kernel = KernelSpec::cauchy();
    double lambda = kDefaultLambda;
    std::size_t reference_points = 51;
    std::size_t prediction_points = 201;
    double via_variance = 1e-6;
  } kmp;

  struct Clustering {
    double epsilon = 0.015;
    std::size_t min_points = 20;
  } clustering;

  struct Ransac {
    int iterations = 200;
    double threshold = 0.005;
    std::uint64_t seed = 0;
  } ransac;

  struct Svm {
    double c = 1.0;
    int epochs = 200;
    std::size_t samples_per_class = 12;
    std::uint64_t seed = 0;
  } svm;

  struct Force {
    ForceLoopConfig loop;
    double stiffness = 40.0;      // N/rad on each driven contact normal
    double motor_constant = 0.5;  // N/A
  } force;

  SynergyMappingParams mapping;
  TaskScenario scenario;
};

/// Complete defaults for a task; stage seeds derived from `seed`.
PipelineConfig default_config(const std::string& task, std::uint64_t seed = 7);

/// Sets every stage seed from one master seed.
void apply_seed(PipelineConfig& config, std::uint64_t seed);

Json to_json(const PipelineConfig& config);

/// Overlays `j` on the defaults of its task. Unknown keys, wrong types and
/// out-of-range values throw ConfigInvalid.
PipelineConfig config_from_json(const Json& j);
PipelineConfig load_config(const std::filesystem::path& path);

void validate(const PipelineConfig& config);

}  // namespace ksyn
