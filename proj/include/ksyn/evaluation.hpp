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

#include "ksyn/kmp.hpp"

namespace ksyn {

/// Pearson correlation with squared deviations under the radicals.
double pearson_r(const std::vector<double>& actual, const std::vector<double>& predicted);

/// √(mean squared difference).
double rmse(const std::vector<double>& actual, const std::vector<double>& predicted);

/// An object the reference is adapted to: its via/end points and the
/// trajectory the adapted prediction is scored against.
struct ObjectInstance {
  std::string name;
  std::vector<ViaPoint> via_points;
  ReferenceTrajectory actual;
};

struct KernelScore {
  KernelSpec kernel;
  double r = 0.0;
  double rmse = 0.0;
  /// Per instance (R, rMSE), in input order.
  std::vector<std::pair<double, double>> per_instance;
};

struct MetricReport {
  std::vector<KernelScore> rows;  // ordered by kernel name
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::string dataset;
};

/// Predicted vs actual trajectory of one kernel on one instance.
struct TrajectoryDump {
  std::string kernel;
  std::string instance;
  ReferenceTrajectory actual;
  ReferenceTrajectory predicted;
};

struct BenchmarkResult {
  MetricReport report;
  std::vector<TrajectoryDump> dumps;
};

/// Mean over synergy components of the per-component R and rMSE between the
/// actual means and predicted means (same time grid).
std::pair<double, double> score_trajectory(const ReferenceTrajectory& actual, const ReferenceTrajectory& predicted);

/// For every kernel: fit on the reference with each instance's via-points
/// inserted, predict at the instance's actual times and score. With no
/// instances the reference is reproduced at its own times. Kernels run
/// concurrently; rows are merged by kernel name.
BenchmarkResult benchmark_kernels(const ReferenceTrajectory& reference, const std::vector<ObjectInstance>& instances,
                                  const std::vector<KernelSpec>& kernels, double lambda, std::uint64_t seed,
                                  const std::string& dataset = "custom");

/// Fixed-width text table.
std::string format_report(const MetricReport& report);

}  // namespace ksyn
