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

#include "ksyn/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <sstream>

#include "ksyn/error.hpp"

namespace ksyn {

double pearson_r(const std::vector<double>& actual, const std::vector<double>& predicted) {
  if (actual.size() != predicted.size()) throw Error(ErrorCode::kLengthMismatch, "sequences differ in length");
  if (actual.size() < 2) throw Error(ErrorCode::kInvalidArgument, "correlation needs at least 2 points");
  const double m = static_cast<double>(actual.size());
  double ma = 0.0;
  double mp = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    ma += actual[i];
    mp += predicted[i];
  }
  ma /= m;
  mp /= m;
  double sap = 0.0;
  double saa = 0.0;
  double spp = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double da = actual[i] - ma;
    const double dp = predicted[i] - mp;
    sap += da * dp;
    saa += da * da;
    spp += dp * dp;
  }
  if (!(saa > 0.0) || !(spp > 0.0)) throw Error(ErrorCode::kZeroVariance, "correlation of a constant sequence");
  return std::clamp(sap / (std::sqrt(saa) * std::sqrt(spp)), -1.0, 1.0);
}

double rmse(const std::vector<double>& actual, const std::vector<double>& predicted) {
  if (actual.size() != predicted.size()) throw Error(ErrorCode::kLengthMismatch, "sequences differ in length");
  if (actual.empty()) throw Error(ErrorCode::kInvalidArgument, "rMSE of empty sequences");
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double d = actual[i] - predicted[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(actual.size()));
}

std::pair<double, double> score_trajectory(const ReferenceTrajectory& actual, const ReferenceTrajectory& predicted) {
  if (actual.size() != predicted.size() || actual.dim() != predicted.dim()) {
    throw Error(ErrorCode::kLengthMismatch, "actual and predicted trajectories differ in shape");
  }
  const Eigen::Index s = actual.dim();
  double r = 0.0;
  double err = 0.0;
  for (Eigen::Index c = 0; c < s; ++c) {
    std::vector<double> a;
    std::vector<double> p;
    for (std::size_t i = 0; i < actual.size(); ++i) {
      a.push_back(actual.means[i](c));
      p.push_back(predicted.means[i](c));
    }
    r += pearson_r(a, p);
    err += rmse(a, p);
  }
  return {r / static_cast<double>(s), err / static_cast<double>(s)};
}

namespace {

struct KernelRun {
  KernelScore score;
  std::vector<TrajectoryDump> dumps;
};

KernelRun run_kernel(const ReferenceTrajectory& reference, const std::vector<ObjectInstance>& instances,
                     const KernelSpec& kernel, double lambda) {
  KernelRun run{KernelScore{kernel, 0.0, 0.0, {}}, {}};
  const std::string name(to_string(kernel.kind()));
  auto score_one = [&](const std::string& instance, const ReferenceTrajectory& adapted,
                       const ReferenceTrajectory& actual) {
    const KmpModel model = kmp_fit(adapted, kernel, lambda);
    ReferenceTrajectory predicted = kmp_predict(model, actual.times);
    const auto rs = score_trajectory(actual, predicted);
    run.score.per_instance.push_back(rs);
    run.dumps.push_back({name, instance, actual, std::move(predicted)});
  };

  if (instances.empty()) {
    score_one("reference", reference, reference);
  }
  for (const auto& inst : instances) {
    ReferenceTrajectory adapted = reference;
    for (const auto& via : inst.via_points) adapted = insert_via_point(adapted, via);
    score_one(inst.name, adapted, inst.actual);
  }
  for (const auto& [r, e] : run.score.per_instance) {
    run.score.r += r;
    run.score.rmse += e;
  }
  const double count = static_cast<double>(run.score.per_instance.size());
  run.score.r /= count;
  run.score.rmse /= count;
  return run;
}

}  // namespace

BenchmarkResult benchmark_kernels(const ReferenceTrajectory& reference, const std::vector<ObjectInstance>& instances,
                                  const std::vector<KernelSpec>& kernels, double lambda, std::uint64_t seed,
                                  const std::string& dataset) {
  if (reference.size() == 0) throw Error(ErrorCode::kInvalidArgument, "benchmark reference is empty");
  if (kernels.empty()) throw Error(ErrorCode::kInvalidArgument, "no kernels to benchmark");
  validate(reference);

  std::vector<std::future<KernelRun>> jobs;
  jobs.reserve(kernels.size());
  for (const auto& kernel : kernels) {
    jobs.push_back(std::async(std::launch::async, run_kernel, std::cref(reference), std::cref(instances),
                              std::cref(kernel), lambda));
  }
  std::vector<KernelRun> runs;
  for (auto& job : jobs) runs.push_back(job.get());
  std::stable_sort(runs.begin(), runs.end(), [](const KernelRun& a, const KernelRun& b) {
    return to_string(a.score.kernel.kind()) < to_string(b.score.kernel.kind());
  });

  BenchmarkResult result;
  result.report.lambda = lambda;
  result.report.seed = seed;
  result.report.dataset = dataset;
  for (auto& run : runs) {
    result.report.rows.push_back(std::move(run.score));
    for (auto& d : run.dumps) result.dumps.push_back(std::move(d));
  }
  return result;
}

std::string format_report(const MetricReport& report) {
  std::ostringstream out;
  out << "dataset: " << report.dataset << "  lambda: " << report.lambda << "  seed: " << report.seed << "\n";
  out << std::left << std::setw(8) << "Index";
  for (const auto& row : report.rows) out << std::right << std::setw(14) << to_string(row.kernel.kind());
  out << "\n" << std::left << std::setw(8) << "R";
  out << std::fixed << std::setprecision(4);
  for (const auto& row : report.rows) out << std::right << std::setw(14) << row.r;
  out << "\n" << std::left << std::setw(8) << "rMSE";
  for (const auto& row : report.rows) out << std::right << std::setw(14) << row.rmse;
  out << "\n";
  return out.str();
}

}  // namespace ksyn
