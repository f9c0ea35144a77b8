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

#include "ksyn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "ksyn/error.hpp"

namespace ksyn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kClearance = 0.01;

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// Evenly spaced midpoints of [lo, hi].
double mid(double lo, double hi, std::size_t i, std::size_t n) {
  return lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
}

void add_disc(std::vector<Point3>& out, const Eigen::Vector2d& c, double radius, double z, double spacing) {
  const auto rings = std::max<std::size_t>(1, static_cast<std::size_t>(std::round(radius / spacing)));
  for (std::size_t k = 0; k < rings; ++k) {
    const double r = mid(0.0, radius, k, rings);
    const auto n = std::max<std::size_t>(3, static_cast<std::size_t>(std::round(2.0 * kPi * r / spacing)));
    for (std::size_t j = 0; j < n; ++j) {
      const double u = 2.0 * kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(n);
      out.emplace_back(c.x() + r * std::cos(u), c.y() + r * std::sin(u), z);
    }
  }
}

std::vector<Point3> egg_surface(const Eigen::Vector2d& c, double s) {
  const double a = 0.022 * s;
  const double h = 0.029 * s;  // vertical semi-axis; the egg rests on its tip
  const double v_min = std::asin((kClearance - h) / h);
  constexpr std::size_t nu = 24;
  constexpr std::size_t nv = 16;
  std::vector<Point3> pts;
  for (std::size_t i = 0; i < nv; ++i) {
    const double v = mid(v_min, kPi / 2.0, i, nv);
    for (std::size_t j = 0; j < nu; ++j) {
      const double u = 2.0 * kPi * (static_cast<double>(j) + 0.5) / nu;
      pts.emplace_back(c.x() + a * std::cos(v) * std::cos(u), c.y() + a * std::cos(v) * std::sin(u),
                       h + h * std::sin(v));
    }
  }
  return pts;
}

std::vector<Point3> box_surface(const Eigen::Vector2d& c, double wx, double wy, double h) {
  constexpr double spacing = 0.005;
  const auto nx = static_cast<std::size_t>(std::round(wx / spacing));
  const auto ny = static_cast<std::size_t>(std::round(wy / spacing));
  const double x0 = c.x() - wx / 2.0;
  const double y0 = c.y() - wy / 2.0;
  std::vector<Point3> pts;
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) pts.emplace_back(mid(x0, x0 + wx, i, nx), mid(y0, y0 + wy, j, ny), h);
  }
  constexpr std::size_t rows = 4;
  for (std::size_t k = 0; k < rows; ++k) {
    const double z = mid(kClearance, h, k, rows);
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = mid(x0, x0 + wx, i, nx);
      pts.emplace_back(x, y0, z);
      pts.emplace_back(x, y0 + wy, z);
    }
    for (std::size_t j = 0; j < ny; ++j) {
      const double y = mid(y0, y0 + wy, j, ny);
      pts.emplace_back(x0, y, z);
      pts.emplace_back(x0 + wx, y, z);
    }
  }
  return pts;
}

std::vector<Point3> cylinder_surface(const Eigen::Vector2d& c, double r, double h) {
  constexpr double spacing = 0.006;
  const auto nu = static_cast<std::size_t>(std::round(2.0 * kPi * r / spacing));
  const auto rows = static_cast<std::size_t>(std::round((h - kClearance) / spacing));
  std::vector<Point3> pts;
  for (std::size_t k = 0; k < rows; ++k) {
    const double z = mid(kClearance, h, k, rows);
    for (std::size_t j = 0; j < nu; ++j) {
      const double u = 2.0 * kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(nu);
      pts.emplace_back(c.x() + r * std::cos(u), c.y() + r * std::sin(u), z);
    }
  }
  add_disc(pts, c, r, h, spacing);
  return pts;
}

ObjectAnnotation annotate(const std::string& label, const std::vector<Point3>& pts) {
  ObjectAnnotation a;
  a.label = label;
  a.size = pts.size();
  Point3 lo = pts.front();
  Point3 hi = pts.front();
  for (const auto& p : pts) {
    a.centroid += p;
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  a.centroid /= static_cast<double>(pts.size());
  a.extents = hi - lo;
  return a;
}

struct Placement {
  std::string label;
  Eigen::Vector2d base;
};

std::vector<Placement> scene_layout(const std::string& task) {
  if (task == "egg") return {{"egg", {-0.10, 0.05}}, {"tray", {0.12, -0.02}}};
  if (task == "ketchup") return {{"ketchup", {-0.08, 0.0}}, {"plate", {0.15, 0.05}}};
  throw Error(ErrorCode::kUnknownTask, "unknown task '" + task + "'");
}

SynergyTrajectory sample_curve(const std::vector<double>& grid, double noise, std::mt19937_64& rng,
                               const std::function<SynergyPoint(double)>& curve) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  SynergyTrajectory tr;
  tr.times = grid;
  for (double t : grid) {
    SynergyPoint e = curve(t);
    for (Eigen::Index i = 0; i < e.size(); ++i) e(i) += noise * gauss(rng);
    tr.values.push_back(std::move(e));
  }
  return tr;
}

}  // namespace

std::vector<std::string> task_names() { return {"egg", "ketchup"}; }

TaskScenario task_scenario(const std::string& task) {
  TaskScenario s;
  s.task = task;
  if (task == "egg") {
    // Pick an egg and place it in a tray.
    s.grasp_label = "egg";
    s.place_label = "tray";
    s.preshape = vec2(0.0, 0.0);
    s.grasp_coords = vec2(-0.163, 0.231);
    s.manipulation_start = vec2(-0.154, 0.242);
    s.manipulation_end = vec2(-0.090, 0.273);
    s.mu = 0.64;
    s.grip_lower = 2.38;
    s.grip_upper = 3.16;
    s.mass = 0.068;
    return s;
  }
  if (task == "ketchup") {
    // Grasp a ketchup bottle and press it over a plate.
    s.grasp_label = "ketchup";
    s.place_label = "plate";
    s.preshape = vec2(0.25, 0.0);
    s.grasp_coords = vec2(0.144, 0.283);
    s.manipulation_start = vec2(0.152, 0.293);
    s.manipulation_end = vec2(0.311, 0.486);
    s.mu = 0.71;
    s.grip_lower = 2.38;
    s.grip_upper = 4.26;
    s.mass = 0.117;
    return s;
  }
  throw Error(ErrorCode::kUnknownTask, "unknown task '" + task + "'");
}

Matrix generator_directions() {
  Matrix raw(kHandJoints, 2);
  raw << 0.9, -0.3, 0.8, 0.2, 0.6, 0.5, 0.5, 0.1, 0.3, -0.6, 0.2, 0.4;
  Eigen::HouseholderQR<Matrix> qr(raw);
  Matrix q = qr.householderQ() * Matrix::Identity(kHandJoints, 2);
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    if (q.col(c).dot(raw.col(c)) < 0.0) q.col(c) *= -1.0;
  }
  return q;
}

JointConfiguration generator_theta0() {
  JointConfiguration t(kHandJoints);
  t << 0.20, 0.30, 0.25, 0.25, 0.20, 0.10;
  return t;
}

SynergyPoint scenario_coefficients(const TaskScenario& s, double t) {
  if (t <= s.release_time) return s.preshape + (s.grasp_coords - s.preshape) * smoothstep(t / s.grasp_time);
  if (t <= s.manipulation_start_time) {
    const double x = (t - s.release_time) / (s.manipulation_start_time - s.release_time);
    return s.grasp_coords + (s.manipulation_start - s.grasp_coords) * smoothstep(x);
  }
  const double x = (t - s.manipulation_start_time) / (s.manipulation_end_time - s.manipulation_start_time);
  return s.manipulation_start + (s.manipulation_end - s.manipulation_start) * smoothstep(x);
}

DemoSet generate_synthetic_demos(const TaskScenario& scenario, std::size_t count, double noise, std::uint64_t seed,
                                 std::size_t samples, double duration) {
  if (count < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two demonstrations");
  if (samples < 2 || !(duration > 0.0) || !(noise >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid demonstration sampling");
  }
  DemoSet set;
  set.truth.directions = generator_directions();
  set.truth.theta0 = generator_theta0();
  set.truth.times = uniform_grid(samples);
  for (double t : set.truth.times) set.truth.coefficients.push_back(scenario_coefficients(scenario, t));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t d = 0; d < count; ++d) {
    Demonstration demo;
    for (std::size_t i = 0; i < samples; ++i) {
      demo.times.push_back(set.truth.times[i] * duration);
      JointConfiguration q = set.truth.theta0 + set.truth.directions * set.truth.coefficients[i];
      if (noise > 0.0) {
        for (Eigen::Index j = 0; j < q.size(); ++j) q(j) += noise * gauss(rng);
      }
      demo.postures.push_back(std::move(q));
    }
    set.demos.push_back(std::move(demo));
  }
  return set;
}

DemoSet generate_synthetic_demos(const std::string& task, std::size_t count, double noise, std::uint64_t seed) {
  return generate_synthetic_demos(task_scenario(task), count, noise, seed);
}

std::vector<std::string> object_labels() { return {"egg", "ketchup", "plate", "tray"}; }

std::vector<Point3> object_surface(const std::string& label, const Eigen::Vector2d& base, double scale) {
  if (!(scale > 0.0)) throw Error(ErrorCode::kInvalidArgument, "object scale must be > 0");
  if (label == "egg") return egg_surface(base, scale);
  if (label == "tray") return box_surface(base, 0.10 * scale, 0.15 * scale, 0.03 * scale);
  if (label == "ketchup") return cylinder_surface(base, 0.025 * scale, 0.18 * scale);
  if (label == "plate") {
    std::vector<Point3> pts;
    add_disc(pts, base, 0.10 * scale, 0.015, 0.007);
    return pts;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown object label '" + label + "'");
}

std::vector<ObjectAnnotation> nominal_objects(const std::string& task) {
  std::vector<ObjectAnnotation> out;
  for (const auto& p : scene_layout(task)) out.push_back(annotate(p.label, object_surface(p.label, p.base)));
  return out;
}

SyntheticScene generate_synthetic_scene(const std::string& task, std::uint64_t seed, double noise) {
  const auto layout = scene_layout(task);
  if (!(noise >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "scene noise must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  std::uniform_real_distribution<double> table_x(-0.4, 0.4);
  std::uniform_real_distribution<double> table_y(-0.3, 0.3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto perturb = [&](Point3 p) {
    if (noise > 0.0) {
      for (int k = 0; k < 3; ++k) p(k) += noise * gauss(rng);
    }
    return p;
  };

  SyntheticScene scene;
  constexpr std::size_t table_points = 3500;
  for (std::size_t i = 0; i < table_points; ++i) {
    scene.plane_indices.push_back(scene.cloud.points.size());
    scene.cloud.points.push_back(perturb(Point3(table_x(rng), table_y(rng), 0.0)));
  }
  for (const auto& placement : layout) {
    const Eigen::Vector2d base = placement.base + Eigen::Vector2d(jitter(rng), jitter(rng));
    const auto surface = object_surface(placement.label, base);
    scene.objects.push_back(annotate(placement.label, surface));
    std::vector<std::size_t> idx;
    for (const auto& p : surface) {
      idx.push_back(scene.cloud.points.size());
      scene.cloud.points.push_back(perturb(p));
    }
    scene.object_indices.push_back(std::move(idx));
  }
  return scene;
}

LabeledFeatures svm_training_set(std::size_t per_class, std::uint64_t seed, double noise) {
  if (per_class == 0) throw Error(ErrorCode::kInvalidArgument, "need at least one sample per class");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scale(0.85, 1.15);
  std::normal_distribution<double> gauss(0.0, 1.0);
  LabeledFeatures out;
  for (const auto& label : object_labels()) {
    for (std::size_t k = 0; k < per_class; ++k) {
      Cluster cluster;
      const auto surface = object_surface(label, Eigen::Vector2d::Zero(), scale(rng));
      for (std::size_t i = 0; i < surface.size(); ++i) {
        Point3 p = surface[i];
        for (int c = 0; c < 3; ++c) p(c) += noise * gauss(rng);
        cluster.indices.push_back(i);
        cluster.points.push_back(p);
      }
      out.features.push_back(extract_features(cluster));
      out.labels.push_back(label);
    }
  }
  return out;
}

KernelBenchmark make_kernel_benchmark(std::uint64_t seed, const KernelBenchmarkOptions& options) {
  if (options.reference_points < 2 || options.evaluation_points < 2 || options.demos < 1) {
    throw Error(ErrorCode::kInvalidArgument, "invalid kernel benchmark options");
  }
  auto base = [](double t) { return vec2(-0.3 * logistic((t - 0.4) / 0.08), 0.25 * std::sin(kPi * t)); };
  struct Variant {
    const char* name;
    double d1;
    double d2;
  };
  const Variant variants[] = {{"cubical", 0.06, -0.04}, {"spherical", -0.05, 0.05}, {"cylindrical", 0.03, 0.07}};

  std::mt19937_64 rng(seed);
  const auto demo_grid = uniform_grid(101);
  auto encode = [&](const std::function<SynergyPoint(double)>& curve, std::uint64_t gmm_seed) {
    std::vector<SynergyTrajectory> demos;
    for (std::size_t d = 0; d < options.demos; ++d) demos.push_back(sample_curve(demo_grid, options.noise, rng, curve));
    GmmOptions gmm;
    gmm.components = options.gmm_components;
    gmm.seed = gmm_seed;
    return fit_gmm(demos, gmm);
  };

  KernelBenchmark bench;
  bench.reference = generate_reference(encode(base, seed + 1), uniform_grid(options.reference_points));
  const auto eval_grid = uniform_grid(options.evaluation_points);
  std::uint64_t offset = 2;
  for (const auto& v : variants) {
    auto curve = [&](double t) { return SynergyPoint(base(t) + vec2(v.d1, v.d2) * logistic((t - 0.5) / 0.1)); };
    ObjectInstance inst;
    inst.name = v.name;
    const GmmModel model = encode(curve, seed + offset++);
    inst.actual = generate_reference(model, eval_grid);
    for (double tv : options.via_times) {
      ViaPoint via;
      via.t_star = tv;
      via.desired_e = gmr_condition(model, tv).mean;
      via.desired_cov = options.via_variance * Matrix::Identity(2, 2);
      inst.via_points.push_back(std::move(via));
    }
    bench.instances.push_back(std::move(inst));
  }
  return bench;
}

}  // namespace ksyn
