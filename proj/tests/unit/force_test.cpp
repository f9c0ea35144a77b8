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

#include <doctest.h>

#include <cmath>
#include <random>

#include "ksyn/force.hpp"
#include "ksyn/task.hpp"
#include "test_util.hpp"

using namespace ksyn;

namespace {

SynergyBasis hand_basis() {
  SynergyBasis b;
  Matrix raw(6, 2);
  raw << 0.5, 0.1, 0.4, -0.2, 0.3, 0.5, 0.35, 0.4, 0.2, 0.1, 0.1, -0.3;
  b.e_hat = raw.householderQr().householderQ() * Matrix::Identity(6, 2);
  for (Eigen::Index j = 0; j < 2; ++j) {
    if (b.e_hat.col(j).sum() < 0) b.e_hat.col(j) *= -1.0;
  }
  b.theta0 = Vector::Constant(6, 0.2);
  b.variance_fractions = (Vector(2) << 0.8, 0.15).finished();
  return b;
}

GraspModel egg_model() {
  ObjectPose pose;
  pose.extents = Eigen::Vector3d(0.044, 0.044, 0.058);
  return make_grasp_model(pose, 40.0, 0.5);
}

bool cone_oracle(const ContactForce& f, double mu) {
  if (f.z() <= 0.0) return false;
  const double tangential = std::sqrt(f.x() * f.x() + f.y() * f.y());
  return tangential == 0.0 || f.z() / tangential > mu;
}

}  // namespace

TEST_CASE("friction cone inequality") {
  CHECK(friction_cone_check(ContactForce(0, 0, 1), 0.64));
  CHECK_FALSE(friction_cone_check(ContactForce(1, 0, 0.4), 0.64));
  CHECK_FALSE(friction_cone_check(ContactForce(0, 0, 0), 0.64));
  CHECK_FALSE(friction_cone_check(ContactForce(0, 0, -1), 0.64));
  const ContactForce f(0.3, -0.2, 0.5);
  CHECK(friction_cone_check(7.3 * f, 0.64) == friction_cone_check(f, 0.64));
  CHECK_ERROR_CODE(friction_cone_check(f, 0.0), ErrorCode::kInvalidArgument);

  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> mu_dist(0.05, 2.0);
  for (int i = 0; i < 2000; ++i) {
    const ContactForce c(u(rng), u(rng), u(rng));
    const double mu = mu_dist(rng);
    CHECK(friction_cone_check(c, mu) == cone_oracle(c, mu));
    const double angle = 3.0 * u(rng);
    const ContactForce rotated(std::cos(angle) * c.x() - std::sin(angle) * c.y(),
                               std::sin(angle) * c.x() + std::cos(angle) * c.y(), c.z());
    const double ratio = c.z() / std::hypot(c.x(), c.y());
    if (std::abs(ratio - mu) > 1e-9) CHECK(friction_cone_check(rotated, mu) == friction_cone_check(c, mu));
  }
}

TEST_CASE("grasp matrix balances wrenches") {
  const auto contacts = tripod_contacts(Eigen::Vector3d(0.01, 0.0, 0.02), 0.03);
  REQUIRE(contacts.size() == 3);
  const Matrix g = grasp_matrix(contacts);
  CHECK(g.rows() == 6);
  CHECK(g.cols() == 9);

  GraspModel model = egg_model();
  model.internal_stiffness.setZero();
  const auto basis = hand_basis();
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector omega = testutil::random_matrix(rng, 6, 1);
    const Vector f = stack(contact_forces(model, omega, basis, Vector::Ones(2)));
    CHECK((model.grasp * f - omega).cwiseAbs().maxCoeff() < 1e-9);
    // Minimum-norm balance: f = Gᵀ(GGᵀ)⁻¹ω.
    const auto gg = testutil::to_oracle(Matrix(model.grasp * model.grasp.transpose()));
    const auto y = testutil::from_oracle(oracle::solve(gg, testutil::to_oracle(omega)));
    CHECK((f - model.grasp.transpose() * y).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("contact forces are linear in the wrench and synergy offset") {
  const auto model = egg_model();
  const auto basis = hand_basis();
  for (const auto& f : contact_forces(model, Vector::Zero(6), basis, Vector::Zero(2))) CHECK(f.isZero(0.0));

  const Vector de = (Vector(2) << 0.03, -0.01).finished();
  const Vector once = stack(contact_forces(model, Vector::Zero(6), basis, de));
  const Vector twice = stack(contact_forces(model, Vector::Zero(6), basis, Vector(2.0 * de)));
  CHECK((twice - 2.0 * once).cwiseAbs().maxCoeff() < 1e-12);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector w1 = testutil::random_matrix(rng, 6, 1);
    const Vector w2 = testutil::random_matrix(rng, 6, 1);
    const Vector e1 = testutil::random_matrix(rng, 2, 1, 0.05);
    const Vector e2 = testutil::random_matrix(rng, 2, 1, 0.05);
    const Vector sum = stack(contact_forces(model, Vector(w1 + w2), basis, Vector(e1 + e2)));
    const Vector parts = stack(contact_forces(model, w1, basis, e1)) + stack(contact_forces(model, w2, basis, e2));
    CHECK((sum - parts).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_ERROR_CODE(contact_forces(model, Vector::Zero(5), basis, Vector::Zero(2)), ErrorCode::kDimensionMismatch);
  CHECK_ERROR_CODE(contact_forces(model, Vector::Zero(6), basis, Vector::Zero(3)), ErrorCode::kDimensionMismatch);
}

TEST_CASE("motor currents") {
  GraspModel model;
  model.grasp = grasp_matrix(tripod_contacts(Eigen::Vector3d::Zero(), 0.02));
  model.internal_stiffness = Matrix::Zero(9, 6);
  model.hand_jacobian = Matrix::Identity(9, 9);
  model.motor_constants = Vector::Constant(9, 2.0);
  ContactForceSet f{ContactForce(1, 2, 3), ContactForce(-1, 0.5, 2), ContactForce(0, 0, 4)};
  CHECK((motor_currents(model, f) - 0.5 * stack(f)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(motor_currents(model, ContactForceSet(3, ContactForce::Zero())).isZero(0.0));

  const auto real = egg_model();
  std::mt19937_64 rng(3);
  const Vector currents = testutil::random_matrix(rng, 6, 1);
  const ContactForceSet in_range = realized_forces(real, currents);
  const Vector solved = motor_currents(real, in_range);
  CHECK((stack(realized_forces(real, solved)) - stack(in_range)).cwiseAbs().maxCoeff() < 1e-9);
  const auto a = testutil::to_oracle(Matrix(real.hand_jacobian * real.motor_constants.asDiagonal()));
  const auto ls = testutil::from_oracle(oracle::least_squares(a, testutil::to_oracle(stack(in_range))));
  CHECK((solved - ls).cwiseAbs().maxCoeff() < 1e-9);

  GraspModel deficient = model;
  deficient.hand_jacobian = Matrix::Zero(9, 9);
  CHECK_ERROR_CODE(motor_currents(deficient, f), ErrorCode::kRankDeficient);
}

TEST_CASE("force correction closes the loop") {
  const auto model = egg_model();
  const auto basis = hand_basis();
  const Vector omega = holding_wrench(0.068);
  const Vector start = (Vector(2) << 0.02, 0.01).finished();
  const double grip = grip_magnitude(contact_forces(model, omega, basis, start));
  const double target = grip + 0.8;

  ForceProfile t{{0.0, 0.01}, {target, target}, 0.0};
  ForceProfile m{{0.0, 0.01}, {target, target}, 0.0};
  CHECK(adapt_force(t, m, model, basis, 0.5).isZero(0.0));
  m.forces.back() = grip;
  for (double gain : {0.1, 0.5, 1.0}) {
    const Vector de = adapt_force(t, m, model, basis, gain);
    const double after = grip_magnitude(contact_forces(model, omega, basis, Vector(start + de)));
    CHECK(after > grip);
    CHECK(std::abs(target - after) < std::abs(target - grip));
  }
  const Vector c1 = force_correction(0.3, model, basis, 0.5);
  const Vector c2 = force_correction(0.45, model, basis, 0.5);
  CHECK((force_correction(0.75, model, basis, 0.5) - (c1 + c2)).cwiseAbs().maxCoeff() < 1e-12);

  ForceProfile shifted = m;
  shifted.times.back() = 0.02;
  CHECK_ERROR_CODE(adapt_force(t, shifted, model, basis, 0.5), ErrorCode::kDimensionMismatch);
}

TEST_CASE("ramp profile") {
  const auto p = ramp_profile(2.38, 3.16, 0.78, 0.01, 1.0);
  CHECK(p.forces.front() == doctest::Approx(2.38));
  CHECK(p.forces.back() == doctest::Approx(3.16));
  CHECK(p.times.back() == doctest::Approx(2.0));
  for (std::size_t i = 1; i < p.size(); ++i) {
    CHECK(p.times[i] > p.times[i - 1]);
    CHECK(p.forces[i] >= p.forces[i - 1]);
  }
  CHECK_ERROR_CODE(ramp_profile(3.0, 2.0, 1.0, 0.01, 0.0), ErrorCode::kInvalidArgument);
}

TEST_CASE("simulated grip settles inside the band") {
  const auto model = egg_model();
  const auto basis = hand_basis();
  ForceLoopConfig cfg;
  const auto result = simulate_force_loop(model, basis, holding_wrench(0.068), cfg);
  CHECK(result.settled);
  const double final_grip = result.measured.forces.back();
  CHECK(final_grip >= cfg.lower - 1e-9);
  CHECK(final_grip <= cfg.upper + 1e-9);
  for (const auto& step : result.steps) {
    CHECK(step.measured <= cfg.upper + 1e-9);
    for (bool s : step.stable) CHECK(s);
  }
}
