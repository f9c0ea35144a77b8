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

#include <vector>

#include <Eigen/Dense>

#include "ksyn/synergy.hpp"

namespace ksyn {

/// Per-contact force in the contact frame: x, y tangential, z along the
/// inward normal. Newtons.
using ContactForce = Eigen::Vector3d;
using ContactForceSet = std::vector<ContactForce>;

/// Point contact with friction. `normal` points into the object; `tangent` is
/// the contact-frame x axis (y = normal × tangent).
struct ContactFrame {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d tangent = Eigen::Vector3d::UnitX();
};

/// 6 × 3n_c grasp matrix mapping stacked contact-frame forces to the object
/// wrench about the object origin.
Matrix grasp_matrix(const std::vector<ContactFrame>& contacts);

/// Three contacts spaced 120° around the vertical axis through `center`,
/// tangent x along world +z.
std::vector<ContactFrame> tripod_contacts(const Eigen::Vector3d& center, double radius);

struct GraspModel {
  Matrix grasp;               // G, 6 × 3n_c
  Matrix internal_stiffness;  // ξ, 3n_c × J
  Matrix hand_jacobian;       // J_h, 3n_c × M
  Vector motor_constants;     // diagonal of K_m, length M

  std::size_t contact_count() const { return static_cast<std::size_t>(grasp.cols() / 3); }
};

void validate(const GraspModel& model);

/// f_c = G†ω + ξÊΔe, split per contact.
ContactForceSet contact_forces(const GraspModel& model, const Vector& omega, const SynergyBasis& basis,
                               const SynergyPoint& delta_e);

/// Stable iff F_z / √(F_x² + F_y²) > μ. Zero tangential load with positive
/// normal force is stable; a non-positive normal force never is.
bool friction_cone_check(const ContactForce& force, double mu);

/// I = (J_h·K_m)† f_c.
Vector motor_currents(const GraspModel& model, const ContactForceSet& forces);

/// J_h·K_m·I, split per contact.
ContactForceSet realized_forces(const GraspModel& model, const Vector& currents);

/// Mean normal force across contacts.
double grip_magnitude(const ContactForceSet& forces);

Vector stack(const ContactForceSet& forces);
ContactForceSet unstack(const Vector& stacked);

struct ForceProfile {
  std::vector<double> times;   // seconds
  std::vector<double> forces;  // newtons
  double ramp_rate = 0.0;      // N/s

  std::size_t size() const { return times.size(); }
};

/// Linear ramp from `lower` to `upper` at `rate`, then held for `hold`
/// seconds, sampled every `dt`.
ForceProfile ramp_profile(double lower, double upper, double rate, double dt, double hold);

/// Δe = gain·(ξÊ)†·e_n where e_n puts the latest grip error (target −
/// measured) on every contact normal.
SynergyPoint adapt_force(const ForceProfile& target, const ForceProfile& measured, const GraspModel& model,
                         const SynergyBasis& basis, double gain);

/// Same correction for an explicit grip error.
SynergyPoint force_correction(double grip_error, const GraspModel& model, const SynergyBasis& basis, double gain);

struct ForceLoopConfig {
  double mu = 0.64;
  double gain = 0.5;
  double lower = 2.38;
  double upper = 3.16;
  double ramp_rate = 0.78;
  double dt = 0.01;
  double lag = 0.004;  // first-order plant time constant, seconds
  double hold = 1.0;
  double settle_tolerance = 0.01;
  int max_steps = 5000;
};

struct ForceStep {
  double time = 0.0;
  double target = 0.0;
  double measured = 0.0;
  SynergyPoint delta_e;
  ContactForceSet forces;
  Vector currents;
  std::vector<bool> stable;
};

struct ForceLoopResult {
  std::vector<ForceStep> steps;
  ForceProfile target;
  ForceProfile measured;
  bool settled = false;
  double settle_time = 0.0;
};

/// Closed grip-force loop: command Δe → contact forces → motor
/// currents → first-order plant → tactile reading → adapt_force. The
/// commanded grip is capped at `upper`.
ForceLoopResult simulate_force_loop(const GraspModel& model, const SynergyBasis& basis, const Vector& omega,
                                    const ForceLoopConfig& config);

}  // namespace ksyn
