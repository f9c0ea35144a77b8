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

#include "ksyn/force.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ksyn/error.hpp"

namespace ksyn {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  s << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return s;
}

Matrix synergy_stiffness(const GraspModel& model, const SynergyBasis& basis) {
  if (model.internal_stiffness.cols() != basis.joint_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "ξ has " + std::to_string(model.internal_stiffness.cols()) +
                                                   " columns, basis has " + std::to_string(basis.joint_dim()) +
                                                   " joints");
  }
  return model.internal_stiffness * basis.e_hat;
}

Vector normal_error(const GraspModel& model, double grip_error) {
  Vector e = Vector::Zero(static_cast<Eigen::Index>(3 * model.contact_count()));
  for (std::size_t i = 0; i < model.contact_count(); ++i) e(static_cast<Eigen::Index>(3 * i + 2)) = grip_error;
  return e;
}

Matrix actuation(const GraspModel& model) { return model.hand_jacobian * model.motor_constants.asDiagonal(); }

}  // namespace

Matrix grasp_matrix(const std::vector<ContactFrame>& contacts) {
  if (contacts.empty()) throw Error(ErrorCode::kInvalidArgument, "grasp needs at least one contact");
  Matrix g(6, static_cast<Eigen::Index>(3 * contacts.size()));
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    const auto& c = contacts[i];
    const Eigen::Vector3d z = c.normal.normalized();
    const Eigen::Vector3d x = (c.tangent - c.tangent.dot(z) * z).normalized();
    const Eigen::Vector3d y = z.cross(x);
    Eigen::Matrix3d r;
    r << x, y, z;
    const auto col = static_cast<Eigen::Index>(3 * i);
    g.block<3, 3>(0, col) = r;
    g.block<3, 3>(3, col) = skew(c.position) * r;
  }
  return g;
}

std::vector<ContactFrame> tripod_contacts(const Eigen::Vector3d& center, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tripod radius must be > 0");
  std::vector<ContactFrame> contacts;
  for (int i = 0; i < 3; ++i) {
    const double angle = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * i / 3.0;
    const Eigen::Vector3d radial(std::cos(angle), std::sin(angle), 0.0);
    contacts.push_back({center + radius * radial, -radial, Eigen::Vector3d::UnitZ()});
  }
  return contacts;
}

void validate(const GraspModel& model) {
  const Eigen::Index rows = model.grasp.cols();
  if (model.grasp.rows() != 6 || rows == 0 || rows % 3 != 0) {
    throw Error(ErrorCode::kDimensionMismatch, "grasp matrix must be 6 × 3n_c");
  }
  if (model.internal_stiffness.rows() != rows || model.hand_jacobian.rows() != rows) {
    throw Error(ErrorCode::kDimensionMismatch, "ξ and J_h must have 3n_c rows");
  }
  if (model.hand_jacobian.cols() != model.motor_constants.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "J_h columns must match the motor constant count");
  }
  if (!model.grasp.allFinite() || !model.internal_stiffness.allFinite() || !model.hand_jacobian.allFinite() ||
      !model.motor_constants.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "grasp model has non-finite entries");
  }
}

Vector stack(const ContactForceSet& forces) {
  Vector v(static_cast<Eigen::Index>(3 * forces.size()));
  for (std::size_t i = 0; i < forces.size(); ++i) v.segment<3>(static_cast<Eigen::Index>(3 * i)) = forces[i];
  return v;
}

ContactForceSet unstack(const Vector& stacked) {
  if (stacked.size() % 3 != 0) throw Error(ErrorCode::kDimensionMismatch, "stacked forces must be 3n_c long");
  ContactForceSet out;
  for (Eigen::Index i = 0; i < stacked.size(); i += 3) out.emplace_back(stacked.segment<3>(i));
  return out;
}

ContactForceSet contact_forces(const GraspModel& model, const Vector& omega, const SynergyBasis& basis,
                               const SynergyPoint& delta_e) {
  validate(model);
  if (omega.size() != 6) throw Error(ErrorCode::kDimensionMismatch, "external wrench must have 6 entries");
  if (delta_e.size() != basis.synergy_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "Δe has " + std::to_string(delta_e.size()) + " entries, basis has " +
                                                   std::to_string(basis.synergy_dim()) + " synergies");
  }
  const Matrix g_pinv = checked_pinv(model.grasp, "grasp matrix");
  const Vector f = g_pinv * omega + synergy_stiffness(model, basis) * delta_e;
  return unstack(f);
}

bool friction_cone_check(const ContactForce& force, double mu) {
  if (!(mu > 0.0)) throw Error(ErrorCode::kInvalidArgument, "friction coefficient must be > 0");
  const double normal = force.z();
  if (!(normal > 0.0)) return false;
  const double tangential = std::sqrt(force.x() * force.x() + force.y() * force.y());
  if (tangential == 0.0) return true;
  return normal / tangential > mu;
}

Vector motor_currents(const GraspModel& model, const ContactForceSet& forces) {
  validate(model);
  if (forces.size() != model.contact_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "expected " + std::to_string(model.contact_count()) + " contacts");
  }
  const Matrix a = actuation(model);
  if (a.rows() < a.cols()) throw Error(ErrorCode::kRankDeficient, "J_h·K_m cannot have full column rank");
  return checked_pinv(a, "J_h·K_m") * stack(forces);
}

ContactForceSet realized_forces(const GraspModel& model, const Vector& currents) {
  validate(model);
  if (currents.size() != model.motor_constants.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "current vector length does not match the motor count");
  }
  return unstack(actuation(model) * currents);
}

double grip_magnitude(const ContactForceSet& forces) {
  if (forces.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& f : forces) sum += f.z();
  return sum / static_cast<double>(forces.size());
}

ForceProfile ramp_profile(double lower, double upper, double rate, double dt, double hold) {
  if (!(dt > 0.0) || !(rate > 0.0) || !(hold >= 0.0) || !(upper >= lower)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid ramp profile parameters");
  }
  ForceProfile p;
  p.ramp_rate = rate;
  const double ramp_time = (upper - lower) / rate;
  const auto steps = static_cast<std::size_t>(std::ceil((ramp_time + hold) / dt - 1e-9));
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    p.times.push_back(t);
    p.forces.push_back(std::min(upper, lower + rate * t));
  }
  return p;
}

SynergyPoint force_correction(double grip_error, const GraspModel& model, const SynergyBasis& basis, double gain) {
  validate(model);
  if (!(gain > 0.0)) throw Error(ErrorCode::kInvalidArgument, "force gain must be > 0");
  const Matrix map_pinv = checked_pinv(synergy_stiffness(model, basis), "ξÊ");
  return gain * (map_pinv * normal_error(model, grip_error));
}

SynergyPoint adapt_force(const ForceProfile& target, const ForceProfile& measured, const GraspModel& model,
                         const SynergyBasis& basis, double gain) {
  if (target.size() == 0 || target.size() != measured.size() || target.forces.size() != target.size() ||
      measured.forces.size() != measured.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "force profiles must be non-empty and equally long");
  }
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (std::abs(target.times[i] - measured.times[i]) > 1e-12) {
      throw Error(ErrorCode::kDimensionMismatch, "force profiles are not time-aligned");
    }
  }
  return force_correction(target.forces.back() - measured.forces.back(), model, basis, gain);
}

ForceLoopResult simulate_force_loop(const GraspModel& model, const SynergyBasis& basis, const Vector& omega,
                                    const ForceLoopConfig& config) {
  validate(model);
  if (!(config.lag > 0.0) || !(config.dt > 0.0) || config.max_steps < 1) {
    throw Error(ErrorCode::kInvalidArgument, "force loop needs positive dt, lag and step budget");
  }
  const Eigen::Index s = basis.synergy_dim();
  const SynergyPoint zero = SynergyPoint::Zero(s);
  const double base_grip = grip_magnitude(contact_forces(model, omega, basis, zero));

  // grip(Δe) = base_grip + slope·Δe
  Vector slope(s);
  for (Eigen::Index j = 0; j < s; ++j) {
    slope(j) = grip_magnitude(contact_forces(model, omega, basis, SynergyPoint::Unit(s, j))) - base_grip;
  }
  if (!(slope.squaredNorm() > 0.0)) throw Error(ErrorCode::kRankDeficient, "synergies do not change the grip force");
  auto grip_of = [&](const SynergyPoint& de) { return base_grip + slope.dot(de); };

  // Contact is established at the lower bound of the band.
  SynergyPoint delta_e = slope * ((config.lower - base_grip) / slope.squaredNorm());
  const double plant_alpha = 1.0 - std::exp(-config.dt / config.lag);

  const ForceProfile schedule = ramp_profile(config.lower, config.upper, config.ramp_rate, config.dt, config.hold);
  const double ramp_end = (config.upper - config.lower) / config.ramp_rate;

  ContactForceSet measured_forces =
      realized_forces(model, motor_currents(model, contact_forces(model, omega, basis, delta_e)));

  ForceLoopResult result;
  result.target.ramp_rate = config.ramp_rate;
  result.measured.ramp_rate = config.ramp_rate;
  const auto total = std::min<std::size_t>(schedule.size(), static_cast<std::size_t>(config.max_steps));
  for (std::size_t k = 0; k < total; ++k) {
    const double t = schedule.times[k];
    const double measured = grip_magnitude(measured_forces);
    result.target.times.push_back(t);
    result.target.forces.push_back(schedule.forces[k]);
    result.measured.times.push_back(t);
    result.measured.forces.push_back(measured);

    ForceStep step;
    step.time = t;
    step.target = schedule.forces[k];
    step.measured = measured;
    step.forces = measured_forces;
    for (const auto& f : measured_forces) step.stable.push_back(friction_cone_check(f, config.mu));

    if (!result.settled && t >= ramp_end && std::abs(step.target - measured) < config.settle_tolerance) {
      result.settled = true;
      result.settle_time = t;
    }

    SynergyPoint correction = adapt_force(result.target, result.measured, model, basis, config.gain);
    const double current_grip = grip_of(delta_e);
    const double next_grip = grip_of(delta_e + correction);
    if (next_grip > config.upper && next_grip > current_grip) {
      const double scale = std::clamp((config.upper - current_grip) / (next_grip - current_grip), 0.0, 1.0);
      correction *= scale;
    }
    delta_e += correction;

    const ContactForceSet commanded = contact_forces(model, omega, basis, delta_e);
    step.currents = motor_currents(model, commanded);
    step.delta_e = delta_e;
    const ContactForceSet realized = realized_forces(model, step.currents);
    for (std::size_t i = 0; i < measured_forces.size(); ++i) {
      measured_forces[i] += plant_alpha * (realized[i] - measured_forces[i]);
    }
    result.steps.push_back(std::move(step));
  }
  return result;
}

}  // namespace ksyn
