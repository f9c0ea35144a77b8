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
#include <functional>
#include <numbers>
#include <random>

#include "ksyn/trajectory.hpp"
#include "test_util.hpp"

using namespace ksyn;

namespace {

SynergyBasis identity_basis(Eigen::Index j, Eigen::Index s) {
  SynergyBasis b;
  b.e_hat = Matrix::Identity(j, s);
  b.theta0 = Vector::Zero(j);
  b.variance_fractions = Vector::Constant(s, 1.0 / static_cast<double>(s));
  return b;
}

Demonstration demo_from(const std::vector<double>& times, const std::function<Vector(double)>& f) {
  Demonstration d;
  d.times = times;
  for (double t : times) d.postures.push_back(f(t));
  return d;
}

std::vector<SynergyTrajectory> gaussian_cloud(const Vector& mean, const Matrix& cov, std::size_t count,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  const Matrix l = cov.llt().matrixL();
  SynergyTrajectory tr;
  for (std::size_t i = 0; i < count; ++i) {
    Vector z(mean.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = n(rng);
    const Vector x = mean + l * z;
    tr.times.push_back(x(0));
    tr.values.push_back(x.tail(x.size() - 1));
  }
  return {tr};
}

}  // namespace

TEST_CASE("uniform grid spans the unit interval") {
  const auto g = uniform_grid(5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 1.0);
  CHECK(g[2] == doctest::Approx(0.5));
  CHECK(uniform_grid(1) == std::vector<double>{0.0});
}

TEST_CASE("interpolation of demonstrations onto a grid") {
  const auto basis = identity_basis(3, 2);
  const std::vector<double> times{0.0, 1.0, 2.5, 4.0};
  const auto constant = demo_from(times, [](double) { return Vector::Zero(3); });
  const auto grid = uniform_grid(11);
  auto out = interpolate_coefficients({constant}, basis, grid);
  REQUIRE(out.size() == 1);
  for (const auto& v : out[0].values) CHECK(v.cwiseAbs().maxCoeff() == 0.0);

  const auto linear = demo_from(times, [](double t) { return Vector((Vector(3) << 2.0 * t, -t, 7.0).finished()); });
  out = interpolate_coefficients({linear}, basis, grid);
  CHECK(out[0].values[5](0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(out[0].values[5](1) == doctest::Approx(-2.0).epsilon(1e-12));

  std::vector<double> dense;
  for (int i = 0; i <= 400; ++i) dense.push_back(i / 400.0);
  const auto sine = demo_from(dense, [](double t) {
    return Vector((Vector(3) << std::sin(2 * std::numbers::pi * t), 0, 0).finished());
  });
  const auto fine = uniform_grid(137);
  out = interpolate_coefficients({sine}, basis, fine);
  double worst = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    worst = std::max(worst, std::abs(out[0].values[i](0) - std::sin(2 * std::numbers::pi * fine[i])));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("interpolation rejects malformed demonstrations") {
  const auto basis = identity_basis(2, 1);
  Demonstration one{{0.0}, {Vector::Zero(2)}};
  CHECK_ERROR_CODE(interpolate_coefficients({one}, basis, uniform_grid(3)), ErrorCode::kEmptyDemo);
  Demonstration backwards{{0.0, 1.0, 0.5}, {Vector::Zero(2), Vector::Zero(2), Vector::Zero(2)}};
  CHECK_ERROR_CODE(interpolate_coefficients({backwards}, basis, uniform_grid(3)), ErrorCode::kNonMonotonicTime);
  Demonstration mismatched{{0.0, 1.0}, {Vector::Zero(2)}};
  CHECK_ERROR_CODE(interpolate_coefficients({mismatched}, basis, uniform_grid(3)), ErrorCode::kDimensionMismatch);
  SynergyTrajectory tr{{0.0, 1.0}, {Vector::Zero(1), Vector::Ones(1)}};
  CHECK_ERROR_CODE(resample(tr, {0.5, 1.5}), ErrorCode::kInvalidArgument);
}

TEST_CASE("single component recovers the sample moments") {
  Vector mean(3);
  mean << 0.5, 1.0, -2.0;
  Matrix cov(3, 3);
  cov << 0.04, 0.01, 0.0, 0.01, 0.09, 0.02, 0.0, 0.02, 0.25;
  const auto data = gaussian_cloud(mean, cov, 2000, 17);
  GmmOptions opt;
  opt.components = 1;
  opt.seed = 4;
  const auto model = fit_gmm(data, opt);
  REQUIRE(model.components() == 1);
  CHECK(model.priors[0] == doctest::Approx(1.0));

  Vector sample_mean = Vector::Zero(3);
  for (std::size_t i = 0; i < data[0].size(); ++i) {
    sample_mean(0) += data[0].times[i];
    sample_mean.tail(2) += data[0].values[i];
  }
  sample_mean /= static_cast<double>(data[0].size());
  CHECK((model.means[0] - sample_mean).cwiseAbs().maxCoeff() < 1e-9);
  for (Eigen::Index k = 0; k < 3; ++k) {
    const double se = std::sqrt(cov(k, k) / 2000.0);
    CHECK(std::abs(model.means[0](k) - mean(k)) < 3.0 * se);
  }
}

TEST_CASE("two well separated modes are split cleanly") {
  Matrix cov = 0.01 * Matrix::Identity(2, 2);
  Vector m1(2), m2(2);
  m1 << 0.2, 0.0;
  m2 << 0.8, 1.0;  // 10 sigma apart in both coordinates
  auto a = gaussian_cloud(m1, cov, 150, 1);
  auto b = gaussian_cloud(m2, cov, 150, 2);
  GmmOptions opt;
  opt.components = 2;
  opt.seed = 9;
  const auto model = fit_gmm({a[0], b[0]}, opt);

  int agree = 0;
  int total = 0;
  for (const auto* tr : {&a[0], &b[0]}) {
    for (std::size_t i = 0; i < tr->size(); ++i) {
      Vector x(2);
      x << tr->times[i], tr->values[i](0);
      const bool nearest_first = (x - m1).norm() < (x - m2).norm();
      std::size_t best = 0;
      double best_ll = -1e300;
      for (std::size_t n = 0; n < 2; ++n) {
        Matrix one(1, 2);
        one.row(0) = x.transpose();
        GmmModel single{{1.0}, {model.means[n]}, {model.covariances[n]}};
        const double ll = std::log(model.priors[n]) + gmm_log_likelihood(single, one);
        if (ll > best_ll) {
          best_ll = ll;
          best = n;
        }
      }
      const bool fitted_first = (model.means[best] - m1).norm() < (model.means[best] - m2).norm();
      agree += fitted_first == nearest_first ? 1 : 0;
      ++total;
    }
  }
  CHECK(static_cast<double>(agree) / total > 0.99);
}

TEST_CASE("EM is deterministic and its log-likelihood never decreases") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 0.02);
  std::vector<SynergyTrajectory> data;
  for (int d = 0; d < 5; ++d) {
    SynergyTrajectory tr;
    for (double t : uniform_grid(60)) {
      tr.times.push_back(t);
      tr.values.push_back((Vector(2) << std::sin(3 * t) + n(rng), t * t + n(rng)).finished());
    }
    data.push_back(tr);
  }
  GmmOptions opt;
  opt.components = 4;
  opt.seed = 3;
  const auto first = fit_gmm_traced(data, opt);
  const auto second = fit_gmm_traced(data, opt);
  CHECK(first.iterations == second.iterations);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(first.model.priors[k] == second.model.priors[k]);
    CHECK(first.model.means[k] == second.model.means[k]);
    CHECK(first.model.covariances[k] == second.model.covariances[k]);
  }
  for (std::size_t i = 1; i < first.log_likelihood.size(); ++i) {
    CHECK(first.log_likelihood[i] >= first.log_likelihood[i - 1] - 1e-9 * std::abs(first.log_likelihood[i - 1]));
  }
  double total = 0.0;
  for (double p : first.model.priors) total += p;
  CHECK(std::abs(total - 1.0) < 1e-12);
  CHECK_NOTHROW(validate(first.model));

  opt.components = 200;
  CHECK_ERROR_CODE(fit_gmm(data, opt), ErrorCode::kInvalidArgument);
}

TEST_CASE("single Gaussian conditional matches the closed form") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 25; ++trial) {
    const Matrix cov = testutil::random_spd(rng, 4);
    const Vector mu = testutil::random_matrix(rng, 4, 1);
    GmmModel model{{1.0}, {mu}, {cov}};
    const double t = mu(0) + 0.7;
    const auto c = gmr_condition(model, t);

    const auto full = testutil::to_oracle(cov);
    oracle::Mat stt{{full[0][0]}};
    oracle::Mat ste = oracle::zeros(1, 3);
    for (int j = 0; j < 3; ++j) ste[0][j] = full[0][j + 1];
    const auto gain = oracle::solve(stt, ste);  // Σ_tt⁻¹ Σ_te
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(c.mean(j) - (mu(j + 1) + gain[0][j] * (t - mu(0)))) < 1e-9);
      for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(c.covariance(j, k) - (full[j + 1][k + 1] - full[0][j + 1] * gain[0][k])) < 1e-9);
      }
    }
  }
}

TEST_CASE("GMR conditioning properties") {
  Matrix cov = Matrix::Identity(3, 3) * 0.001;
  Vector a(3), b(3);
  a << 0.2, 1.0, 2.0;
  b << 0.8, -1.0, 0.5;
  GmmModel two{{0.5, 0.5}, {a, b}, {cov, cov}};
  const auto at_a = gmr_condition(two, 0.2);
  GmmModel only_a{{1.0}, {a}, {cov}};
  const auto ref = gmr_condition(only_a, 0.2);
  CHECK((at_a.mean - ref.mean).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((at_a.covariance - ref.covariance).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(gmr_responsibilities(two, 0.2).sum() == doctest::Approx(1.0));

  GmmModel decoupled{{1.0}, {a}, {Matrix::Identity(3, 3)}};
  CHECK((gmr_condition(decoupled, -3.0).mean - gmr_condition(decoupled, 5.0).mean).cwiseAbs().maxCoeff() == 0.0);

  const auto single = generate_reference(two, {0.4});
  REQUIRE(single.size() == 1);
  CHECK(single.means[0] == gmr_condition(two, 0.4).mean);
  const auto ref_traj = generate_reference(two, uniform_grid(41));
  for (const auto& c : ref_traj.covariances) CHECK(oracle::min_eigenvalue(testutil::to_oracle(c)) >= -1e-9);
  CHECK_ERROR_CODE(generate_reference(two, {0.5, 0.1}), ErrorCode::kNonMonotonicTime);
}

TEST_CASE("reference follows a noiseless linear generator") {
  std::vector<SynergyTrajectory> data;
  const auto grid = uniform_grid(51);
  for (int d = 0; d < 3; ++d) {
    SynergyTrajectory tr;
    for (double t : grid) {
      tr.times.push_back(t);
      tr.values.push_back((Vector(2) << 0.5 * t - 0.1, -0.3 * t).finished());
    }
    data.push_back(tr);
  }
  GmmOptions opt;
  opt.components = 3;
  opt.seed = 1;
  const auto ref = generate_reference(fit_gmm(data, opt), grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(ref.means[i](0) - (0.5 * grid[i] - 0.1)) < 0.02);
    CHECK(std::abs(ref.means[i](1) + 0.3 * grid[i]) < 0.02);
  }
}

TEST_CASE("invalid models are rejected") {
  GmmModel bad{{0.7, 0.2}, {Vector::Zero(2), Vector::Zero(2)}, {Matrix::Identity(2, 2), Matrix::Identity(2, 2)}};
  CHECK_ERROR_CODE(validate(bad), ErrorCode::kInvalidArgument);
  GmmModel indefinite{{1.0}, {Vector::Zero(2)}, {-Matrix::Identity(2, 2)}};
  CHECK_ERROR_CODE(validate(indefinite), ErrorCode::kDegenerateComponent);
}

TEST_CASE("covariance floor keeps degenerate components positive definite") {
  SynergyTrajectory flat;
  for (double t : uniform_grid(40)) {
    flat.times.push_back(t);
    flat.values.push_back((Vector(2) << 0.3, 0.3).finished());  // no spread at all in e
  }
  GmmOptions opt;
  opt.components = 2;
  const auto model = fit_gmm({flat}, opt);
  for (const auto& c : model.covariances) CHECK(oracle::min_eigenvalue(testutil::to_oracle(c)) > 0.0);
  CHECK_NOTHROW(validate(model));
}
