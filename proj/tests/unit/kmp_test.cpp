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

#include "ksyn/kmp.hpp"
#include "test_util.hpp"

using namespace ksyn;

namespace {

ReferenceTrajectory scalar_reference(const std::vector<double>& times, const std::vector<double>& means,
                                     double variance) {
  ReferenceTrajectory r;
  r.times = times;
  for (double m : means) {
    r.means.push_back(Vector::Constant(1, m));
    r.covariances.push_back(Matrix::Constant(1, 1, variance));
  }
  return r;
}

ReferenceTrajectory wave_reference(std::size_t n, Eigen::Index s) {
  ReferenceTrajectory r;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    Vector m(s);
    for (Eigen::Index k = 0; k < s; ++k) m(k) = std::sin(3.0 * t + static_cast<double>(k)) * 0.3;
    r.times.push_back(t);
    r.means.push_back(m);
    r.covariances.push_back(Matrix::Identity(s, s) * (0.01 + 0.005 * static_cast<double>(i % 3)));
  }
  return r;
}

std::vector<KernelSpec> all_kernels() {
  return {KernelSpec::exponential(0.1), KernelSpec::gaussian(0.1), KernelSpec::cauchy(0.1, 1.0, 2.0)};
}

// Dense oracle for the predictive mean: k*·(K + λΣ)⁻¹·μ with Gaussian elimination.
Vector oracle_mean(const ReferenceTrajectory& r, const KernelSpec& spec, double lambda, double t_star) {
  const std::size_t n = r.size();
  const auto s = static_cast<std::size_t>(r.dim());
  oracle::Mat a = oracle::zeros(n * s, n * s);
  oracle::Vec mu(n * s);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double k = kernel_eval(spec, r.times[i], r.times[j]);
      for (std::size_t d = 0; d < s; ++d) a[i * s + d][j * s + d] = k;
    }
    for (std::size_t d = 0; d < s; ++d) {
      mu[i * s + d] = r.means[i](static_cast<Eigen::Index>(d));
      for (std::size_t e = 0; e < s; ++e) {
        a[i * s + d][i * s + e] += lambda * r.covariances[i](static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(e));
      }
    }
  }
  const auto w = oracle::solve(a, mu);
  Vector out = Vector::Zero(static_cast<Eigen::Index>(s));
  for (std::size_t i = 0; i < n; ++i) {
    const double k = kernel_eval(spec, t_star, r.times[i]);
    for (std::size_t d = 0; d < s; ++d) out(static_cast<Eigen::Index>(d)) += k * w[i * s + d];
  }
  return out;
}

}  // namespace

TEST_CASE("kernel functions") {
  for (const auto& k : all_kernels()) CHECK(kernel_eval(k, 0.3, 0.3) == doctest::Approx(k.sigma2()));
  const auto e = KernelSpec::exponential(0.2, 1.5);
  CHECK(kernel_eval(e, 0.0, 0.2) == doctest::Approx(1.5 * std::exp(-1.0)).epsilon(1e-14));
  const auto g = KernelSpec::gaussian(0.2, 2.0);
  const auto c = KernelSpec::cauchy(0.2, 2.0, 1e6);
  for (double d = 0.0; d <= 1.0; d += 0.05) CHECK(std::abs(kernel_eval(g, 0, d) - kernel_eval(c, 0, d)) < 1e-4 * 2.0);
  CHECK(kernel_eval(g, 0.1, 0.4) == kernel_eval(g, 0.4, 0.1));
}

TEST_CASE("kernel spec construction") {
  CHECK(parse_kernel_kind("gaussian") == KernelKind::kGaussian);
  CHECK(parse_kernel_kind("Cauchy") == KernelKind::kCauchy);
  CHECK(parse_kernel_kind(to_string(KernelKind::kExponential)) == KernelKind::kExponential);
  CHECK_ERROR_CODE(parse_kernel_kind("laplace"), ErrorCode::kInvalidArgument);
  CHECK_ERROR_CODE(KernelSpec::gaussian(0.0), ErrorCode::kInvalidArgument);
  CHECK_ERROR_CODE(KernelSpec::gaussian(0.1, -1.0), ErrorCode::kInvalidArgument);
  CHECK_ERROR_CODE(KernelSpec::cauchy(0.1, 1.0, 0.0), ErrorCode::kInvalidArgument);
  CHECK_FALSE(KernelSpec::make(KernelKind::kGaussian, 0.1, 1.0, 5.0).alpha().has_value());
  CHECK(KernelSpec::make(KernelKind::kCauchy, 0.1, 1.0, 5.0).alpha() == 5.0);
}

TEST_CASE("kernel matrices are symmetric positive semidefinite") {
  CHECK(build_kernel_matrix(KernelSpec::gaussian(0.1, 2.5), {0.4}, 1)(0, 0) == 2.5);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& spec : all_kernels()) {
    const Matrix rep = build_kernel_matrix(spec, {0.5, 0.5, 0.5}, 2);
    CHECK((rep - rep.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(oracle::min_eigenvalue(testutil::to_oracle(rep)) >= -1e-9);
    std::vector<double> times;
    for (int i = 0; i < 15; ++i) times.push_back(u(rng));
    const Matrix k = build_kernel_matrix(spec, times, 2);
    CHECK(k.rows() == 30);
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(oracle::min_eigenvalue(testutil::to_oracle(k)) >= -1e-9);
  }
}

TEST_CASE("scalar closed forms") {
  const double sigma2 = 1.7;
  const double lambda = 0.3;
  const double m = 0.8;
  const double s = 0.4;
  const auto ref = scalar_reference({0.5}, {m}, s);
  const auto spec = KernelSpec::gaussian(0.1, sigma2);
  const auto model = kmp_fit(ref, spec, lambda);
  CHECK(model.mean_factor()(0) == doctest::Approx(m / (sigma2 + lambda * s)).epsilon(1e-14));
  CHECK(kmp_predict_mean(model, 0.5)(0) == doctest::Approx(sigma2 * m / (sigma2 + lambda * s)).epsilon(1e-14));
  const auto id = kmp_fit(scalar_reference({0.5}, {m}, 1.0), spec, lambda, MeanRegularizer::kIdentity);
  CHECK(kmp_predict_mean(id, 0.5)(0) == doctest::Approx(sigma2 * m / (sigma2 + lambda)).epsilon(1e-14));
  const double expected = (1.0 / lambda) * (sigma2 - sigma2 * sigma2 / (sigma2 + lambda * s));
  CHECK(kmp_predict_cov(model, 0.5)(0, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("prediction far from the data reverts to the prior") {
  const auto ref = wave_reference(6, 2);
  const auto spec = KernelSpec::gaussian(0.01, 0.9);
  const double lambda = 0.5;
  const auto model = kmp_fit(ref, spec, lambda);
  const Matrix cov = kmp_predict_cov(model, 50.0);
  CHECK((cov - (6.0 / lambda) * 0.9 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(kmp_predict_mean(model, 50.0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("predictive mean matches the dense solve oracle") {
  const auto ref = wave_reference(12, 2);
  for (const auto& spec : all_kernels()) {
    for (double lambda : {1e-3, 0.5, 3.0}) {
      const auto model = kmp_fit(ref, spec, lambda);
      for (double t : {0.0, 0.13, 0.5, 0.77, 1.2}) {
        CHECK((kmp_predict_mean(model, t) - oracle_mean(ref, spec, lambda, t)).cwiseAbs().maxCoeff() < 1e-9);
      }
      for (double t : {0.05, 0.61}) {
        const Matrix c = kmp_predict_cov(model, t);
        CHECK((c - c.transpose()).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(oracle::min_eigenvalue(testutil::to_oracle(c)) >= -1e-9);
      }
    }
  }
}

TEST_CASE("vanishing regularization interpolates the reference") {
  const auto ref = wave_reference(21, 2);
  const auto model = kmp_fit(ref, KernelSpec::gaussian(0.05), 1e-8);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CHECK((kmp_predict_mean(model, ref.times[i]) - ref.means[i]).cwiseAbs().maxCoeff() < 1e-3);
  }
  const auto again = kmp_fit(ref, KernelSpec::gaussian(0.05), 1e-8);
  CHECK(again.mean_factor() == model.mean_factor());
  CHECK(again.cov_factor() == model.cov_factor());
}

TEST_CASE("constant reference is reproduced in the interior") {
  std::vector<double> times, means;
  for (int i = 0; i <= 20; ++i) {
    times.push_back(i / 20.0);
    means.push_back(0.42);
  }
  const auto ref = scalar_reference(times, means, 0.01);
  // Length scale well above the sample spacing.
  for (const auto& spec : {KernelSpec::exponential(0.5), KernelSpec::gaussian(0.5), KernelSpec::cauchy(0.5)}) {
    const auto model = kmp_fit(ref, spec, 1e-4);
    for (double t : {0.25, 0.5, 0.73}) CHECK(std::abs(kmp_predict_mean(model, t)(0) - 0.42) < 1e-2 * 0.42);
  }
}

TEST_CASE("via points") {
  const auto ref = wave_reference(11, 2);
  ViaPoint via{0.5, (Vector(2) << 0.9, -0.7).finished(), 1e-6 * Matrix::Identity(2, 2)};

  const auto replaced = insert_via_point(ref, via, 0.0);
  CHECK(replaced.size() == ref.size());
  CHECK(replaced.means[5] == via.desired_e);

  ViaPoint fresh = via;
  fresh.t_star = 0.43;
  const auto grown = insert_via_point(ref, fresh, 0.01);
  CHECK(grown.size() == ref.size() + 1);
  CHECK(std::is_sorted(grown.times.begin(), grown.times.end()));
  CHECK(default_via_radius(ref) > 0.0);

  for (const auto& spec : all_kernels()) {
    const auto adapted = insert_via_point(ref, fresh);
    const auto model = kmp_fit(adapted, spec, 1.0);
    const Vector p = kmp_predict_mean(model, fresh.t_star);
    CHECK((p - fresh.desired_e).cwiseAbs().maxCoeff() < 0.01);
    CHECK((p - oracle_mean(adapted, spec, 1.0, fresh.t_star)).cwiseAbs().maxCoeff() < 1e-9);
  }

  ViaPoint wrong = via;
  wrong.desired_e = Vector::Zero(3);
  CHECK_ERROR_CODE(insert_via_point(ref, wrong), ErrorCode::kDimensionMismatch);
  CHECK_ERROR_CODE(insert_via_point(ref, via, -1.0), ErrorCode::kInvalidArgument);
}

TEST_CASE("priority fusion") {
  const auto a = wave_reference(5, 2);
  std::vector<double> ones(5, 1.0);
  const auto same = fuse_priorities({a}, {ones});
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK((same.means[i] - a.means[i]).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((same.covariances[i] - a.covariances[i]).cwiseAbs().maxCoeff() < 1e-12);
  }

  const auto zero = scalar_reference({0.0, 1.0}, {0.0, 0.0}, 1.0);
  const auto one = scalar_reference({0.0, 1.0}, {1.0, 1.0}, 1.0);
  const auto fused = fuse_priorities({zero, one}, {{1.0, 1.0}, {1.0, 1.0}});
  CHECK(fused.means[0](0) == doctest::Approx(0.5));
  CHECK(fused.covariances[0](0, 0) == doctest::Approx(0.5));

  double previous = 1.0;
  for (double w : {1.0, 10.0, 100.0, 1000.0}) {
    const auto f = fuse_priorities({zero, one}, {{w, w}, {1.0, 1.0}});
    const double expected = 1.0 / (1.0 + w);  // precision-weighted mean with precisions w and 1
    CHECK(f.means[1](0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(f.means[1](0) < previous);
    previous = f.means[1](0);
  }
  CHECK(previous < 1e-2);
  CHECK_ERROR_CODE(fuse_priorities({zero, one}, {{1.0, 1.0}}), ErrorCode::kDimensionMismatch);
}

TEST_CASE("fit rejects bad inputs") {
  const auto ref = wave_reference(4, 1);
  CHECK_ERROR_CODE(kmp_fit(ref, KernelSpec::gaussian(), 0.0), ErrorCode::kInvalidArgument);
  CHECK_ERROR_CODE(kmp_fit(ReferenceTrajectory{}, KernelSpec::gaussian()), ErrorCode::kInvalidArgument);
  auto dup = ref;
  dup.times[2] = dup.times[1];
  CHECK_ERROR_CODE(kmp_fit(dup, KernelSpec::gaussian()), ErrorCode::kNonMonotonicTime);
}
