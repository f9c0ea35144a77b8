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

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ksyn/error.hpp"
#include "oracles.hpp"

namespace testutil {

inline oracle::Mat to_oracle(const Eigen::MatrixXd& m) {
  oracle::Mat out = oracle::zeros(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  }
  return out;
}

inline oracle::Vec to_oracle(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

inline Eigen::VectorXd from_oracle(const oracle::Vec& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(rng);
  }
  return m;
}

inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, Eigen::Index n, double floor = 0.1) {
  const Eigen::MatrixXd a = random_matrix(rng, n, n);
  return a * a.transpose() + floor * Eigen::MatrixXd::Identity(n, n);
}

template <class F>
ksyn::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const ksyn::Error& e) {
    return e.code();
  }
  throw std::logic_error("expected ksyn::Error");
}

}  // namespace testutil

#define CHECK_ERROR_CODE(expr, code) CHECK(testutil::error_code_of([&] { (void)(expr); }) == (code))
