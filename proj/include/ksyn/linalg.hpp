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

#include <Eigen/Dense>
#include <string_view>
#include <vector>

namespace ksyn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Moore-Penrose pseudo-inverse through an SVD. Throws RankDeficient when the
/// ratio of largest to smallest singular value among the min(rows, cols)
/// values exceeds `max_condition` (or the matrix is all zero).
Matrix checked_pinv(const Matrix& m, std::string_view what, double max_condition = 1e12);

/// 2-norm condition number (inf for a singular matrix).
double condition_number(const Matrix& m);

/// Symmetric part (A + Aᵀ)/2.
inline Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& a);

Vector to_vector(const std::vector<double>& v);
std::vector<double> to_std(const Vector& v);

}  // namespace ksyn
