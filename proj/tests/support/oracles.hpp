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

// Reference implementations used only by tests. They work on plain nested
// vectors and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;

inline Mat zeros(std::size_t r, std::size_t c) { return Mat(r, Vec(c, 0.0)); }

inline Mat identity(std::size_t n) {
  Mat m = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

inline Mat transpose(const Mat& a) {
  if (a.empty()) return {};
  Mat t = zeros(a[0].size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  }
  return t;
}

inline Mat multiply(const Mat& a, const Mat& b) {
  Mat c = zeros(a.size(), b.empty() ? 0 : b[0].size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      for (std::size_t j = 0; j < c[i].size(); ++j) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

inline Vec multiply(const Mat& a, const Vec& x) {
  Vec y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  }
  return y;
}

/// Sample covariance with divisor K − 1, rows are observations.
inline Mat covariance(const Mat& rows) {
  const std::size_t k = rows.size();
  const std::size_t d = rows.at(0).size();
  Vec mean(d, 0.0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += r[j] / static_cast<double>(k);
  }
  Mat c = zeros(d, d);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) c[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
    }
  }
  for (auto& row : c) {
    for (auto& v : row) v /= static_cast<double>(k - 1);
  }
  return c;
}

struct Eigen {
  Vec values;    // descending
  Mat vectors;   // column j pairs with values[j]
};

/// Cyclic Jacobi rotations for a symmetric matrix.
inline Eigen jacobi_eigen(Mat a, int sweeps = 100) {
  const std::size_t n = a.size();
  Mat v = identity(n);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
  Eigen e;
  e.vectors = zeros(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    e.values.push_back(a[order[j]][order[j]]);
    for (std::size_t i = 0; i < n; ++i) e.vectors[i][j] = v[i][order[j]];
  }
  return e;
}

inline double min_eigenvalue(const Mat& a) {
  const auto e = jacobi_eigen(a);
  return e.values.empty() ? 0.0 : e.values.back();
}

/// Gaussian elimination with partial pivoting; solves A X = B column-wise.
inline Mat solve(Mat a, Mat b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-300) throw std::runtime_error("singular system");
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      for (std::size_t k = 0; k < b[r].size(); ++k) b[r][k] -= f * b[col][k];
    }
  }
  Mat x = zeros(n, b.empty() ? 0 : b[0].size());
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = 0; k < x[i].size(); ++k) {
      double s = b[i][k];
      for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j][k];
      x[i][k] = s / a[i][i];
    }
  }
  return x;
}

inline Vec solve(const Mat& a, const Vec& b) {
  Mat bm = zeros(b.size(), 1);
  for (std::size_t i = 0; i < b.size(); ++i) bm[i][0] = b[i];
  const Mat x = solve(a, bm);
  Vec out;
  for (const auto& r : x) out.push_back(r[0]);
  return out;
}

/// argmin ‖A x − b‖ through the normal equations AᵀA x = Aᵀb.
inline Vec least_squares(const Mat& a, const Vec& b) {
  const Mat at = transpose(a);
  return solve(multiply(at, a), multiply(at, b));
}

/// Connected components of the ≤ eps graph, each sorted, via union-find over
/// all pairs.
inline std::vector<std::vector<std::size_t>> components(const std::vector<std::vector<double>>& points, double eps) {
  const std::size_t n = points.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < points[i].size(); ++k) d2 += (points[i][k] - points[j][k]) * (points[i][k] - points[j][k]);
      if (d2 <= eps * eps) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& g : groups) {
    if (!g.empty()) out.push_back(std::move(g));
  }
  return out;
}

/// Pearson correlation written out term by term.
inline double pearson(const Vec& x, const Vec& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (std::sqrt(n * sxx - sx * sx) * std::sqrt(n * syy - sy * sy));
}

}  // namespace oracle
