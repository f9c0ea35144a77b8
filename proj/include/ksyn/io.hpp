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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ksyn/evaluation.hpp"
#include "ksyn/force.hpp"
#include "ksyn/kmp.hpp"
#include "ksyn/perception.hpp"
#include "ksyn/synergy.hpp"
#include "ksyn/trajectory.hpp"

namespace ksyn {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal text of a double.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

Json vector_json(const Vector& v);
Json matrix_json(const Matrix& m);
Vector vector_from_json(const Json& j);
Matrix matrix_from_json(const Json& j);

// {"theta0": [...], "e_hat": [[...]], "variance_fractions": [...]}
Json to_json(const SynergyBasis& basis);
SynergyBasis synergy_basis_from_json(const Json& j);

Json to_json(const GmmModel& model);
GmmModel gmm_from_json(const Json& j);

Json to_json(const ReferenceTrajectory& reference);
ReferenceTrajectory reference_from_json(const Json& j);

Json to_json(const KernelSpec& spec);
KernelSpec kernel_spec_from_json(const Json& j);

Json to_json(const ViaPoint& via);

Json to_json(const GraspModel& model);
GraspModel grasp_model_from_json(const Json& j);

Json to_json(const MetricReport& report);

Json to_json(const ObjectPose& pose, std::size_t cluster_size);
/// {"plane": {...}, "clusters": [{"label","score","centroid","extents","size"}]}
Json segmentation_json(const PlaneModel& plane, const std::vector<ObjectPose>& poses,
                       const std::vector<std::size_t>& sizes);

/// t, μ₁…μ_S, Σ flattened row-major.
std::string reference_to_csv(const ReferenceTrajectory& reference);
/// t, mean…, diag(cov)….
std::string prediction_to_csv(const ReferenceTrajectory& prediction);
/// t, actual…, predicted…, predicted variance….
std::string comparison_to_csv(const ReferenceTrajectory& actual, const ReferenceTrajectory& predicted);

/// t, force
std::string force_profile_to_csv(const ForceProfile& profile);
ForceProfile force_profile_from_csv(std::istream& in);

/// One posture per row; a non-numeric first line is treated as a header.
std::vector<std::vector<double>> read_matrix_csv(std::istream& in);
std::string matrix_to_csv(const std::vector<std::vector<double>>& rows, const std::vector<std::string>& header = {});

/// Columns: demo, t, q1…qJ. Rows of a demo are contiguous.
std::vector<Demonstration> read_demos_csv(std::istream& in);
std::string demos_to_csv(const std::vector<Demonstration>& demos);

/// ASCII "x y z" per line; '#' starts a comment. Rejects NaN/Inf.
PointCloud read_cloud(std::istream& in);
std::string cloud_to_text(const PointCloud& cloud);

}  // namespace ksyn
