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

#include "ksyn/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ksyn/error.hpp"

namespace ksyn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool parse_double(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<double> parse_row(const std::vector<std::string>& fields, std::size_t line_no) {
  std::vector<double> row;
  row.reserve(fields.size());
  for (const auto& f : fields) {
    double v = 0.0;
    if (!parse_double(f, v)) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": '" + f + "' is not a number");
    }
    row.push_back(v);
  }
  return row;
}

bool all_numeric(const std::vector<std::string>& fields) {
  double v = 0.0;
  for (const auto& f : fields) {
    if (!parse_double(f, v)) return false;
  }
  return true;
}

std::string join_row(const std::vector<double>& values) {
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += format_double(values[i]);
  }
  return line;
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::kParse, std::string("missing key '") + key + "'");
  return j.at(key);
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error(ErrorCode::kIo, "cannot format number");
  return {buf.data(), ptr};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
}

Json read_json_file(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

Json vector_json(const Vector& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Json matrix_json(const Matrix& m) {
  Json j = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) j.push_back(vector_json(m.row(r).transpose()));
  return j;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kParse, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::kParse, "expected a number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kParse, "expected an array of rows");
  if (j.empty()) return {};
  const std::size_t cols = j.front().size();
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vector row = vector_from_json(j[r]);
    if (static_cast<std::size_t>(row.size()) != cols) throw Error(ErrorCode::kParse, "ragged matrix rows");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

Json to_json(const SynergyBasis& basis) {
  return Json{{"theta0", vector_json(basis.theta0)},
              {"e_hat", matrix_json(basis.e_hat)},
              {"variance_fractions", vector_json(basis.variance_fractions)}};
}

SynergyBasis synergy_basis_from_json(const Json& j) {
  SynergyBasis b;
  b.theta0 = vector_from_json(require(j, "theta0"));
  b.e_hat = matrix_from_json(require(j, "e_hat"));
  b.variance_fractions = vector_from_json(require(j, "variance_fractions"));
  if (b.e_hat.rows() != b.theta0.size() || b.e_hat.cols() != b.variance_fractions.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "synergy basis fields disagree in size");
  }
  return b;
}

Json to_json(const GmmModel& model) {
  Json comps = Json::array();
  for (std::size_t n = 0; n < model.components(); ++n) {
    comps.push_back(Json{{"prior", model.priors[n]},
                         {"mean", vector_json(model.means[n])},
                         {"covariance", matrix_json(model.covariances[n])}});
  }
  return Json{{"input_dim", 1}, {"output_dim", model.output_dim()}, {"components", comps}};
}

GmmModel gmm_from_json(const Json& j) {
  GmmModel m;
  for (const auto& c : require(j, "components")) {
    m.priors.push_back(require(c, "prior").get<double>());
    m.means.push_back(vector_from_json(require(c, "mean")));
    m.covariances.push_back(matrix_from_json(require(c, "covariance")));
  }
  validate(m);
  return m;
}

Json to_json(const ReferenceTrajectory& reference) {
  Json pts = Json::array();
  for (std::size_t i = 0; i < reference.size(); ++i) {
    pts.push_back(Json{{"t", reference.times[i]},
                       {"mean", vector_json(reference.means[i])},
                       {"covariance", matrix_json(reference.covariances[i])}});
  }
  return Json{{"dim", reference.dim()}, {"points", pts}};
}

ReferenceTrajectory reference_from_json(const Json& j) {
  ReferenceTrajectory r;
  for (const auto& p : require(j, "points")) {
    r.times.push_back(require(p, "t").get<double>());
    r.means.push_back(vector_from_json(require(p, "mean")));
    r.covariances.push_back(matrix_from_json(require(p, "covariance")));
  }
  validate(r);
  return r;
}

Json to_json(const KernelSpec& spec) {
  Json j{{"kind", std::string(to_string(spec.kind()))}, {"l", spec.length_scale()}, {"sigma2", spec.sigma2()}};
  if (spec.alpha()) j["alpha"] = *spec.alpha();
  return j;
}

KernelSpec kernel_spec_from_json(const Json& j) {
  const KernelKind kind = parse_kernel_kind(require(j, "kind").get<std::string>());
  const double l = j.value("l", kDefaultLengthScale);
  const double s2 = j.value("sigma2", kDefaultSigma2);
  const double a = j.value("alpha", kDefaultAlpha);
  return KernelSpec::make(kind, l, s2, a);
}

Json to_json(const ViaPoint& via) {
  return Json{{"t", via.t_star}, {"desired_e", vector_json(via.desired_e)}, {"desired_cov", matrix_json(via.desired_cov)}};
}

Json to_json(const GraspModel& model) {
  return Json{{"grasp_matrix", matrix_json(model.grasp)},
              {"internal_stiffness", matrix_json(model.internal_stiffness)},
              {"hand_jacobian", matrix_json(model.hand_jacobian)},
              {"motor_constants", vector_json(model.motor_constants)}};
}

GraspModel grasp_model_from_json(const Json& j) {
  GraspModel m;
  m.grasp = matrix_from_json(require(j, "grasp_matrix"));
  m.internal_stiffness = matrix_from_json(require(j, "internal_stiffness"));
  m.hand_jacobian = matrix_from_json(require(j, "hand_jacobian"));
  m.motor_constants = vector_from_json(require(j, "motor_constants"));
  validate(m);
  return m;
}

Json to_json(const MetricReport& report) {
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    Json inst = Json::array();
    for (const auto& [r, e] : row.per_instance) inst.push_back(Json{{"R", r}, {"rMSE", e}});
    rows.push_back(Json{{"kernel", to_json(row.kernel)},
                        {"lambda", report.lambda},
                        {"seed", report.seed},
                        {"R", row.r},
                        {"rMSE", row.rmse},
                        {"instances", inst}});
  }
  return Json{{"dataset", report.dataset}, {"lambda", report.lambda}, {"seed", report.seed}, {"rows", rows}};
}

Json to_json(const ObjectPose& pose, std::size_t cluster_size) {
  return Json{{"label", pose.label},
              {"score", pose.score},
              {"centroid", vector_json(pose.centroid)},
              {"extents", vector_json(pose.extents)},
              {"size", cluster_size}};
}

Json segmentation_json(const PlaneModel& plane, const std::vector<ObjectPose>& poses,
                       const std::vector<std::size_t>& sizes) {
  Json clusters = Json::array();
  for (std::size_t i = 0; i < poses.size(); ++i) clusters.push_back(to_json(poses[i], sizes.at(i)));
  return Json{{"plane", Json{{"normal", vector_json(plane.normal)}, {"d", plane.d}}}, {"clusters", clusters}};
}

std::string reference_to_csv(const ReferenceTrajectory& reference) {
  const Eigen::Index s = reference.dim();
  std::string out = "t";
  for (Eigen::Index i = 0; i < s; ++i) out += ",mu" + std::to_string(i + 1);
  for (Eigen::Index r = 0; r < s; ++r) {
    for (Eigen::Index c = 0; c < s; ++c) out += ",sigma" + std::to_string(r + 1) + std::to_string(c + 1);
  }
  out += '\n';
  for (std::size_t n = 0; n < reference.size(); ++n) {
    std::vector<double> row{reference.times[n]};
    for (Eigen::Index i = 0; i < s; ++i) row.push_back(reference.means[n](i));
    for (Eigen::Index r = 0; r < s; ++r) {
      for (Eigen::Index c = 0; c < s; ++c) row.push_back(reference.covariances[n](r, c));
    }
    out += join_row(row) + '\n';
  }
  return out;
}

std::string prediction_to_csv(const ReferenceTrajectory& prediction) {
  const Eigen::Index s = prediction.dim();
  std::string out = "t";
  for (Eigen::Index i = 0; i < s; ++i) out += ",mean" + std::to_string(i + 1);
  for (Eigen::Index i = 0; i < s; ++i) out += ",var" + std::to_string(i + 1);
  out += '\n';
  for (std::size_t n = 0; n < prediction.size(); ++n) {
    std::vector<double> row{prediction.times[n]};
    for (Eigen::Index i = 0; i < s; ++i) row.push_back(prediction.means[n](i));
    for (Eigen::Index i = 0; i < s; ++i) row.push_back(prediction.covariances[n](i, i));
    out += join_row(row) + '\n';
  }
  return out;
}

std::string comparison_to_csv(const ReferenceTrajectory& actual, const ReferenceTrajectory& predicted) {
  const Eigen::Index s = actual.dim();
  std::string out = "t";
  for (Eigen::Index i = 0; i < s; ++i) out += ",actual" + std::to_string(i + 1);
  for (Eigen::Index i = 0; i < s; ++i) out += ",predicted" + std::to_string(i + 1);
  for (Eigen::Index i = 0; i < s; ++i) out += ",var" + std::to_string(i + 1);
  out += '\n';
  for (std::size_t n = 0; n < actual.size(); ++n) {
    std::vector<double> row{actual.times[n]};
    for (Eigen::Index i = 0; i < s; ++i) row.push_back(actual.means[n](i));
    for (Eigen::Index i = 0; i < s; ++i) row.push_back(predicted.means[n](i));
    for (Eigen::Index i = 0; i < s; ++i) row.push_back(predicted.covariances[n](i, i));
    out += join_row(row) + '\n';
  }
  return out;
}

std::string force_profile_to_csv(const ForceProfile& profile) {
  std::string out = "t,force\n";
  for (std::size_t i = 0; i < profile.size(); ++i) out += join_row({profile.times[i], profile.forces[i]}) + '\n';
  return out;
}

ForceProfile force_profile_from_csv(std::istream& in) {
  ForceProfile p;
  for (const auto& row : read_matrix_csv(in)) {
    if (row.size() != 2) throw Error(ErrorCode::kParse, "force profile rows must be 't,force'");
    if (!p.times.empty() && !(row[0] > p.times.back())) {
      throw Error(ErrorCode::kNonMonotonicTime, "force profile timestamps must increase");
    }
    p.times.push_back(row[0]);
    p.forces.push_back(row[1]);
  }
  if (p.size() >= 2) {
    p.ramp_rate = (p.forces.back() - p.forces.front()) / (p.times.back() - p.times.front());
  }
  return p;
}

std::vector<std::vector<double>> read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split(t, ',');
    if (first) {
      first = false;
      if (!all_numeric(fields)) continue;  // header
    }
    rows.push_back(parse_row(fields, line_no));
  }
  return rows;
}

std::string matrix_to_csv(const std::vector<std::vector<double>>& rows, const std::vector<std::string>& header) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  if (!header.empty()) out += '\n';
  for (const auto& r : rows) out += join_row(r) + '\n';
  return out;
}

std::vector<Demonstration> read_demos_csv(std::istream& in) {
  std::vector<Demonstration> demos;
  double current = std::nan("");
  for (const auto& row : read_matrix_csv(in)) {
    if (row.size() < 3) throw Error(ErrorCode::kParse, "demo rows need demo, t and at least one joint");
    if (demos.empty() || row[0] != current) {
      current = row[0];
      demos.emplace_back();
    }
    demos.back().times.push_back(row[1]);
    demos.back().postures.push_back(Eigen::Map<const Vector>(row.data() + 2, static_cast<Eigen::Index>(row.size() - 2)));
  }
  return demos;
}

std::string demos_to_csv(const std::vector<Demonstration>& demos) {
  std::string out = "demo,t";
  const Eigen::Index joints = demos.empty() || demos.front().postures.empty() ? 0 : demos.front().postures.front().size();
  for (Eigen::Index j = 0; j < joints; ++j) out += ",q" + std::to_string(j + 1);
  out += '\n';
  for (std::size_t d = 0; d < demos.size(); ++d) {
    for (std::size_t i = 0; i < demos[d].times.size(); ++i) {
      std::vector<double> row{static_cast<double>(d), demos[d].times[i]};
      for (Eigen::Index j = 0; j < demos[d].postures[i].size(); ++j) row.push_back(demos[d].postures[i](j));
      out += join_row(row) + '\n';
    }
  }
  return out;
}

PointCloud read_cloud(std::istream& in) {
  PointCloud cloud;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<std::string> fields;
    std::string tok;
    while (ss >> tok) fields.push_back(tok);
    if (fields.empty()) continue;
    if (fields.size() != 3) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected 'x y z'");
    }
    double xyz[3];
    for (int k = 0; k < 3; ++k) {
      if (!parse_double(fields[static_cast<std::size_t>(k)], xyz[k]) || !std::isfinite(xyz[k])) {
        throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": invalid coordinate '" +
                                           fields[static_cast<std::size_t>(k)] + "'");
      }
    }
    cloud.points.emplace_back(xyz[0], xyz[1], xyz[2]);
  }
  return cloud;
}

std::string cloud_to_text(const PointCloud& cloud) {
  std::string out = "# x y z (meters)\n";
  for (const auto& p : cloud.points) {
    out += format_double(p.x()) + ' ' + format_double(p.y()) + ' ' + format_double(p.z()) + '\n';
  }
  return out;
}

}  // namespace ksyn
