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

#include "ksyn/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "ksyn/classifier.hpp"
#include "ksyn/config.hpp"
#include "ksyn/error.hpp"
#include "ksyn/evaluation.hpp"
#include "ksyn/io.hpp"
#include "ksyn/synthetic.hpp"
#include "ksyn/task.hpp"

namespace ksyn {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  bool print_config = false;
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--config", common.config, "Pipeline config JSON");
  cmd->add_option("--seed", common.seed, "Master seed for every stage");
  cmd->add_option("--out", common.out, "Output directory")->capture_default_str();
  cmd->add_flag("--print-config", common.print_config, "Print the effective config and exit");
}

PipelineConfig effective_config(const Common& common, const std::optional<std::string>& task) {
  PipelineConfig cfg;
  if (!common.config.empty()) {
    cfg = load_config(common.config);
    if (task && *task != cfg.task) {
      throw UsageError("--task " + *task + " conflicts with task '" + cfg.task + "' in " + common.config);
    }
  } else {
    cfg = default_config(task.value_or("egg"));
  }
  if (common.seed) apply_seed(cfg, *common.seed);
  return cfg;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return in;
}

ViaPoint parse_via(const std::string& text, double default_variance) {
  // t:e1,e2,...[:variance]
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() < 2 || parts.size() > 3) throw UsageError("--via expects t:e1,e2[:variance], got '" + text + "'");
  try {
    ViaPoint via;
    via.t_star = std::stod(parts[0]);
    std::vector<double> values;
    std::stringstream vs(parts[1]);
    for (std::string v; std::getline(vs, v, ',');) values.push_back(std::stod(v));
    via.desired_e = to_vector(values);
    const double variance = parts.size() == 3 ? std::stod(parts[2]) : default_variance;
    if (!(variance > 0.0)) throw UsageError("--via variance must be > 0");
    via.desired_cov = variance * Matrix::Identity(via.desired_e.size(), via.desired_e.size());
    return via;
  } catch (const std::logic_error&) {
    throw UsageError("--via expects numbers, got '" + text + "'");
  }
}

Json truth_json(const DemoTruth& truth) {
  Json coeffs = Json::array();
  for (const auto& c : truth.coefficients) coeffs.push_back(vector_json(c));
  return Json{{"directions", matrix_json(truth.directions)},
              {"theta0", vector_json(truth.theta0)},
              {"times", truth.times},
              {"coefficients", coeffs}};
}

Json annotations_json(const SyntheticScene& scene) {
  Json objects = Json::array();
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& o = scene.objects[i];
    objects.push_back(Json{{"label", o.label},
                           {"centroid", vector_json(o.centroid)},
                           {"extents", vector_json(o.extents)},
                           {"size", o.size},
                           {"first_index", scene.object_indices[i].front()}});
  }
  return Json{{"plane_points", scene.plane_indices.size()}, {"objects", objects}};
}

struct Segmentation {
  RansacResult ransac;
  std::vector<Cluster> clusters;
};

Segmentation segment_cloud(const PointCloud& cloud, const PipelineConfig& cfg) {
  Segmentation s;
  s.ransac = ransac_plane(cloud, cfg.ransac.iterations, cfg.ransac.threshold, cfg.ransac.seed);
  s.clusters = euclidean_cluster(cloud.select(s.ransac.outliers), cfg.clustering.epsilon, cfg.clustering.min_points);
  return s;
}

std::vector<std::size_t> cluster_sizes(const std::vector<Cluster>& clusters) {
  std::vector<std::size_t> sizes;
  for (const auto& c : clusters) sizes.push_back(c.size());
  return sizes;
}

}  // namespace

const std::vector<std::string>& cli_subcommands() {
  static const std::vector<std::string> names{"benchmark-kernels", "classify", "encode",  "fit-synergies",
                                              "generate",          "kmp-predict", "segment", "simulate"};
  return names;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ksyn: kernelized synergies pipeline", "ksyn"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  Common common;
  std::function<void()> action;

  // generate {demos|scene}
  auto* gen = app.add_subcommand("generate", "Synthesize demonstrations or a scene point cloud");
  std::string gen_kind;
  std::string gen_task = "egg";
  std::optional<std::size_t> gen_count;
  std::optional<double> gen_noise;
  gen->add_option("kind", gen_kind, "demos | scene")->required()->check(CLI::IsMember({"demos", "scene"}));
  gen->add_option("--task", gen_task, "egg | ketchup")->capture_default_str();
  gen->add_option("--count", gen_count, "Number of demonstrations");
  gen->add_option("--noise", gen_noise, "Noise standard deviation");
  add_common(gen, common);
  gen->callback([&] {
    action = [&] {
      PipelineConfig cfg = effective_config(common, gen_task);
      if (common.print_config) return void(out << to_json(cfg).dump(2) << "\n");
      const fs::path dir = common.out;
      if (gen_kind == "demos") {
        const DemoSet set = generate_synthetic_demos(cfg.scenario, gen_count.value_or(cfg.demos.count),
                                                     gen_noise.value_or(cfg.demos.noise), cfg.demos.seed,
                                                     cfg.demos.samples, cfg.demos.duration);
        write_text_file(dir / "demos.csv", demos_to_csv(set.demos));
        write_json_file(dir / "demos_truth.json", truth_json(set.truth));
        out << "wrote " << set.demos.size() << " demonstrations to " << (dir / "demos.csv").string() << "\n";
      } else {
        const SyntheticScene scene =
            generate_synthetic_scene(cfg.task, cfg.scene.seed, gen_noise.value_or(cfg.scene.noise));
        write_text_file(dir / "scene.xyz", cloud_to_text(scene.cloud));
        write_json_file(dir / "scene_annotations.json", annotations_json(scene));
        out << "wrote " << scene.cloud.size() << " points to " << (dir / "scene.xyz").string() << "\n";
      }
    };
  });

  // fit-synergies
  auto* fit = app.add_subcommand("fit-synergies", "Fit the synergy basis from postures");
  std::string fit_input;
  std::optional<double> fit_threshold;
  fit->add_option("--input", fit_input, "Demo CSV (demo,t,q...) or posture CSV (one posture per row)")->required();
  fit->add_option("--threshold", fit_threshold, "Cumulative variance to retain");
  add_common(fit, common);
  fit->callback([&] {
    action = [&] {
      PipelineConfig cfg = effective_config(common, std::nullopt);
      if (common.print_config) return void(out << to_json(cfg).dump(2) << "\n");
      std::string first_line;
      {
        std::ifstream probe = open_input(fit_input);
        std::getline(probe, first_line);
      }
      std::vector<JointConfiguration> postures;
      std::ifstream in = open_input(fit_input);
      if (first_line.rfind("demo", 0) == 0) {
        for (const auto& d : read_demos_csv(in)) postures.insert(postures.end(), d.postures.begin(), d.postures.end());
      } else {
        for (const auto& row : read_matrix_csv(in)) postures.push_back(to_vector(row));
      }
      std::vector<std::vector<double>> rows;
      for (const auto& p : postures) rows.push_back(to_std(p));
      const SynergyBasis basis =
          fit_synergy_basis(ConfigurationMatrix::from_postures(rows), fit_threshold.value_or(cfg.variance_threshold));
      write_json_file(fs::path(common.out) / "synergy_basis.json", to_json(basis));
      out << "synergies: " << basis.synergy_dim() << " of " << basis.joint_dim() << " joints, variance";
      for (Eigen::Index i = 0; i < basis.variance_fractions.size(); ++i) {
        out << " " << format_double(basis.variance_fractions(i));
      }
      out << "\n";
    };
  });

  // encode
  auto* enc = app.add_subcommand("encode", "GMM/GMR reference trajectory from demonstrations");
  std::string enc_demos;
  std::string enc_basis;
  std::optional<std::size_t> enc_components;
  std::optional<std::size_t> enc_points;
  enc->add_option("--demos", enc_demos, "Demo CSV")->required();
  enc->add_option("--basis", enc_basis, "Synergy basis JSON")->required();
  enc->add_option("--components", enc_components, "GMM components");
  enc->add_option("--points", enc_points, "Reference grid size");
  add_common(enc, common);
  enc->callback([&] {
    action = [&] {
      PipelineConfig cfg = effective_config(common, std::nullopt);
      if (common.print_config) return void(out << to_json(cfg).dump(2) << "\n");
      std::ifstream in = open_input(enc_demos);
      const auto demos = read_demos_csv(in);
      const SynergyBasis basis = synergy_basis_from_json(read_json_file(enc_basis));
      const auto trajectories = interpolate_coefficients(demos, basis, uniform_grid(cfg.gmm.grid_points));
      GmmOptions options;
      options.components = enc_components.value_or(cfg.gmm.components);
      options.seed = cfg.gmm.seed;
      options.max_iter = cfg.gmm.max_iter;
      options.tol = cfg.gmm.tol;
      const GmmFitResult fit_result = fit_gmm_traced(trajectories, options);
      const ReferenceTrajectory reference =
          generate_reference(fit_result.model, uniform_grid(enc_points.value_or(cfg.kmp.reference_points)));
      const fs::path dir = common.out;
      write_json_file(dir / "gmm.json", to_json(fit_result.model));
      write_json_file(dir / "reference.json", to_json(reference));
      write_text_file(dir / "reference.csv", reference_to_csv(reference));
      out << "GMM: " << options.components << " components, " << fit_result.iterations << " iterations"
          << (fit_result.converged ? " (converged)" : " (iteration limit)") << "\n";
    };
  });

  // kmp-predict
  auto* pred = app.add_subcommand("kmp-predict", "Adapt and predict with a kernelized movement primitive");
  std::string pred_reference;
  std::optional<std::string> pred_kernel;
  std::optional<double> pred_l;
  std::optional<double> pred_sigma2;
  std::optional<double> pred_alpha;
  std::optional<double> pred_lambda;
  std::optional<std::size_t> pred_points;
  std::vector<std::string> pred_vias;
  pred->add_option("--reference", pred_reference, "Reference trajectory JSON")->required();
  pred->add_option("--kernel", pred_kernel, "exponential | gaussian | cauchy");
  pred->add_option("--length-scale", pred_l, "Kernel length scale l");
  pred->add_option("--sigma2", pred_sigma2, "Kernel scale σ²");
  pred->add_option("--alpha", pred_alpha, "Cauchy mixing coefficient");
  pred->add_option("--lambda", pred_lambda, "Regularization λ");
  pred->add_option("--points", pred_points, "Prediction grid size");
  pred->add_option("--via", pred_vias, "Via-point t:e1,e2[:variance] (repeatable)");
  add_common(pred, common);
  pred->callback([&] {
    action = [&] {
      PipelineConfig cfg = effective_config(common, std::nullopt);
      if (common.print_config) return void(out << to_json(cfg).dump(2) << "\n");
      const KernelSpec& base = cfg.kmp.kernel;
      KernelKind kind = base.kind();
      if (pred_kernel) {
        try {
          kind = parse_kernel_kind(*pred_kernel);
        } catch (const Error&) {
          throw UsageError("--kernel: unknown kernel '" + *pred_kernel + "'");
        }
      }
      if (pred_alpha && kind != KernelKind::kCauchy) throw UsageError("--alpha is only valid with --kernel cauchy");
      const KernelSpec spec = KernelSpec::make(kind, pred_l.value_or(base.length_scale()),
                                               pred_sigma2.value_or(base.sigma2()),
                                               pred_alpha.value_or(base.alpha().value_or(kDefaultAlpha)));
      ReferenceTrajectory reference = reference_from_json(read_json_file(pred_reference));
      for (const auto& text : pred_vias) reference = insert_via_point(reference, parse_via(text, cfg.kmp.via_variance));
      const KmpModel model = kmp_fit(reference, spec, pred_lambda.value_or(cfg.kmp.lambda));
      const ReferenceTrajectory prediction =
          kmp_predict(model, uniform_grid(pred_points.value_or(cfg.kmp.prediction_points)));
      const fs::path dir = common.out;
      write_text_file(dir / "prediction.csv", prediction_to_csv(prediction));
      write_json_file(dir / "prediction.json", to_json(prediction));
      out << "predicted " << prediction.size() << " points with the " << to_string(spec.kind()) << " kernel\n";
    };
  });

  // segment / classify
  std::string cloud_path;
  auto* seg = app.add_subcommand("segment", "RANSAC plane removal and Euclidean clustering");
  seg->add_option("--cloud", cloud_path, "ASCII point cloud")->required();
  add_common(seg, common);
  seg->callback([&] {
    action = [&] {
      PipelineConfig cfg = effective_config(common, std::nullopt);
      if (common.print_config) return void(out << to_json(cfg).dump(2) << "\n");
      std::ifstream in = open_input(cloud_path);
      const PointCloud cloud = read_cloud(in);
      const Segmentation s = segment_cloud(cloud, cfg);
      std::vector<ObjectPose> poses;
      for (const auto& c : s.clusters) poses.push_back(estimate_pose(c, "object"));
      write_json_file(fs::path(common.out) / "segmentation.json",
                      segmentation_json(s.ransac.plane, poses, cluster_sizes(s.clusters)));
      out << "plane inliers: " << s.ransac.inliers.size() << ", clusters: " << s.clusters.size() << "\n";
    };
  });

  auto* cls = app.add_subcommand("classify", "Segment a cloud and label clusters with the linear SVM");
  cls->add_option("--cloud", cloud_path, "ASCII point cloud")->required();
  add_common(cls, common);
  cls->callback([&] {
    action = [&] {
      PipelineConfig cfg = effective_config(common, std::nullopt);
      if (common.print_config) return void(out << to_json(cfg).dump(2) << "\n");
      std::ifstream in = open_input(cloud_path);
      const PointCloud cloud = read_cloud(in);
      const Segmentation s = segment_cloud(cloud, cfg);
      const LabeledFeatures training = svm_training_set(cfg.svm.samples_per_class, cfg.svm.seed);
      const MulticlassSvm svm =
          svm_train_multiclass(training.features, training.labels, SvmOptions{cfg.svm.c, cfg.svm.epochs, cfg.svm.seed});
      std::vector<ObjectPose> poses;
      for (const auto& c : s.clusters) {
        const Classification label = svm_classify(svm, extract_features(c));
        poses.push_back(estimate_pose(c, label.label, label.score));
        out << label.label << " (" << format_double(label.score) << "), " << c.size() << " points\n";
      }
      write_json_file(fs::path(common.out) / "segmentation.json",
                      segmentation_json(s.ransac.plane, poses, cluster_sizes(s.clusters)));
    };
  });

  // benchmark-kernels
  auto* bench = app.add_subcommand("benchmark-kernels", "Compare exponential, Gaussian and Cauchy kernels");
  std::optional<double> bench_lambda;
  bench->add_option("--lambda", bench_lambda, "Regularization λ");
  add_common(bench, common);
  bench->callback([&] {
    action = [&] {
      PipelineConfig cfg = effective_config(common, std::nullopt);
      if (common.print_config) return void(out << to_json(cfg).dump(2) << "\n");
      const std::uint64_t seed = common.seed.value_or(cfg.demos.seed);
      const KernelSpec& k = cfg.kmp.kernel;
      const std::vector<KernelSpec> kernels{
          KernelSpec::exponential(k.length_scale(), k.sigma2()), KernelSpec::gaussian(k.length_scale(), k.sigma2()),
          KernelSpec::cauchy(k.length_scale(), k.sigma2(), k.alpha().value_or(kDefaultAlpha))};
      const KernelBenchmark data = make_kernel_benchmark(seed);
      const BenchmarkResult result = benchmark_kernels(data.reference, data.instances, kernels,
                                                       bench_lambda.value_or(cfg.kmp.lambda), seed, "synthetic-three-object");
      const fs::path dir = common.out;
      write_json_file(dir / "benchmark_report.json", to_json(result.report));
      const std::string table = format_report(result.report);
      write_text_file(dir / "benchmark_report.txt", table);
      for (const auto& dump : result.dumps) {
        write_text_file(dir / "trajectories" / (dump.kernel + "_" + dump.instance + ".csv"),
                        comparison_to_csv(dump.actual, dump.predicted));
      }
      out << table;
    };
  });

  // simulate --task
  auto* sim = app.add_subcommand("simulate", "Run a full manipulation task end to end");
  std::string sim_task;
  sim->add_option("--task", sim_task, "egg | ketchup")->required()->check(CLI::IsMember({"egg", "ketchup"}));
  add_common(sim, common);
  sim->callback([&] {
    action = [&] {
      PipelineConfig cfg = effective_config(common, sim_task);
      if (common.print_config) return void(out << to_json(cfg).dump(2) << "\n");
      const TaskResult result = run_task(cfg);
      write_task_artifacts(result, common.out);
      out << "task " << cfg.task << ": grip " << format_double(result.final_grip) << " N"
          << (result.force.settled ? " (settled)" : " (not settled)")
          << (result.all_stable ? ", all contacts stable" : ", unstable contacts") << "\n";
      out << "task log written to " << (fs::path(common.out) / "task_log.json").string() << "\n";
    };
  });

  if (args.empty()) {
    err << app.help();
    return kExitUsage;
  }
  const std::string& first = args.front();
  if (!first.empty() && first.front() != '-') {
    const auto& names = cli_subcommands();
    if (std::find(names.begin(), names.end(), first) == names.end()) {
      const auto best = std::min_element(names.begin(), names.end(), [&](const auto& x, const auto& y) {
        return levenshtein(first, x) < levenshtein(first, y);
      });
      err << "ksyn: unknown subcommand '" << first << "'; did you mean '" << *best << "'?\n";
      return kExitUsage;
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "ksyn: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "ksyn: " << e.what() << "\n";
    return e.code() == ErrorCode::kConfigInvalid ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    err << "ksyn: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace ksyn
