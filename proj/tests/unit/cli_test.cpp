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

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "ksyn/cli.hpp"
#include "ksyn/io.hpp"

using namespace ksyn;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run dispatch(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ksyn_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("edit distance") {
  CHECK(levenshtein("", "") == 0);
  CHECK(levenshtein("kitten", "sitting") == 3);
  CHECK(levenshtein("simulte", "simulate") == 1);
  CHECK(levenshtein("abc", "") == 3);
}

TEST_CASE("usage errors") {
  auto r = dispatch({});
  CHECK(r.code == kExitUsage);
  for (const auto& sub : cli_subcommands()) CHECK(r.err.find(sub) != std::string::npos);

  r = dispatch({"simulte", "--task", "egg"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("simulate") != std::string::npos);

  r = dispatch({"simulate", "--task", "egg", "--bogus"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("--bogus") != std::string::npos);

  r = dispatch({"kmp-predict", "--reference", "x.json", "--kernel", "laplace"});
  CHECK(r.code == kExitUsage);

  r = dispatch({"simulate", "--task", "teapot"});
  CHECK(r.code == kExitUsage);
}

TEST_CASE("the binary reports usage errors through its exit status") {
  const std::string cli = KSYN_CLI_PATH;
  CHECK(WEXITSTATUS(std::system((cli + " > /dev/null 2>&1").c_str())) == kExitUsage);
  CHECK(WEXITSTATUS(std::system((cli + " frobnicate > /dev/null 2>&1").c_str())) == kExitUsage);
  CHECK(WEXITSTATUS(std::system((cli + " --help > /dev/null 2>&1").c_str())) == kExitOk);
}

TEST_CASE("simulate with a config file writes the task log") {
  const fs::path dir = scratch("simulate");
  write_text_file(dir / "c.json", R"({"task": "egg", "gmm": {"components": 5}})");
  const auto r = dispatch({"simulate", "--task", "egg", "--config", (dir / "c.json").string(), "--out",
                           (dir / "out").string()});
  CHECK(r.code == kExitOk);
  const Json log = read_json_file(dir / "out" / "task_log.json");
  CHECK(log["task"] == "egg");
  CHECK(fs::exists(dir / "out" / "prediction.csv"));
  CHECK(fs::exists(dir / "out" / "force_measured.csv"));

  write_text_file(dir / "bad.json", R"({"gmm": {"components": -1}})");
  CHECK(dispatch({"simulate", "--task", "egg", "--config", (dir / "bad.json").string(), "--out",
                  (dir / "bad").string()})
            .code == kExitUsage);
  write_text_file(dir / "other.json", R"({"task": "ketchup"})");
  CHECK(dispatch({"simulate", "--task", "egg", "--config", (dir / "other.json").string(), "--out",
                  (dir / "o").string()})
            .code == kExitUsage);
  fs::remove_all(dir);
}

TEST_CASE("stage failures exit with status 2") {
  const fs::path dir = scratch("failure");
  write_text_file(dir / "c.json", R"({"paths": {"scene": "/nonexistent/scene.xyz"}})");
  const auto r = dispatch({"simulate", "--task", "egg", "--config", (dir / "c.json").string(), "--out",
                           (dir / "out").string()});
  CHECK(r.code == kExitFailure);
  CHECK(r.err.find("perception") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("offline pipeline through individual subcommands") {
  const fs::path dir = scratch("chain");
  const std::string d = dir.string();
  REQUIRE(dispatch({"generate", "demos", "--task", "ketchup", "--out", d}).code == kExitOk);
  REQUIRE(dispatch({"fit-synergies", "--input", d + "/demos.csv", "--threshold", "0.95", "--out", d}).code == kExitOk);
  const Json basis = read_json_file(dir / "synergy_basis.json");
  CHECK(basis["e_hat"][0].size() == 2);
  REQUIRE(dispatch({"encode", "--demos", d + "/demos.csv", "--basis", d + "/synergy_basis.json", "--out", d}).code ==
          kExitOk);
  REQUIRE(dispatch({"kmp-predict", "--reference", d + "/reference.json", "--kernel", "gaussian", "--via",
                    "0.5:0.1,0.2", "--out", d})
              .code == kExitOk);
  CHECK(fs::exists(dir / "prediction.csv"));
  REQUIRE(dispatch({"generate", "scene", "--task", "egg", "--out", d}).code == kExitOk);
  REQUIRE(dispatch({"segment", "--cloud", d + "/scene.xyz", "--out", d}).code == kExitOk);
  CHECK(read_json_file(dir / "segmentation.json")["clusters"].size() == 2);
  REQUIRE(dispatch({"classify", "--cloud", d + "/scene.xyz", "--out", d}).code == kExitOk);
  const Json seg = read_json_file(dir / "segmentation.json");
  std::vector<std::string> labels;
  for (const auto& c : seg["clusters"]) labels.push_back(c["label"]);
  std::sort(labels.begin(), labels.end());
  CHECK(labels == std::vector<std::string>{"egg", "tray"});
  fs::remove_all(dir);
}

TEST_CASE("generate is deterministic for a fixed seed") {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    REQUIRE(dispatch({"generate", "scene", "--task", "ketchup", "--seed", "5", "--out", dir.string()}).code == kExitOk);
  }
  CHECK(read_text_file(a / "scene.xyz") == read_text_file(b / "scene.xyz"));
  CHECK(read_text_file(a / "scene_annotations.json") == read_text_file(b / "scene_annotations.json"));
  REQUIRE(dispatch({"generate", "scene", "--task", "ketchup", "--seed", "6", "--out", b.string()}).code == kExitOk);
  CHECK(read_text_file(a / "scene.xyz") != read_text_file(b / "scene.xyz"));
  fs::remove_all(a);
  fs::remove_all(b);
}
