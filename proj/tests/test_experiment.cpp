// Copyright 2026 The trr Authors. All Rights Reserved.
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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "trr/data.hpp"
#include "trr/errors.hpp"
#include "trr/experiment.hpp"
#include "trr/tensor_io.hpp"

using namespace trr;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string field; std::getline(ss, field, ',');) out.push_back(field);
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + TRR_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

const char* kSmallSpec =
    "task = trrpca\n"
    "source = synthetic\n"
    "dims = 6,6,6,6\n"
    "rank = 2,2,2,2\n"
    "gamma = 0\n"
    "sr = 1\n"
    "reps = 1\n";

}  // namespace

TEST_CASE("spec documents parse and format back") {
  const auto spec = parse_experiment_spec(
      "# phase map\ntask = rtrc\nsource = synthetic\ndims = 6,6,6,6\nrank = 1,1,1,1\n"
      "rank = 3,3,3,3\ngamma = 0\ngamma = 0.1\nsr = 0.3\nsr = 0.9\ncorruption = gaussian\n"
      "sigma = 0.5\nreps = 4\nseed = 77\nworkers = 2\noutput = out_dir\nlambda = 0.2\n"
      "beta = 1.05\nmax_iters = 50\n");
  CHECK(spec.task == Task::rtrc);
  CHECK(spec.dims == Dims{6, 6, 6, 6});
  CHECK(spec.ranks.size() == 2);
  CHECK(spec.ranks[1] == std::vector<std::size_t>{3, 3, 3, 3});
  CHECK(spec.gammas == std::vector<double>{0, 0.1});
  CHECK(spec.srs == std::vector<double>{0.3, 0.9});
  CHECK(spec.corruption == CorruptionModel::gaussian);
  CHECK(spec.sigma == 0.5);
  CHECK(spec.repetitions == 4);
  CHECK(spec.seed == 77);
  CHECK(spec.workers == 2);
  CHECK(spec.output_dir == "out_dir");
  CHECK(spec.solver.lambda == 0.2);
  CHECK(spec.solver.beta == 1.05);
  CHECK(spec.solver.max_iters == 50);

  const auto text = format_experiment_spec(spec);
  CHECK(format_experiment_spec(parse_experiment_spec(text)) == text);
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(parse_experiment_spec(std::string(kSmallSpec) + "colour = red\n"), FormatError);
  CHECK_THROWS_AS(parse_experiment_spec(std::string(kSmallSpec) + "reps = 2\n"), FormatError);
  CHECK_THROWS_AS(parse_experiment_spec(std::string(kSmallSpec) + "reps = 0\n" + "dims = 6,6,6,6\n"),
                  FormatError);
  CHECK_THROWS_AS(parse_experiment_spec("task = trrpca\nsource = synthetic\ndims = 6,6,6,6\n"
                                        "rank = 2,2,2\n"),
                  ShapeError);
  CHECK_THROWS_AS(parse_experiment_spec("task = trrpca\nsource = synthetic\ndims = 6,6,6,6\n"
                                        "rank = 2,2,2,2\nsr = 0.5\n"),
                  DomainError);
  CHECK_THROWS_AS(parse_experiment_spec("task = rtrc\nsource = tensor\n"), DomainError);
  CHECK_THROWS_AS(parse_experiment_spec("task = pca\nsource = synthetic\n"), FormatError);
}

TEST_CASE("output directory comes from the environment when set") {
  auto spec = parse_experiment_spec(std::string(kSmallSpec) + "output = from_spec\n");
  ::unsetenv(kOutputDirEnv);
  apply_environment(spec);
  CHECK(spec.output_dir == "from_spec");
  ::setenv(kOutputDirEnv, "from_env", 1);
  apply_environment(spec);
  CHECK(spec.output_dir == "from_env");
  ::unsetenv(kOutputDirEnv);
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 1));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}

TEST_CASE("synthetic instances share truth across sampling ratios") {
  auto spec = parse_experiment_spec(
      "task = rtrc\nsource = synthetic\ndims = 5,5,5\nrank = 2,2,2\ngamma = 0.1\nsr = 0.5\n");
  const auto a = synthetic_instance(spec, 1, 0, 0.4, 0.1);
  const auto b = synthetic_instance(spec, 1, 0, 0.8, 0.1);
  const auto c = synthetic_instance(spec, 2, 0, 0.4, 0.1);
  CHECK(a.truth == b.truth);
  CHECK_FALSE(a.truth == c.truth);
  for (std::size_t i = 0; i < a.truth.size(); ++i) {
    if (a.mask.observed(i)) CHECK(b.mask.observed(i));
    if (!a.mask.observed(i)) CHECK(a.observed[i] == 0.0);
  }
  const auto again = synthetic_instance(spec, 1, 0, 0.4, 0.1);
  CHECK(again.observed == a.observed);
}

TEST_CASE("clean fully observed run recovers the truth and writes its outputs") {
  const auto dir = trr::testing::scratch_dir("run");
  auto spec = parse_experiment_spec(kSmallSpec);
  spec.output_dir = dir / "out";
  const auto rows = run_experiment(spec);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].metrics.re <= 1e-6);
  CHECK(rows[0].converged);

  const auto lines = read_lines(spec.output_dir / "results.csv");
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == kRunCsvHeader);
  const auto fields = split_csv(lines[1]);
  CHECK(fields.size() == split_csv(kRunCsvHeader).size());
  CHECK(fields[0] == "1");
  CHECK(fs::exists(spec.output_dir / "L_rep1.trt1"));
  CHECK(fs::exists(spec.output_dir / "S_rep1.trt1"));
  CHECK(load_trt1(spec.output_dir / "L_rep1.trt1").dims() == Dims{6, 6, 6, 6});

  // The manifest alone reproduces every numeric field but the wall time.
  auto rerun = load_experiment_spec(spec.output_dir / "manifest.txt");
  rerun.output_dir = dir / "again";
  run_experiment(rerun);
  const auto second = read_lines(rerun.output_dir / "results.csv");
  REQUIRE(second.size() == 2);
  auto f1 = split_csv(lines[1]);
  auto f2 = split_csv(second[1]);
  f1.pop_back();
  f2.pop_back();
  CHECK(f1 == f2);
}

TEST_CASE("corrupted runs emit one row per repetition") {
  const auto dir = trr::testing::scratch_dir("rows");
  auto spec = parse_experiment_spec(
      "task = rtrc\nsource = synthetic\ndims = 5,5,5\nrank = 2,2,2\ngamma = 0.05\nsr = 0.8\n"
      "reps = 3\nmax_iters = 20\n");
  spec.output_dir = dir;
  const auto rows = run_experiment(spec);
  CHECK(rows.size() == 3);
  CHECK(read_lines(dir / "results.csv").size() == 4);
  for (const auto& row : rows) CHECK(row.iterations <= 20);
  CHECK(rows[0].seed != rows[1].seed);
}

TEST_CASE("sweep output") {
  const auto dir = trr::testing::scratch_dir("sweep_out");
  auto spec = parse_experiment_spec(
      "task = rtrc\nsource = synthetic\ndims = 4,4,4\nrank = 1,1,1\nrank = 2,2,2\ngamma = 0\n"
      "gamma = 0.05\nsr = 0.5\nsr = 1\nreps = 2\nmax_iters = 30\nworkers = 2\n");
  spec.output_dir = dir;
  const auto cells = run_sweep(spec);
  REQUIRE(cells.size() == 8);
  // Grid order: rank, then gamma, then sr.
  CHECK(cells[0].rank == std::vector<std::size_t>{1, 1, 1});
  CHECK(cells[1].sr == 1.0);
  CHECK(cells[2].gamma == 0.05);
  CHECK(cells[4].rank == std::vector<std::size_t>{2, 2, 2});
  for (const auto& c : cells) {
    CHECK(c.reps == 2);
    CHECK(c.successes <= 2);
    CHECK(c.mean_iterations <= 30.0);
  }
  const auto lines = read_lines(dir / "sweep.csv");
  REQUIRE(lines.size() == 9);
  CHECK(lines[0] == kSweepCsvHeader);
  CHECK(fs::exists(dir / "manifest.txt"));

  // Identical output whatever the worker count.
  spec.workers = 1;
  spec.output_dir = dir / "serial";
  const auto serial = run_sweep(spec);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CHECK(serial[i].successes == cells[i].successes);
    CHECK(serial[i].mean_re == cells[i].mean_re);
  }

  spec.ranks = {{5, 5, 5}};
  CHECK_THROWS_AS(run_sweep(spec), DomainError);
}

TEST_CASE("sweep success counts") {
  const auto dir = trr::testing::scratch_dir("sweep_counts");
  auto spec = parse_experiment_spec(
      "task = rtrc\nsource = synthetic\ndims = 6,6,6,6\nrank = 1,1,1,1\ngamma = 0\nsr = 1\n"
      "reps = 2\n");
  spec.output_dir = dir / "trivial";
  const auto cells = run_sweep(spec);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].successes == 2);
  const auto lines = read_lines(spec.output_dir / "sweep.csv");
  REQUIRE(lines.size() == 2);
  CHECK(split_csv(lines[1])[3] == "1x1x1x1");

  // Higher ring rank needs more samples.
  auto grid = parse_experiment_spec(
      "task = rtrc\nsource = synthetic\ndims = 6,6,6,6\nrank = 1,1,1,1\nrank = 3,3,3,3\n"
      "gamma = 0\nsr = 0.3\n");
  grid.output_dir = dir / "ranks";
  const auto by_rank = run_sweep(grid);
  REQUIRE(by_rank.size() == 2);
  CHECK(by_rank[0].rank == std::vector<std::size_t>{1, 1, 1, 1});
  MESSAGE("successes rank 1: " << by_rank[0].successes << ", rank 3: " << by_rank[1].successes);
  CHECK(by_rank[1].successes < by_rank[0].successes);
}

TEST_CASE("command line") {
  const auto dir = trr::testing::scratch_dir("cli");
  write_file(dir / "missing.spec",
             "task = trrpca\nsource = tensor\ninput = " + (dir / "nope.trt1").string() +
                 "\noutput = " + (dir / "never").string() + "\n");
  CHECK(run_cli("run " + (dir / "missing.spec").string()) == 2);
  CHECK_FALSE(fs::exists(dir / "never"));
  CHECK(run_cli("run") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("run " + (dir / "absent.spec").string()) == 2);

  write_file(dir / "ok.spec", std::string(kSmallSpec) + "output = " + (dir / "ok").string() + "\n");
  CHECK(run_cli("run " + (dir / "ok.spec").string()) == 0);
  CHECK(fs::exists(dir / "ok" / "results.csv"));

  ::setenv(kOutputDirEnv, (dir / "env").string().c_str(), 1);
  CHECK(run_cli("run " + (dir / "ok.spec").string()) == 0);
  ::unsetenv(kOutputDirEnv);
  CHECK(fs::exists(dir / "env" / "results.csv"));

  CHECK(run_cli("metrics " + (dir / "ok" / "L_rep1.trt1").string() + " " +
                (dir / "ok" / "L_rep1.trt1").string()) == 0);

  trr::testing::SplitMix rng(1);
  save_ppm(dir / "img.ppm", trr::testing::random_tensor(rng, {8, 8, 3}, 255.0));
  CHECK(run_cli("vdt " + (dir / "img.ppm").string() + " --factors 2,4 --out " +
                (dir / "img.trt1").string()) == 0);
  CHECK(load_trt1(dir / "img.trt1").dims() == Dims{4, 16, 3});
  CHECK(run_cli("vdt " + (dir / "img.trt1").string() + " --factors 2,4 --inverse --out " +
                (dir / "back.ppm").string()) == 0);
  CHECK(load_ppm(dir / "back.ppm") == load_ppm(dir / "img.ppm"));
  CHECK(run_cli("vdt " + (dir / "img.ppm").string() + " --factors 3,3 --out " +
                (dir / "bad.trt1").string()) == 2);
}
