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

#ifndef TRR_EXPERIMENT_HPP
#define TRR_EXPERIMENT_HPP

// Experiment harness behind the `run` and `sweep` subcommands.
//
// Spec files are flat key/value documents (see keyvalue.hpp):
//
//   task        trrpca | rtrc
//   source      synthetic | tensor | image
//   dims        6,6,6,6            (synthetic)
//   rank        2,2,2,2            (synthetic; repeat the key for a sweep)
//   input       path               (tensor: TRT1 ground truth, image: P6 PPM)
//   factors     2,2,...            (image: VDT row factors)
//   col_factors 2,2,...            (image: VDT column factors, default = factors)
//   gamma       0.05               (corruption fraction; repeat for a sweep)
//   corruption  signed_unit | uniform_0_255 | gaussian
//   sigma       1.0                (gaussian corruption)
//   sr          0.7                (sampling ratio; repeat for a sweep)
//   reps        3
//   seed        1
//   workers     1                  (sweep cells solved concurrently)
//   output      directory
//   plus the solver keys of solver_config_from().

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "trr/data.hpp"
#include "trr/solvers.hpp"

namespace trr {

enum class Task { trrpca, rtrc };
enum class SourceKind { synthetic, tensor_file, image_file };

/// A cell counts as recovered when RE <= this.
inline constexpr double kSuccessThreshold = 1e-2;

/// Environment variable that overrides the spec's output directory.
inline constexpr const char* kOutputDirEnv = "TRR_OUTPUT_DIR";

struct ExperimentSpec {
  Task task = Task::trrpca;
  SourceKind source = SourceKind::synthetic;
  Dims dims;
  std::filesystem::path input;
  std::vector<std::size_t> row_factors;
  std::vector<std::size_t> col_factors;

  std::vector<std::vector<std::size_t>> ranks;
  std::vector<double> gammas{0.0};
  std::vector<double> srs{1.0};
  CorruptionModel corruption = CorruptionModel::signed_unit;
  double sigma = 1.0;

  SolverConfig solver;
  std::size_t repetitions = 10;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::filesystem::path output_dir = "trr_out";

  /// Throws DomainError/FormatError for inconsistent combinations.
  void validate() const;
};

/// Parses and validates a spec document.
ExperimentSpec parse_experiment_spec(std::string_view text);
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);
/// Canonical document; parsing it yields an equivalent spec.
std::string format_experiment_spec(const ExperimentSpec& spec);

/// Replaces output_dir with $TRR_OUTPUT_DIR when that is set and nonempty.
void apply_environment(ExperimentSpec& spec);

/// Seed for stream `stream` of repetition `rep`, via splitmix64 mixing.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t rep, std::uint64_t stream);

/// One synthetic problem: clean truth, solver input and sampling mask (all
/// ones for trrpca). Corruption hits observed entries only, and entries
/// outside the mask are zero in `observed`.
struct SyntheticInstance {
  DenseTensor truth;
  DenseTensor observed;
  SamplingMask mask;
};

/// Repetition `rep` (1-based) with the rank spec.ranks[rank_index], exactly
/// as run_experiment and run_sweep build it. The truth depends on (seed, rep,
/// rank_index) only and the mask on (seed, rep, sr) only.
SyntheticInstance synthetic_instance(const ExperimentSpec& spec, std::size_t rep,
                                     std::size_t rank_index, double sr, double gamma);

struct RunRow {
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  MetricReport metrics;
  double lambda = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double wall_seconds = 0.0;
};

/// Column header of results.csv.
inline constexpr const char* kRunCsvHeader =
    "rep,seed,re,mse,psnr_db,ssim,sr,lambda,iterations,converged,wall_seconds";

/// Writes <output>/results.csv (one row per repetition, flushed as each
/// finishes), L_rep<k>.trt1 and S_rep<k>.trt1 (plus L_rep<k>.ppm for image
/// sources) and <output>/manifest.txt. Inputs are loaded before anything is
/// written, so a missing input leaves no output behind.
std::vector<RunRow> run_experiment(const ExperimentSpec& spec);

struct SweepCell {
  double sr = 1.0;
  double gamma = 0.0;
  std::vector<std::size_t> rank;
  std::size_t reps = 0;
  std::size_t successes = 0;
  double mean_re = 0.0;
  double mean_iterations = 0.0;
};

inline constexpr const char* kSweepCsvHeader =
    "cell,sr,gamma,rank,reps,successes,mean_re,mean_iterations";

/// Synthetic grid over srs x gammas x ranks. Repetition k of every cell uses
/// the same ground truth for a given rank and the same mask seed, so masks
/// are nested in sr. Writes <output>/sweep.csv with one row per cell as it
/// completes, and <output>/manifest.txt. Returns cells in grid order.
std::vector<SweepCell> run_sweep(const ExperimentSpec& spec);

}  // namespace trr

#endif  // TRR_EXPERIMENT_HPP
