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

#include "trr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iterator>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "trr/errors.hpp"
#include "trr/tensor_io.hpp"
#include "trr/tr_algebra.hpp"

namespace trr {
namespace {

constexpr const char* kSpecKeys[] = {
    "task", "source", "dims", "rank", "input", "factors", "col_factors", "gamma",
    "corruption", "sigma", "sr", "reps", "seed", "workers", "output",
    // solver keys
    "lambda", "weights", "beta", "mu0", "mu_max", "tol", "max_iters", "parallel"};

// Keys that may repeat to form a sweep axis.
constexpr const char* kListKeys[] = {"rank", "gamma", "sr"};

// Streams drawn from one repetition seed.
enum Stream : std::uint64_t { kTensorStream = 1, kMaskStream = 2, kCorruptionStream = 3 };

// Image default, mu0 = 10^-3.2.
const double kImageMu0 = std::pow(10.0, -3.2);

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool known_key(const std::string& key) {
  return std::find_if(std::begin(kSpecKeys), std::end(kSpecKeys),
                      [&](const char* k) { return key == k; }) != std::end(kSpecKeys);
}

bool list_key(const std::string& key) {
  return std::find_if(std::begin(kListKeys), std::end(kListKeys),
                      [&](const char* k) { return key == k; }) != std::end(kListKeys);
}

std::string join(const std::vector<std::size_t>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + std::to_string(v[i]);
  return out;
}

std::string to_string(Task t) { return t == Task::trrpca ? "trrpca" : "rtrc"; }

std::string to_string(SourceKind s) {
  switch (s) {
    case SourceKind::synthetic: return "synthetic";
    case SourceKind::tensor_file: return "tensor";
    case SourceKind::image_file: return "image";
  }
  return "synthetic";
}

// Everything a single solve needs, built before any output is written.
struct Problem {
  DenseTensor truth;       // metric reference (image domain for images)
  DenseTensor observed;    // solver input (tensorized for images)
  SamplingMask mask;
  double sr = 1.0;
};

struct Solve {
  RecoveryResult result;
  double wall_seconds = 0.0;
};

Solve solve(Task task, const Problem& p, const SolverConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Solve s{task == Task::trrpca ? trrpca(p.observed, cfg) : rtrc(p.observed, p.mask, cfg), 0.0};
  s.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

// Synthetic and tensor-file references have no natural peak, so the largest
// magnitude of the truth stands in for it.
MetricReport evaluate_tensor(const DenseTensor& estimate, const DenseTensor& truth, double sr) {
  const double peak = max_abs(truth);
  SsimOptions opt;
  opt.window = std::min({opt.window, truth.dims()[0], truth.dims()[1]});
  opt.dynamic_range = peak > 0.0 ? peak : 1.0;
  return evaluate(estimate, truth, opt.dynamic_range, opt, sr);
}

CorruptionSpec corruption_for(const ExperimentSpec& spec, double gamma, std::uint64_t seed) {
  CorruptionSpec c;
  c.fraction = gamma;
  c.model = spec.corruption;
  c.sigma = spec.sigma;
  c.seed = seed;
  return c;
}

// Builds one repetition's problem around a given clean tensor.
Problem tensor_problem(const ExperimentSpec& spec, DenseTensor truth, double sr, double gamma,
                       std::uint64_t rep_seed) {
  if (spec.task == Task::trrpca && sr != 1.0) {
    throw DomainError("trrpca needs full observation (sr = 1); use task = rtrc");
  }
  const auto cs = corruption_for(spec, gamma, derive_seed(rep_seed, 0, kCorruptionStream));
  if (spec.task == Task::rtrc) {
    auto mask = gen_mask(truth.dims(), sr, derive_seed(rep_seed, 0, kMaskStream));
    auto observed = apply_mask(mask, corrupt(truth, cs, mask).corrupted);
    return Problem{std::move(truth), std::move(observed), std::move(mask), sr};
  }
  auto observed = corrupt(truth, cs).corrupted;
  auto mask = SamplingMask::full(truth.dims());
  return Problem{std::move(truth), std::move(observed), std::move(mask), sr};
}

Problem synthetic_problem(const ExperimentSpec& spec, std::size_t rep, std::size_t rank_index,
                          double sr, double gamma) {
  if (spec.source != SourceKind::synthetic) throw DomainError("spec source is not synthetic");
  if (rank_index >= spec.ranks.size()) throw BoundsError("rank index out of range");
  const std::uint64_t rep_seed = derive_seed(spec.seed, rep, 0);
  auto truth = random_tr_tensor(spec.dims, spec.ranks[rank_index],
                                derive_seed(rep_seed, rank_index, kTensorStream))
                   .tensor;
  return tensor_problem(spec, std::move(truth), sr, gamma, rep_seed);
}

void require_single(const ExperimentSpec& spec) {
  if (spec.ranks.size() > 1 || spec.gammas.size() != 1 || spec.srs.size() != 1) {
    throw DomainError("run takes a single rank, gamma and sr; use sweep for grids");
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void create_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t rep, std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(base) ^ rep) ^ stream);
}

SyntheticInstance synthetic_instance(const ExperimentSpec& spec, std::size_t rep,
                                     std::size_t rank_index, double sr, double gamma) {
  auto p = synthetic_problem(spec, rep, rank_index, sr, gamma);
  return SyntheticInstance{std::move(p.truth), std::move(p.observed), std::move(p.mask)};
}

void ExperimentSpec::validate() const {
  if (repetitions < 1) throw DomainError("reps must be at least 1");
  if (workers < 1) throw DomainError("workers must be at least 1");
  if (srs.empty() || gammas.empty()) throw DomainError("empty sr or gamma list");
  for (double sr : srs) {
    if (!(sr > 0.0 && sr <= 1.0)) throw DomainError("sr must lie in (0, 1]");
    if (task == Task::trrpca && sr != 1.0) {
      throw DomainError("trrpca needs full observation (sr = 1); use task = rtrc");
    }
  }
  for (double g : gammas) corruption_for(*this, g, 0).validate();

  if (source == SourceKind::synthetic) {
    if (dims.size() < 2) throw DomainError("synthetic source needs dims of order >= 2");
    if (ranks.empty()) throw DomainError("synthetic source needs a rank");
    for (const auto& r : ranks) {
      if (r.size() != dims.size()) throw ShapeError("rank length must equal the tensor order");
    }
    solver.validate(dims.size());
  } else {
    if (input.empty()) throw DomainError("source " + to_string(source) + " needs an input");
    if (!ranks.empty()) throw DomainError("rank applies to synthetic sources only");
    if (!dims.empty()) throw DomainError("dims applies to synthetic sources only");
  }
  if (source == SourceKind::image_file) {
    if (row_factors.size() != col_factors.size()) {
      throw ShapeError("factors and col_factors need the same length");
    }
  } else if (!row_factors.empty() || !col_factors.empty()) {
    throw DomainError("factors apply to image sources only");
  }
}

ExperimentSpec parse_experiment_spec(std::string_view text) {
  const auto doc = KeyValueDocument::parse(text);
  for (const auto& [key, value] : doc.entries()) {
    if (!known_key(key)) throw FormatError("unknown spec key '" + key + "'");
    if (!list_key(key) && doc.get_all(key).size() > 1) {
      throw FormatError("key '" + key + "' may not repeat");
    }
  }

  ExperimentSpec s;
  if (auto v = doc.get("task")) {
    if (*v == "trrpca") s.task = Task::trrpca;
    else if (*v == "rtrc") s.task = Task::rtrc;
    else throw FormatError("task must be trrpca or rtrc, got '" + *v + "'");
  }
  if (auto v = doc.get("source")) {
    if (*v == "synthetic") s.source = SourceKind::synthetic;
    else if (*v == "tensor") s.source = SourceKind::tensor_file;
    else if (*v == "image") s.source = SourceKind::image_file;
    else throw FormatError("source must be synthetic, tensor or image, got '" + *v + "'");
  }
  if (auto v = doc.get("dims")) s.dims = parse_size_list("dims", *v);
  if (auto v = doc.get("input")) s.input = *v;
  if (auto v = doc.get("factors")) s.row_factors = parse_size_list("factors", *v);
  if (auto v = doc.get("col_factors")) s.col_factors = parse_size_list("col_factors", *v);
  else s.col_factors = s.row_factors;

  for (const auto& v : doc.get_all("rank")) s.ranks.push_back(parse_size_list("rank", v));
  if (doc.contains("gamma")) {
    s.gammas.clear();
    for (const auto& v : doc.get_all("gamma")) s.gammas.push_back(parse_real("gamma", v));
  }
  if (doc.contains("sr")) {
    s.srs.clear();
    for (const auto& v : doc.get_all("sr")) s.srs.push_back(parse_real("sr", v));
  }
  if (auto v = doc.get("corruption")) s.corruption = parse_corruption_model(*v);
  else if (s.source == SourceKind::image_file) s.corruption = CorruptionModel::uniform_0_255;
  if (auto v = doc.get("sigma")) s.sigma = parse_real("sigma", *v);

  s.solver = solver_config_from(doc);
  if (s.source == SourceKind::image_file && !doc.contains("mu0")) s.solver.mu0 = kImageMu0;
  if (auto v = doc.get("reps")) s.repetitions = parse_unsigned("reps", *v);
  if (auto v = doc.get("seed")) s.seed = parse_unsigned("seed", *v);
  if (auto v = doc.get("workers")) s.workers = parse_unsigned("workers", *v);
  if (auto v = doc.get("output")) s.output_dir = *v;

  s.validate();
  return s;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open spec " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_experiment_spec(text.str());
}

std::string format_experiment_spec(const ExperimentSpec& spec) {
  std::string out;
  out += "task = " + to_string(spec.task) + "\n";
  out += "source = " + to_string(spec.source) + "\n";
  if (!spec.dims.empty()) out += "dims = " + join(spec.dims, ",") + "\n";
  if (!spec.input.empty()) out += "input = " + spec.input.string() + "\n";
  if (!spec.row_factors.empty()) {
    out += "factors = " + join(spec.row_factors, ",") + "\n";
    out += "col_factors = " + join(spec.col_factors, ",") + "\n";
  }
  for (const auto& r : spec.ranks) out += "rank = " + join(r, ",") + "\n";
  for (double g : spec.gammas) out += "gamma = " + format_real(g) + "\n";
  for (double sr : spec.srs) out += "sr = " + format_real(sr) + "\n";
  out += "corruption = " + to_string(spec.corruption) + "\n";
  out += "sigma = " + format_real(spec.sigma) + "\n";
  out += format_solver_config(spec.solver);
  out += "reps = " + std::to_string(spec.repetitions) + "\n";
  out += "seed = " + std::to_string(spec.seed) + "\n";
  out += "workers = " + std::to_string(spec.workers) + "\n";
  out += "output = " + spec.output_dir.string() + "\n";
  return out;
}

void apply_environment(ExperimentSpec& spec) {
  if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
    spec.output_dir = dir;
  }
}

std::vector<RunRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  require_single(spec);
  const double sr = spec.srs.front();
  const double gamma = spec.gammas.front();

  // Load file inputs first: a bad input must not leave a half-written run.
  std::optional<DenseTensor> input;
  if (spec.source == SourceKind::tensor_file) input = load_trt1(spec.input);
  if (spec.source == SourceKind::image_file) {
    input = load_ppm(spec.input);
    if (!spec.row_factors.empty()) (void)vdt_forward(*input, spec.row_factors, spec.col_factors);
  }
  if (input) {
    const auto order = spec.source == SourceKind::image_file && !spec.row_factors.empty()
                           ? spec.row_factors.size() + 1
                           : input->order();
    spec.solver.validate(order);
  }

  create_output_dir(spec.output_dir);
  auto csv = open_output(spec.output_dir / "results.csv");
  csv << kRunCsvHeader << '\n' << std::flush;

  std::vector<RunRow> rows;
  for (std::size_t rep = 1; rep <= spec.repetitions; ++rep) {
    const std::uint64_t rep_seed = derive_seed(spec.seed, rep, 0);
    const std::string tag = "_rep" + std::to_string(rep);
    RunRow row;
    row.rep = rep;
    row.seed = rep_seed;

    if (spec.source == SourceKind::image_file) {
      const bool tensorize = !spec.row_factors.empty();
      const auto cs = corruption_for(spec, gamma, derive_seed(rep_seed, 0, kCorruptionStream));
      const auto noisy = corrupt_pixels(*input, cs).corrupted;
      auto observed = tensorize ? vdt_forward(noisy, spec.row_factors, spec.col_factors) : noisy;
      auto mask = spec.task == Task::rtrc
                      ? gen_mask(observed.dims(), sr, derive_seed(rep_seed, 0, kMaskStream))
                      : SamplingMask::full(observed.dims());
      observed = apply_mask(mask, observed);
      const Problem p{*input, std::move(observed), std::move(mask), sr};
      const auto s = solve(spec.task, p, spec.solver);
      const auto image = tensorize
                             ? vdt_inverse(s.result.low_rank, spec.row_factors, spec.col_factors)
                             : s.result.low_rank;
      row.metrics = evaluate(image, p.truth, 255.0, SsimOptions{}, sr);
      row.lambda = s.result.lambda;
      row.iterations = s.result.iterations;
      row.converged = s.result.converged;
      row.wall_seconds = s.wall_seconds;
      save_trt1(spec.output_dir / ("L" + tag + ".trt1"), s.result.low_rank);
      save_trt1(spec.output_dir / ("S" + tag + ".trt1"), s.result.sparse);
      save_ppm(spec.output_dir / ("L" + tag + ".ppm"), image);
    } else {
      const Problem p = spec.source == SourceKind::synthetic
                            ? synthetic_problem(spec, rep, 0, sr, gamma)
                            : tensor_problem(spec, *input, sr, gamma, rep_seed);
      const auto s = solve(spec.task, p, spec.solver);
      row.metrics = evaluate_tensor(s.result.low_rank, p.truth, sr);
      row.lambda = s.result.lambda;
      row.iterations = s.result.iterations;
      row.converged = s.result.converged;
      row.wall_seconds = s.wall_seconds;
      save_trt1(spec.output_dir / ("L" + tag + ".trt1"), s.result.low_rank);
      save_trt1(spec.output_dir / ("S" + tag + ".trt1"), s.result.sparse);
    }

    const auto& m = row.metrics;
    csv << row.rep << ',' << row.seed << ',' << format_real(m.re) << ',' << format_real(m.mse)
        << ',' << format_real(m.psnr_db) << ',' << format_real(m.ssim) << ','
        << format_real(m.sr) << ',' << format_real(row.lambda) << ',' << row.iterations << ','
        << (row.converged ? 1 : 0) << ',' << format_real(row.wall_seconds) << '\n'
        << std::flush;
    if (!csv) throw IoError("write failed on results.csv");
    rows.push_back(row);
  }

  auto manifest = open_output(spec.output_dir / "manifest.txt");
  manifest << format_experiment_spec(spec);
  for (const auto& row : rows) {
    manifest << "# resolved_lambda rep=" << row.rep << " value=" << format_real(row.lambda)
             << '\n';
  }
  if (!manifest.flush()) throw IoError("write failed on manifest.txt");
  return rows;
}

std::vector<SweepCell> run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.source != SourceKind::synthetic) throw DomainError("sweep needs a synthetic source");

  std::vector<SweepCell> cells;
  std::vector<std::size_t> rank_of_cell;
  for (std::size_t ri = 0; ri < spec.ranks.size(); ++ri) {
    for (double g : spec.gammas) {
      for (double sr : spec.srs) {
        SweepCell c;
        c.sr = sr;
        c.gamma = g;
        c.rank = spec.ranks[ri];
        c.reps = spec.repetitions;
        cells.push_back(c);
        rank_of_cell.push_back(ri);
      }
    }
  }
  // Infeasible ranks fail here rather than halfway through the grid.
  for (const auto& r : spec.ranks) {
    if (!is_subcritical(spec.dims, r, balanced_split(spec.dims.size()))) {
      throw DomainError("rank " + join(r, "x") + " is not subcritical for these dims");
    }
  }

  create_output_dir(spec.output_dir);
  {
    auto manifest = open_output(spec.output_dir / "manifest.txt");
    manifest << format_experiment_spec(spec);
    if (!spec.solver.lambda) manifest << "# lambda resolved per cell as default_lambda(dims, sr)\n";
    if (!manifest.flush()) throw IoError("write failed on manifest.txt");
  }
  auto csv = open_output(spec.output_dir / "sweep.csv");
  csv << kSweepCsvHeader << '\n' << std::flush;

  std::mutex writer;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;

  auto work = [&] {
    for (std::size_t i = next++; i < cells.size() && !failed; i = next++) {
      try {
        SweepCell& c = cells[i];
        double re_sum = 0.0, it_sum = 0.0;
        for (std::size_t rep = 1; rep <= spec.repetitions; ++rep) {
          const auto p = synthetic_problem(spec, rep, rank_of_cell[i], c.sr, c.gamma);
          const auto s = solve(spec.task, p, spec.solver);
          const double re = metric_re(s.result.low_rank, p.truth);
          if (re <= kSuccessThreshold) ++c.successes;
          re_sum += re;
          it_sum += static_cast<double>(s.result.iterations);
        }
        c.mean_re = re_sum / static_cast<double>(c.reps);
        c.mean_iterations = it_sum / static_cast<double>(c.reps);

        std::lock_guard lock(writer);
        csv << i << ',' << format_real(c.sr) << ',' << format_real(c.gamma) << ','
            << join(c.rank, "x") << ',' << c.reps << ',' << c.successes << ','
            << format_real(c.mean_re) << ',' << format_real(c.mean_iterations) << '\n'
            << std::flush;
        if (!csv) throw IoError("write failed on sweep.csv");
      } catch (...) {
        std::lock_guard lock(writer);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  const std::size_t n = std::min(spec.workers, cells.size());
  if (n <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  return cells;
}

}  // namespace trr
