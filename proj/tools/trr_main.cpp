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

// trr: robust tensor-ring recovery from the command line.
//
//   trr run <spec>                       one experiment, per-rep CSV + L/S tensors
//   trr sweep <spec>                     recovery-probability grid over sr x gamma x rank
//   trr metrics <recovered> <truth>      RE / MSE / PSNR / SSIM of two TRT1 tensors
//   trr vdt <image.ppm> --factors ...    tensorize an image (or --inverse to undo)
//
// Exit status: 0 success, 1 solver divergence, 2 I/O, format or spec error.

#include <CLI11.hpp>

#include <algorithm>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "trr/data.hpp"
#include "trr/errors.hpp"
#include "trr/experiment.hpp"
#include "trr/tensor_io.hpp"

namespace {

constexpr int kExitDivergence = 1;
constexpr int kExitError = 2;

int cmd_run(const std::string& spec_path) {
  auto spec = trr::load_experiment_spec(spec_path);
  trr::apply_environment(spec);
  const auto rows = trr::run_experiment(spec);
  for (const auto& row : rows) {
    std::cout << "rep=" << row.rep << ' ' << row.metrics.to_record()
              << " iterations=" << row.iterations << " converged=" << row.converged << '\n';
  }
  std::cout << "wrote " << (spec.output_dir / "results.csv").string() << '\n';
  return 0;
}

int cmd_sweep(const std::string& spec_path) {
  auto spec = trr::load_experiment_spec(spec_path);
  trr::apply_environment(spec);
  const auto cells = trr::run_sweep(spec);
  for (const auto& c : cells) {
    std::cout << "sr=" << trr::format_real(c.sr) << " gamma=" << trr::format_real(c.gamma)
              << " successes=" << c.successes << '/' << c.reps
              << " mean_re=" << trr::format_real(c.mean_re) << '\n';
  }
  std::cout << "wrote " << (spec.output_dir / "sweep.csv").string() << '\n';
  return 0;
}

int cmd_metrics(const std::string& recovered, const std::string& truth_path, double peak,
                std::size_t window) {
  const auto estimate = trr::load_trt1(recovered);
  const auto truth = trr::load_trt1(truth_path);
  if (peak <= 0.0) peak = trr::max_abs(truth);
  trr::SsimOptions opt;
  opt.window = std::min({window, truth.dims()[0], truth.dims()[1]});
  opt.dynamic_range = peak;
  std::cout << trr::evaluate(estimate, truth, peak, opt, 1.0).to_record() << '\n';
  return 0;
}

int cmd_vdt(const std::string& input, const std::vector<std::size_t>& row_factors,
            std::vector<std::size_t> col_factors, const std::string& out, bool inverse) {
  if (col_factors.empty()) col_factors = row_factors;
  if (inverse) {
    trr::save_ppm(out, trr::vdt_inverse(trr::load_trt1(input), row_factors, col_factors));
  } else {
    const auto tensor = trr::vdt_forward(trr::load_ppm(input), row_factors, col_factors);
    trr::save_trt1(out, tensor);
    std::cout << "dims=";
    for (std::size_t i = 0; i < tensor.order(); ++i) {
      std::cout << (i ? "," : "") << tensor.dims()[i];
    }
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust tensor-ring recovery (TRRPCA and RTRC)"};
  app.require_subcommand(1);

  std::string spec_path;
  auto* run = app.add_subcommand("run", "Run one experiment spec");
  run->add_option("spec", spec_path, "Experiment spec file")->required();
  auto* sweep = app.add_subcommand("sweep", "Run a phase-transition sweep");
  sweep->add_option("spec", spec_path, "Experiment spec file")->required();

  std::string recovered, truth;
  double peak = 0.0;
  std::size_t window = 8;
  auto* metrics = app.add_subcommand("metrics", "Compare a recovered tensor with the truth");
  metrics->add_option("recovered", recovered, "Recovered TRT1 tensor")->required();
  metrics->add_option("truth", truth, "Ground-truth TRT1 tensor")->required();
  metrics->add_option("--peak", peak, "PSNR peak and SSIM range (default: max |truth|)");
  metrics->add_option("--window", window, "SSIM window (clipped to the first two dims)");

  std::string input, out;
  std::vector<std::size_t> row_factors, col_factors;
  bool inverse = false;
  auto* vdt = app.add_subcommand("vdt", "Visual data tensorization of a PPM image");
  vdt->add_option("input", input, "P6 image, or a TRT1 tensor with --inverse")->required();
  vdt->add_option("--factors", row_factors, "Row factors m_1..m_K")->required()->delimiter(',');
  vdt->add_option("--col-factors", col_factors, "Column factors (default: --factors)")
      ->delimiter(',');
  vdt->add_option("--out", out, "Output path")->required();
  vdt->add_flag("--inverse", inverse, "Fold a tensor back into an image");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*run) return cmd_run(spec_path);
    if (*sweep) return cmd_sweep(spec_path);
    if (*metrics) return cmd_metrics(recovered, truth, peak, window);
    if (*vdt) return cmd_vdt(input, row_factors, col_factors, out, inverse);
  } catch (const trr::DivergenceError& e) {
    std::cerr << "trr: diverged: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "trr: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}
