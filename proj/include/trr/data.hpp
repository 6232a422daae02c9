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

#ifndef TRR_DATA_HPP
#define TRR_DATA_HPP

// Problem generators, visual data tensorization, quality metrics and PPM
// image I/O.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trr/tensor.hpp"

namespace trr {

// ---------------------------------------------------------------------------
// Sampling and corruption

/// Bernoulli(sr) mask. Entry i is observed when the i-th draw of a seeded
/// uniform stream is below sr, so for a fixed seed a larger sr observes a
/// superset of the entries observed at a smaller one.
SamplingMask gen_mask(const Dims& dims, double sr, std::uint64_t seed);

enum class CorruptionModel {
  signed_unit,    ///< add +1 or -1 with equal probability
  uniform_0_255,  ///< overwrite with a uniform value in [0, 255]
  gaussian,       ///< add N(0, sigma^2)
};

struct CorruptionSpec {
  /// Fraction gamma of entries hit; must lie in [0, 1).
  double fraction = 0.0;
  CorruptionModel model = CorruptionModel::signed_unit;
  double sigma = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Corruption {
  DenseTensor corrupted;
  /// S0 = corrupted - original.
  DenseTensor sparse;
  /// 0-based offsets of the corrupted entries, ascending.
  std::vector<std::size_t> support;
};

/// Corrupts exactly floor(gamma * card(X)) entries chosen uniformly without
/// replacement.
Corruption corrupt(const DenseTensor& x, const CorruptionSpec& spec);
/// Same, restricted to the observed entries: floor(gamma * |Omega|) of them.
Corruption corrupt(const DenseTensor& x, const CorruptionSpec& spec, const SamplingMask& mask);
/// Image variant for an M x N x C tensor: floor(gamma * M * N) pixels are
/// chosen and every channel of each chosen pixel is corrupted.
Corruption corrupt_pixels(const DenseTensor& image, const CorruptionSpec& spec);

CorruptionModel parse_corruption_model(const std::string& name);
std::string to_string(CorruptionModel model);

// ---------------------------------------------------------------------------
// Visual data tensorization

/// M x N x C image to a (m_1 n_1, ..., m_K n_K, C) tensor. The row index is
/// split first-index-fastest over (m_1..m_K) and the column index over
/// (n_1..n_K); merged mode k has index i_k + m_k * j_k.
DenseTensor vdt_forward(const DenseTensor& image, const std::vector<std::size_t>& row_factors,
                        const std::vector<std::size_t>& col_factors);
DenseTensor vdt_inverse(const DenseTensor& tensor, const std::vector<std::size_t>& row_factors,
                        const std::vector<std::size_t>& col_factors);

// ---------------------------------------------------------------------------
// Metrics

inline constexpr double kPsnrCapDb = 200.0;

/// ||estimate - truth||_F / ||truth||_F. DomainError if truth is zero.
double metric_re(const DenseTensor& estimate, const DenseTensor& truth);
/// ||estimate - truth||_F^2 / card.
double metric_mse(const DenseTensor& estimate, const DenseTensor& truth);
/// 20 log10(peak / sqrt(MSE)), capped at kPsnrCapDb.
double metric_psnr(const DenseTensor& estimate, const DenseTensor& truth, double peak);

struct SsimOptions {
  std::size_t window = 8;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
};

/// Mean SSIM over non-overlapping window x window blocks of the first two
/// modes, for every index of the remaining modes (channels). Plain means
/// and population (co)variances; partial blocks at the border are skipped.
double metric_ssim(const DenseTensor& estimate, const DenseTensor& truth,
                   const SsimOptions& options = {});

struct MetricReport {
  double re = 0.0;
  double mse = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  double sr = 1.0;
  std::size_t ssim_window = 8;

  /// "re=... mse=... psnr_db=... ssim=... sr=... ssim_window=..."
  std::string to_record() const;
};

MetricReport evaluate(const DenseTensor& estimate, const DenseTensor& truth, double peak,
                      const SsimOptions& options, double sr);

// ---------------------------------------------------------------------------
// PPM (P6, maxval 255)

/// Height x width x 3 tensor with values in [0, 255].
DenseTensor load_ppm(const std::filesystem::path& path);
DenseTensor read_ppm(std::istream& in);
/// Clamps to [0, 255] and rounds half away from zero.
void save_ppm(const std::filesystem::path& path, const DenseTensor& image);
void write_ppm(std::ostream& out, const DenseTensor& image);

}  // namespace trr

#endif  // TRR_DATA_HPP
