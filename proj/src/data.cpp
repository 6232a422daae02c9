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

#include "trr/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

#include "trr/errors.hpp"
#include "trr/keyvalue.hpp"

namespace trr {

namespace {

std::size_t product(const std::vector<std::size_t>& v) {
  return std::accumulate(v.begin(), v.end(), std::size_t{1}, std::multiplies<>());
}

// floor(fraction * n), robust to representation error such as 0.29 * 100.
std::size_t fraction_count(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) * (1.0 + 1e-12)));
}

void apply_values(Corruption& c, const CorruptionSpec& spec, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> uniform(0.0, 255.0);
  std::normal_distribution<double> normal(0.0, spec.sigma);
  for (std::size_t offset : c.support) {
    double& v = c.corrupted[offset];
    switch (spec.model) {
      case CorruptionModel::signed_unit:
        v += coin(rng) ? 1.0 : -1.0;
        break;
      case CorruptionModel::uniform_0_255:
        v = uniform(rng);
        break;
      case CorruptionModel::gaussian:
        v += normal(rng);
        break;
    }
  }
}

Corruption corrupt_among(const DenseTensor& x, const CorruptionSpec& spec,
                         const std::vector<std::size_t>& candidates) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  Corruption c{x, DenseTensor(x.dims()), {}};
  const std::size_t count = fraction_count(spec.fraction, candidates.size());
  c.support.reserve(count);
  std::sample(candidates.begin(), candidates.end(), std::back_inserter(c.support), count, rng);
  std::sort(c.support.begin(), c.support.end());
  apply_values(c, spec, rng);
  c.sparse = c.corrupted - x;
  return c;
}

void check_factors(const Dims& dims, const std::vector<std::size_t>& row_factors,
                   const std::vector<std::size_t>& col_factors) {
  if (row_factors.empty() || row_factors.size() != col_factors.size()) {
    throw DomainError("vdt: need the same positive number of row and column factors");
  }
  for (std::size_t f : row_factors) {
    if (f == 0) throw DomainError("vdt: factors must be positive");
  }
  for (std::size_t f : col_factors) {
    if (f == 0) throw DomainError("vdt: factors must be positive");
  }
  if (product(row_factors) != dims[0] || product(col_factors) != dims[1]) {
    throw DomainError("vdt: factor products do not match the image size " + std::to_string(dims[0]) +
                      "x" + std::to_string(dims[1]));
  }
}

// (1, K+1, 2, K+2, ..., K, 2K, 2K+1)
std::vector<std::size_t> interleave_order(std::size_t k) {
  std::vector<std::size_t> order;
  order.reserve(2 * k + 1);
  for (std::size_t i = 1; i <= k; ++i) {
    order.push_back(i);
    order.push_back(k + i);
  }
  order.push_back(2 * k + 1);
  return order;
}

void require_congruent(const DenseTensor& a, const DenseTensor& b, const char* what) {
  if (a.dims() != b.dims()) throw ShapeError(std::string(what) + ": tensor dims differ");
}

std::string next_token(std::istream& in) {
  std::string token;
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch)) {
      if (!token.empty()) return token;
    } else {
      token.push_back(static_cast<char>(ch));
    }
    if (ch != EOF) ch = in.get();
  }
  return token;
}

std::size_t header_number(std::istream& in, const char* what) {
  const std::string tok = next_token(in);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(c); })) {
    throw FormatError(std::string("PPM: bad ") + what);
  }
  return std::stoul(tok);
}

}  // namespace

SamplingMask gen_mask(const Dims& dims, double sr, std::uint64_t seed) {
  if (!(sr > 0.0 && sr <= 1.0)) throw DomainError("sampling ratio must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  DenseTensor p(dims);
  for (double& v : p.data()) v = uniform(rng) < sr ? 1.0 : 0.0;
  return SamplingMask(std::move(p));
}

void CorruptionSpec::validate() const {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw DomainError("corruption fraction must lie in [0, 1)");
  }
  if (model == CorruptionModel::gaussian && !(sigma >= 0.0)) {
    throw DomainError("gaussian corruption needs sigma >= 0");
  }
}

Corruption corrupt(const DenseTensor& x, const CorruptionSpec& spec) {
  std::vector<std::size_t> all(x.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return corrupt_among(x, spec, all);
}

Corruption corrupt(const DenseTensor& x, const CorruptionSpec& spec, const SamplingMask& mask) {
  if (mask.dims() != x.dims()) throw ShapeError("corrupt: mask dims differ");
  std::vector<std::size_t> observed;
  observed.reserve(mask.observed_count());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (mask.observed(i)) observed.push_back(i);
  }
  return corrupt_among(x, spec, observed);
}

Corruption corrupt_pixels(const DenseTensor& image, const CorruptionSpec& spec) {
  spec.validate();
  if (image.order() != 3) throw DomainError("corrupt_pixels: expected an M x N x C image");
  const std::size_t pixels = image.dims()[0] * image.dims()[1];
  const std::size_t channels = image.dims()[2];
  std::mt19937_64 rng(spec.seed);
  std::vector<std::size_t> all(pixels);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> chosen;
  std::sample(all.begin(), all.end(), std::back_inserter(chosen), fraction_count(spec.fraction, pixels),
              rng);
  Corruption c{image, DenseTensor(image.dims()), {}};
  for (std::size_t ch = 0; ch < channels; ++ch) {
    for (std::size_t p : chosen) c.support.push_back(p + pixels * ch);
  }
  std::sort(c.support.begin(), c.support.end());
  apply_values(c, spec, rng);
  c.sparse = c.corrupted - image;
  return c;
}

CorruptionModel parse_corruption_model(const std::string& name) {
  if (name == "signed_unit") return CorruptionModel::signed_unit;
  if (name == "uniform_0_255") return CorruptionModel::uniform_0_255;
  if (name == "gaussian") return CorruptionModel::gaussian;
  throw FormatError("unknown corruption model '" + name + "'");
}

std::string to_string(CorruptionModel model) {
  switch (model) {
    case CorruptionModel::signed_unit:
      return "signed_unit";
    case CorruptionModel::uniform_0_255:
      return "uniform_0_255";
    case CorruptionModel::gaussian:
      return "gaussian";
  }
  return "?";
}

DenseTensor vdt_forward(const DenseTensor& image, const std::vector<std::size_t>& row_factors,
                        const std::vector<std::size_t>& col_factors) {
  if (image.order() != 3) throw DomainError("vdt: expected an M x N x C image");
  check_factors(image.dims(), row_factors, col_factors);
  const std::size_t k = row_factors.size();

  Dims split(row_factors);
  split.insert(split.end(), col_factors.begin(), col_factors.end());
  split.push_back(image.dims()[2]);
  const DenseTensor interleaved = permute(reshape(image, split), interleave_order(k));

  Dims merged;
  merged.reserve(k + 1);
  for (std::size_t i = 0; i < k; ++i) merged.push_back(row_factors[i] * col_factors[i]);
  merged.push_back(image.dims()[2]);
  return reshape(interleaved, merged);
}

DenseTensor vdt_inverse(const DenseTensor& tensor, const std::vector<std::size_t>& row_factors,
                        const std::vector<std::size_t>& col_factors) {
  const std::size_t k = row_factors.size();
  if (k == 0 || col_factors.size() != k || tensor.order() != k + 1) {
    throw DomainError("vdt_inverse: tensor order does not match the factor count");
  }
  Dims pairs;
  pairs.reserve(2 * k + 1);
  for (std::size_t i = 0; i < k; ++i) {
    if (row_factors[i] * col_factors[i] != tensor.dims()[i]) {
      throw DomainError("vdt_inverse: mode " + std::to_string(i + 1) + " does not match its factors");
    }
    pairs.push_back(row_factors[i]);
    pairs.push_back(col_factors[i]);
  }
  const std::size_t channels = tensor.dims()[k];
  pairs.push_back(channels);

  const auto order = interleave_order(k);
  std::vector<std::size_t> inverse(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) inverse[order[i] - 1] = i + 1;
  const DenseTensor split = permute(reshape(tensor, pairs), inverse);
  return reshape(split, {product(row_factors), product(col_factors), channels});
}

double metric_re(const DenseTensor& estimate, const DenseTensor& truth) {
  require_congruent(estimate, truth, "metric_re");
  const double base = frobenius(truth);
  if (base == 0.0) throw DomainError("relative error is undefined for a zero reference");
  return frobenius(estimate - truth) / base;
}

double metric_mse(const DenseTensor& estimate, const DenseTensor& truth) {
  require_congruent(estimate, truth, "metric_mse");
  const double f = frobenius(estimate - truth);
  return f * f / static_cast<double>(truth.size());
}

double metric_psnr(const DenseTensor& estimate, const DenseTensor& truth, double peak) {
  if (!(peak > 0.0)) throw DomainError("PSNR peak must be positive");
  const double mse = metric_mse(estimate, truth);
  if (mse == 0.0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 20.0 * std::log10(peak / std::sqrt(mse)));
}

double metric_ssim(const DenseTensor& estimate, const DenseTensor& truth, const SsimOptions& options) {
  require_congruent(estimate, truth, "metric_ssim");
  if (truth.order() < 2) throw DomainError("SSIM needs at least two spatial modes");
  const std::size_t rows = truth.dims()[0];
  const std::size_t cols = truth.dims()[1];
  const std::size_t w = options.window;
  if (w == 0 || w > rows || w > cols) {
    throw DomainError("SSIM window " + std::to_string(w) + " does not fit " + std::to_string(rows) +
                      "x" + std::to_string(cols));
  }
  const double c1 = std::pow(options.k1 * options.dynamic_range, 2);
  const double c2 = std::pow(options.k2 * options.dynamic_range, 2);
  const std::size_t plane = rows * cols;
  const std::size_t channels = truth.size() / plane;
  const double n = static_cast<double>(w * w);

  double total = 0.0;
  std::size_t windows = 0;
  for (std::size_t ch = 0; ch < channels; ++ch) {
    const std::size_t base = ch * plane;
    for (std::size_t c0 = 0; c0 + w <= cols; c0 += w) {
      for (std::size_t r0 = 0; r0 + w <= rows; r0 += w) {
        double mx = 0.0, my = 0.0;
        for (std::size_t c = c0; c < c0 + w; ++c) {
          for (std::size_t r = r0; r < r0 + w; ++r) {
            mx += estimate[base + r + rows * c];
            my += truth[base + r + rows * c];
          }
        }
        mx /= n;
        my /= n;
        double vx = 0.0, vy = 0.0, cxy = 0.0;
        for (std::size_t c = c0; c < c0 + w; ++c) {
          for (std::size_t r = r0; r < r0 + w; ++r) {
            const double dx = estimate[base + r + rows * c] - mx;
            const double dy = truth[base + r + rows * c] - my;
            vx += dx * dx;
            vy += dy * dy;
            cxy += dx * dy;
          }
        }
        vx /= n;
        vy /= n;
        cxy /= n;
        total += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
        ++windows;
      }
    }
  }
  return total / static_cast<double>(windows);
}

std::string MetricReport::to_record() const {
  return "re=" + format_real(re) + " mse=" + format_real(mse) + " psnr_db=" + format_real(psnr_db) +
         " ssim=" + format_real(ssim) + " sr=" + format_real(sr) +
         " ssim_window=" + std::to_string(ssim_window);
}

MetricReport evaluate(const DenseTensor& estimate, const DenseTensor& truth, double peak,
                      const SsimOptions& options, double sr) {
  MetricReport r;
  r.re = metric_re(estimate, truth);
  r.mse = metric_mse(estimate, truth);
  r.psnr_db = metric_psnr(estimate, truth, peak);
  r.ssim = metric_ssim(estimate, truth, options);
  r.sr = sr;
  r.ssim_window = options.window;
  return r;
}

DenseTensor read_ppm(std::istream& in) {
  if (next_token(in) != "P6") throw FormatError("PPM: expected binary P6 magic");
  const std::size_t width = header_number(in, "width");
  const std::size_t height = header_number(in, "height");
  const std::size_t maxval = header_number(in, "maxval");
  if (width == 0 || height == 0) throw FormatError("PPM: empty image");
  if (maxval != 255) throw FormatError("PPM: unsupported maxval " + std::to_string(maxval));
  // next_token consumed exactly one whitespace byte after maxval

  std::vector<unsigned char> bytes(width * height * 3);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw FormatError("PPM: truncated pixel data");
  }
  DenseTensor image({height, width, 3});
  const std::size_t plane = height * width;
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      for (std::size_t ch = 0; ch < 3; ++ch) {
        image[r + height * c + plane * ch] = bytes[3 * (r * width + c) + ch];
      }
    }
  }
  return image;
}

DenseTensor load_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_ppm(in);
}

void write_ppm(std::ostream& out, const DenseTensor& image) {
  if (image.order() != 3 || image.dims()[2] != 3) {
    throw DomainError("PPM output needs an M x N x 3 tensor");
  }
  const std::size_t height = image.dims()[0];
  const std::size_t width = image.dims()[1];
  const std::size_t plane = height * width;
  out << "P6\n" << width << ' ' << height << "\n255\n";
  std::vector<char> bytes(plane * 3);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      for (std::size_t ch = 0; ch < 3; ++ch) {
        const double x = image[r + height * c + plane * ch];
        const double v = std::isnan(x) ? 0.0 : std::round(std::clamp(x, 0.0, 255.0));
        bytes[3 * (r * width + c) + ch] = static_cast<char>(static_cast<unsigned char>(v));
      }
    }
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("PPM: write failed");
}

void save_ppm(const std::filesystem::path& path, const DenseTensor& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_ppm(out, image);
}

}  // namespace trr
