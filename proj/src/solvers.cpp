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

#include "trr/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>

#include "trr/errors.hpp"
#include "trr/prox.hpp"

namespace trr {

namespace {

constexpr const char* kSolverKeys[] = {"lambda", "weights", "beta",     "mu0",
                                       "mu_max", "tol",     "max_iters", "parallel"};

std::vector<double> resolve_weights(const SolverConfig& cfg, std::size_t unfoldings) {
  if (cfg.weights.empty()) return std::vector<double>(unfoldings, 1.0);
  return cfg.weights;
}


// x <- x + a * y
void axpy(DenseTensor& x, double a, const DenseTensor& y) {
  auto xs = x.data();
  const auto ys = y.data();
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] += a * ys[i];
}

// Runs body(0..count-1), concurrently when requested. Each body writes only
// its own slot, so the result does not depend on scheduling.
void for_each_unfolding(std::size_t count, bool parallel,
                        const std::function<void(std::size_t)>& body) {
  if (!parallel || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::future<void>> pending;
  pending.reserve(count - 1);
  for (std::size_t i = 1; i < count; ++i) pending.push_back(std::async(std::launch::async, body, i));
  body(0);
  for (auto& f : pending) f.get();
}

// X = fold(D_tau(unfold_<shift>(input))).
DenseTensor threshold_unfolding(const DenseTensor& input, std::size_t shift, double tau) {
  return balanced_fold(svt(balanced_unfold(input, shift), tau).value, shift, input.dims());
}

// Relative change of L, reported as +inf while the constraint residual still
// exceeds tol relative to the data. A stationary L alone is not convergence:
// before the l1 term engages, every X-update is a plain SVT, and whenever the
// retained rank holds, the dual update cancels the shrinking threshold
// exactly, so L can repeat bit for bit while the constraints are far from met.
class ChangeMonitor {
 public:
  ChangeMonitor(const DenseTensor& data, double tol) : residual_bound_(tol * frobenius(data)) {}

  double operator()(const DenseTensor& current, const DenseTensor& previous,
                    double residual) const {
    if (residual > residual_bound_) return std::numeric_limits<double>::infinity();
    return relative_change(current, previous);
  }

 private:
  double residual_bound_;
};

void require_finite_iterates(std::size_t iteration, std::initializer_list<const DenseTensor*> xs) {
  for (const DenseTensor* x : xs) {
    if (!all_finite(x->data())) {
      throw DivergenceError("ADMM iterate became non-finite at iteration " + std::to_string(iteration),
                            iteration);
    }
  }
}

void check_solver_input(const DenseTensor& t, const SolverConfig& cfg) {
  if (t.order() < 2) throw DomainError("solver input must have order >= 2");
  cfg.validate(t.order());
}

}  // namespace

void SolverConfig::validate(std::size_t order) const {
  if (lambda && !(*lambda > 0.0)) throw DomainError("lambda must be positive");
  if (!weights.empty()) {
    if (weights.size() != balanced_split(order)) {
      throw DomainError("need one weight per balanced unfolding (" +
                        std::to_string(balanced_split(order)) + ")");
    }
    for (double w : weights) {
      if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("weights must be positive");
    }
  }
  if (!(mu0 > 0.0) || !std::isfinite(mu0)) throw DomainError("mu0 must be positive");
  if (!(beta >= 1.0) || !std::isfinite(beta)) throw DomainError("beta must be >= 1");
  if (!(mu_max >= mu0)) throw DomainError("mu_max must be >= mu0");
  if (!(tol > 0.0)) throw DomainError("tol must be positive");
  if (max_iters == 0) throw DomainError("max_iters must be positive");
}

SolverConfig solver_config_from(const KeyValueDocument& doc) {
  SolverConfig cfg;
  if (auto v = doc.get("lambda"); v && *v != "auto") cfg.lambda = parse_real("lambda", *v);
  if (auto v = doc.get("weights")) cfg.weights = parse_real_list("weights", *v);
  if (auto v = doc.get("beta")) cfg.beta = parse_real("beta", *v);
  if (auto v = doc.get("mu0")) cfg.mu0 = parse_real("mu0", *v);
  if (auto v = doc.get("mu_max")) cfg.mu_max = parse_real("mu_max", *v);
  if (auto v = doc.get("tol")) cfg.tol = parse_real("tol", *v);
  if (auto v = doc.get("max_iters")) cfg.max_iters = parse_unsigned("max_iters", *v);
  if (auto v = doc.get("parallel")) cfg.parallel_unfoldings = parse_bool("parallel", *v);
  return cfg;
}

SolverConfig parse_solver_config(std::string_view text) {
  const auto doc = KeyValueDocument::parse(text);
  for (const auto& [key, value] : doc.entries()) {
    if (std::find(std::begin(kSolverKeys), std::end(kSolverKeys), key) == std::end(kSolverKeys)) {
      throw FormatError("unknown solver key '" + key + "'");
    }
  }
  return solver_config_from(doc);
}

std::string format_solver_config(const SolverConfig& cfg) {
  std::string out;
  out += "lambda = " + (cfg.lambda ? format_real(*cfg.lambda) : std::string("auto")) + "\n";
  if (!cfg.weights.empty()) {
    out += "weights = ";
    for (std::size_t i = 0; i < cfg.weights.size(); ++i) {
      out += (i ? "," : "") + format_real(cfg.weights[i]);
    }
    out += "\n";
  }
  out += "beta = " + format_real(cfg.beta) + "\n";
  out += "mu0 = " + format_real(cfg.mu0) + "\n";
  out += "mu_max = " + format_real(cfg.mu_max) + "\n";
  out += "tol = " + format_real(cfg.tol) + "\n";
  out += "max_iters = " + std::to_string(cfg.max_iters) + "\n";
  out += std::string("parallel = ") + (cfg.parallel_unfoldings ? "true" : "false") + "\n";
  return out;
}

double default_lambda(const Dims& dims, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("sampling probability must lie in (0, 1]");
  if (dims.size() < 2) throw DomainError("default_lambda needs order >= 2");
  const auto [rows, cols] = shift_shape(dims, 1, balanced_split(dims.size()));
  return 1.0 / std::sqrt(p * static_cast<double>(std::max(rows, cols)));
}

double relative_change(const DenseTensor& current, const DenseTensor& previous) {
  const double base = frobenius(previous);
  const double diff = frobenius(current - previous);
  if (base == 0.0) return diff;
  return diff / base;
}

RecoveryResult trrpca(const DenseTensor& observed, const SolverConfig& cfg) {
  check_solver_input(observed, cfg);
  if (!all_finite(observed.data())) throw NumericalError("trrpca: non-finite input entry");

  const DenseTensor& t = observed;
  const Dims& dims = t.dims();
  const std::size_t m = balanced_split(t.order());
  const auto weights = resolve_weights(cfg, m);
  const double lambda = cfg.lambda ? *cfg.lambda : default_lambda(dims, 1.0);
  ChangeMonitor change(t, cfg.tol);

  DenseTensor s(dims);
  std::vector<DenseTensor> x(m, t);
  std::vector<DenseTensor> z(m, DenseTensor(dims));
  DenseTensor l = t;

  RecoveryResult result{t, s, 0, {}, {}, {}, false, lambda};
  double mu = cfg.mu0;
  for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
    result.mu_trace.push_back(mu);
    const double inv_mu = 1.0 / mu;

    for_each_unfolding(m, cfg.parallel_unfoldings, [&](std::size_t i) {
      DenseTensor input = t - s;
      axpy(input, -inv_mu, z[i]);
      x[i] = threshold_unfolding(input, i + 1, weights[i] * inv_mu);
    });

    DenseTensor avg(dims);
    for (std::size_t i = 0; i < m; ++i) {
      axpy(avg, 1.0, t - x[i]);
      axpy(avg, -inv_mu, z[i]);
    }
    // The l1 weight of the objective is sum_i lambda_i = m lambda, so the
    // averaged shrinkage threshold m lambda / (m mu) reduces to lambda / mu.
    s = soft_threshold((1.0 / static_cast<double>(m)) * avg, lambda * inv_mu);

    double feasibility = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const DenseTensor residual = x[i] + s - t;
      axpy(z[i], mu, residual);
      feasibility = std::max(feasibility, frobenius(residual));
    }

    DenseTensor next(dims);
    for (const auto& xi : x) axpy(next, 1.0 / static_cast<double>(m), xi);

    require_finite_iterates(k, {&next, &s});
    for (const auto& zi : z) require_finite_iterates(k, {&zi});

    const double rc = change(next, l, feasibility);
    l = std::move(next);
    result.rc_trace.push_back(rc);
    result.feasibility_trace.push_back(feasibility);
    result.iterations = k;
    mu = std::min(cfg.beta * mu, cfg.mu_max);
    if (rc <= cfg.tol) {
      result.converged = true;
      break;
    }
  }
  result.low_rank = std::move(l);
  result.sparse = std::move(s);
  return result;
}

RecoveryResult rtrc(const DenseTensor& observed, const SamplingMask& mask, const SolverConfig& cfg) {
  check_solver_input(observed, cfg);
  if (observed.dims() != mask.dims()) throw ShapeError("rtrc: mask dims differ from tensor dims");
  if (mask.observed_count() == 0) throw DomainError("rtrc: mask observes no entries");

  const DenseTensor t = apply_mask(mask, observed);
  if (!all_finite(t.data())) throw NumericalError("rtrc: non-finite observed entry");
  const Dims& dims = t.dims();
  const std::size_t m = balanced_split(t.order());
  const auto weights = resolve_weights(cfg, m);
  const double lambda = cfg.lambda ? *cfg.lambda : default_lambda(dims, mask.ratio());
  ChangeMonitor change(t, cfg.tol);

  // (ceil(d/2) I + P), the diagonal of the L-update system.
  DenseTensor denom = mask.indicator();
  for (double& v : denom.data()) v += static_cast<double>(m);

  DenseTensor l = t;
  DenseTensor s(dims);
  DenseTensor w(dims);
  std::vector<DenseTensor> x(m, l);
  std::vector<DenseTensor> z(m, DenseTensor(dims));

  RecoveryResult result{l, s, 0, {}, {}, {}, false, lambda};
  double mu = cfg.mu0;
  for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
    result.mu_trace.push_back(mu);
    const double inv_mu = 1.0 / mu;

    for_each_unfolding(m, cfg.parallel_unfoldings, [&](std::size_t i) {
      DenseTensor input = l;
      axpy(input, -inv_mu, z[i]);
      x[i] = threshold_unfolding(input, i + 1, weights[i] * inv_mu);
    });

    DenseTensor observed_part = t - s;
    axpy(observed_part, -inv_mu, w);
    DenseTensor numer = apply_mask(mask, observed_part);
    for (std::size_t i = 0; i < m; ++i) {
      axpy(numer, 1.0, x[i]);
      axpy(numer, inv_mu, z[i]);
    }
    const DenseTensor previous = l;
    l = safe_divide(numer, denom);

    DenseTensor shrink_input = t - l;
    axpy(shrink_input, -inv_mu, w);
    s = masked_soft_threshold(shrink_input, mask, static_cast<double>(m) * lambda * inv_mu);

    double consensus = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const DenseTensor gap = x[i] - l;
      axpy(z[i], mu, gap);
      consensus = std::max(consensus, frobenius(gap));
    }
    const DenseTensor residual = apply_mask(mask, l + s - t);
    axpy(w, mu, residual);
    const double feasibility = frobenius(residual);

    require_finite_iterates(k, {&l, &s, &w});
    for (const auto& zi : z) require_finite_iterates(k, {&zi});

    const double rc = change(l, previous, std::max(feasibility, consensus));
    result.rc_trace.push_back(rc);
    result.feasibility_trace.push_back(feasibility);
    result.iterations = k;
    mu = std::min(cfg.beta * mu, cfg.mu_max);
    if (rc <= cfg.tol) {
      result.converged = true;
      break;
    }
  }
  result.low_rank = std::move(l);
  result.sparse = std::move(s);
  return result;
}

}  // namespace trr
