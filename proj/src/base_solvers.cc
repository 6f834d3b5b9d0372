// Copyright 2026 The pinterp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pinterp/base_solvers.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "absl/strings/cord.h"
#include "absl/strings/str_cat.h"
#include "pinterp/losses.h"

namespace pinterp {
namespace {

bool QuadraticSample(const LossSpec& spec, const SamplePayload& s) {
  if (spec.family == LossFamilyId::kQuadraticAnchor) return true;
  return spec.family == LossFamilyId::kIndicatorQuadratic && !IsZeroPayload(s);
}

// Smallest per-sample gradient bound over the member balls of the region.
double RegionSampleBound(const LossSpec& spec, const SamplePayload& s,
                         const Region& region) {
  double best = std::numeric_limits<double>::infinity();
  for (const Ball& b : region.balls) {
    best = std::min(best, SampleLipschitzOnBall(spec, s, b));
  }
  return best;
}

Point SampleGradient(const LossSpec& spec, const Point& x,
                     const SamplePayload& s, const GradientPolicy& policy) {
  Point g = policy.extension ? ExtensionGradient(spec, x, s, policy.clip)
                             : loss_gradient(spec, x, s);
  if (policy.hook != nullptr && *policy.hook) (*policy.hook)(g.norm());
  return g;
}

absl::Status ConvergenceError(int iters, double grad_norm) {
  absl::Status s = absl::ResourceExhaustedError(
      absl::StrCat("regularized ERM did not converge in ", iters,
                   " iterations; last projected-gradient norm ", grad_norm));
  s.SetPayload(kLastGradientNormPayload,
               absl::Cord(absl::StrCat(grad_norm)));
  return s;
}

absl::Status CheckSlice(const Instance& inst, Slice slice) {
  if (slice.begin > slice.end || slice.end > inst.dataset.size()) {
    return absl::InvalidArgumentError("slice out of range");
  }
  return absl::OkStatus();
}

Region InstanceRegion(const Instance& inst) { return Region{{inst.domain}}; }

}  // namespace

double LastGradientNorm(const absl::Status& status) {
  auto p = status.GetPayload(kLastGradientNormPayload);
  if (!p.has_value()) return std::numeric_limits<double>::quiet_NaN();
  return std::stod(std::string(*p));
}

absl::StatusOr<Point> solve_regularized_erm(const Instance& inst, Slice slice,
                                            const Point& center, double eta,
                                            const Region& domain,
                                            const InnerSolveConfig& cfg,
                                            const GradientPolicy& policy) {
  if (!(eta > 0.0)) return absl::InvalidArgumentError("eta must be positive");
  if (absl::Status s = CheckSlice(inst, slice); !s.ok()) return s;
  if (slice.size() == 0) return absl::InvalidArgumentError("empty slice");
  if (center.size() != inst.dim() || domain.dim() != inst.dim()) {
    return absl::InvalidArgumentError("dimension mismatch");
  }
  const LossSpec& spec = inst.loss;
  const auto& samples = inst.dataset.samples;
  const double n0 = static_cast<double>(slice.size());
  const double reg = 2.0 / (eta * n0);

  bool closed_form = cfg.exact_quadratic;
  for (std::size_t j = slice.begin; closed_form && j < slice.end; ++j) {
    const SamplePayload& s = samples[j];
    if (spec.family == LossFamilyId::kSmoothedHingeMargin) closed_form = false;
    if (closed_form && policy.extension && QuadraticSample(spec, s) &&
        RegionSampleBound(spec, s, domain) > policy.clip) {
      closed_form = false;
    }
  }
  if (closed_form) {
    // Isotropic Hessian: the constrained minimizer is the projection of the
    // unconstrained one.
    const double H = spec.smoothness;
    Point acc = (2.0 / eta) * center;
    double weight = 2.0 / eta;
    for (std::size_t j = slice.begin; j < slice.end; ++j) {
      const SamplePayload& s = samples[j];
      if (!QuadraticSample(spec, s)) continue;
      acc += H * s.point;
      weight += H;
      if (policy.hook != nullptr && *policy.hook) {
        (*policy.hook)(RegionSampleBound(spec, s, domain));
      }
    }
    return ProjectOntoRegion(acc / weight, domain);
  }

  const double tol = cfg.tolerance > 0.0 ? cfg.tolerance : 1e-10;
  const double step = 1.0 / (inst.constants.smoothness + reg);
  Point x = ProjectOntoRegion(center, domain);
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.max_iters; ++it) {
    Point grad = reg * (x - center);
    // Sum of term magnitudes; the rounding error of grad is a few ulps of it.
    double grad_scale = grad.norm();
    for (std::size_t j = slice.begin; j < slice.end; ++j) {
      const Point g = SampleGradient(spec, x, samples[j], policy) / n0;
      grad_scale += g.norm();
      grad += g;
    }
    Point next = ProjectOntoRegion(x - step * grad, domain);
    const double moved = (x - next).norm();
    last = moved / step;
    // Second test: the step fell below the rounding resolution of the
    // iterate, so tighter tolerances are unreachable.
    const double ulp = std::numeric_limits<double>::epsilon();
    const bool stalled =
        moved <= 4.0 * ulp * std::max(next.norm(), domain.Tightest().radius) ||
        last <= 64.0 * ulp * grad_scale;
    x = std::move(next);
    if (last <= tol || stalled) return x;
  }
  return ConvergenceError(cfg.max_iters, last);
}

absl::StatusOr<SolverResult> localization_erm(
    const Instance& inst, Slice slice, const Region& domain, const Point& x0,
    double eta, double clip, const PrivacyBudget& budget,
    const InnerSolveConfig& cfg, RngStream& rng, const GradientPolicy& policy) {
  if (absl::Status s = ValidateBudget(budget); !s.ok()) return s;
  if (absl::Status s = CheckSlice(inst, slice); !s.ok()) return s;
  if (!(eta > 0.0) || !(clip > 0.0)) {
    return absl::InvalidArgumentError("eta and clip must be positive");
  }
  const std::size_t n = slice.size();
  const int k = n == 0 ? 1
                       : std::max(1, static_cast<int>(std::ceil(
                                         std::log(static_cast<double>(n)))));
  if (n < static_cast<std::size_t>(k) || n == 0) {
    return absl::FailedPreconditionError(absl::StrCat(
        "insufficient data: ", n, " samples for ", k, " phases"));
  }
  const std::size_t n0 = n / static_cast<std::size_t>(k);
  const int d = inst.dim();

  SolverResult out;
  out.spent = budget;
  out.trace.leftover_samples = n - n0 * static_cast<std::size_t>(k);
  Point x = x0;
  for (int i = 1; i <= k; ++i) {
    const double eta_i = std::ldexp(eta, -4 * i);
    const Slice part{slice.begin + (i - 1) * n0, slice.begin + i * n0};
    Region sub = domain;
    sub.balls.push_back(
        Ball{x, 2.0 * clip * eta_i * static_cast<double>(n0)});

    double sigma;
    if (budget.pure()) {
      sigma = pure_noise_scale(clip, eta_i, d, budget.epsilon);
    } else {
      absl::StatusOr<double> s =
          approx_noise_scale(clip, eta_i, budget.delta, budget.epsilon);
      if (!s.ok()) return s.status();
      sigma = *s;
    }
    InnerSolveConfig inner = cfg;
    if (!(inner.tolerance > 0.0)) inner.tolerance = sigma / 100.0;
    absl::StatusOr<Point> xhat =
        solve_regularized_erm(inst, part, x, eta_i, sub, inner, policy);
    if (!xhat.ok()) return xhat.status();
    absl::StatusOr<Point> noise = budget.pure()
                                      ? laplace_vector(d, sigma, rng)
                                      : gaussian_vector(d, sigma, rng);
    if (!noise.ok()) return noise.status();

    EpochRecord rec;
    rec.stage = Stage::kLocalizationPhase;
    rec.index = i;
    rec.diameter = sub.Tightest().diameter();
    rec.lipschitz = clip;
    rec.eta = eta_i;
    rec.noise_scale = sigma;
    rec.sample_begin = part.begin;
    rec.sample_end = part.end;
    rec.domain_center = sub.balls.back().center;
    rec.domain_radius = sub.balls.back().radius;
    x = *xhat + *noise;
    rec.iterate = x;
    out.trace.records.push_back(std::move(rec));
  }
  out.x = std::move(x);
  return out;
}

absl::StatusOr<SolverResult> localization_erm(const Instance& inst,
                                              const Point& x0, double eta,
                                              double clip,
                                              const PrivacyBudget& budget,
                                              const InnerSolveConfig& cfg,
                                              RngStream& rng) {
  return localization_erm(inst, Slice{0, inst.n()}, InstanceRegion(inst), x0,
                          eta, clip, budget, cfg, rng);
}

int DefaultGrowthEpochs(std::size_t n, double kappa_floor) {
  const double t =
      std::ceil(2.0 * std::log(static_cast<double>(n)) / (kappa_floor - 1.0));
  return std::max(1, static_cast<int>(t));
}

double GrowthStepSize(double r0, double clip, std::size_t n0, double beta,
                      int d, const PrivacyBudget& budget) {
  const double n = static_cast<double>(n0);
  const double log_beta = std::log(1.0 / beta);
  const double stat = 1.0 / std::sqrt(n * std::log(n) * log_beta);
  const double dim = budget.pure()
                         ? static_cast<double>(d)
                         : std::sqrt(d * std::log(1.0 / budget.delta));
  const double priv = budget.epsilon / (dim * log_beta);
  return r0 / (2.0 * clip) * std::min(stat, priv);
}

absl::StatusOr<SolverResult> epoch_growth_solver(
    const Instance& inst, Slice slice, const Region& domain, const Point& x0,
    double clip, int T, double beta, const PrivacyBudget& budget,
    const InnerSolveConfig& cfg, RngStream& rng, const GradientPolicy& policy,
    const GrowthOptions& opts) {
  if (absl::Status s = ValidateBudget(budget); !s.ok()) return s;
  if (absl::Status s = CheckSlice(inst, slice); !s.ok()) return s;
  if (T < 1) return absl::InvalidArgumentError("T must be >= 1");
  if (!(beta > 0.0 && beta < 1.0)) {
    return absl::InvalidArgumentError("beta must lie in (0, 1)");
  }
  if (!(clip > 0.0)) return absl::InvalidArgumentError("clip must be positive");
  const std::size_t n = slice.size();
  if (n < static_cast<std::size_t>(T)) {
    return absl::FailedPreconditionError(
        absl::StrCat("insufficient data: ", n, " samples for ", T, " epochs"));
  }
  const std::size_t n0 = n / static_cast<std::size_t>(T);
  const double r0 = domain.Tightest().diameter();
  const double eta0 =
      opts.step_scale *
      GrowthStepSize(r0, clip, n0, beta, inst.dim(), budget);

  SolverResult out;
  out.spent = budget;
  out.trace.leftover_samples = n - n0 * static_cast<std::size_t>(T);
  Point x = x0;
  for (int i = 0; i < T; ++i) {
    const double r_i = std::ldexp(r0, -i);
    const double eta_i = std::ldexp(eta0, -i);
    const Slice block{slice.begin + i * n0, slice.begin + (i + 1) * n0};
    Region sub = domain;
    sub.balls.push_back(Ball{x, r_i});
    absl::StatusOr<SolverResult> inner = localization_erm(
        inst, block, sub, x, eta_i, clip, budget, cfg, rng, policy);
    if (!inner.ok()) return inner.status();

    EpochRecord rec;
    rec.stage = Stage::kGrowthEpoch;
    rec.index = i;
    rec.diameter = 2.0 * r_i;
    rec.lipschitz = clip;
    rec.eta = eta_i;
    rec.noise_scale = inner->trace.records.empty()
                          ? 0.0
                          : inner->trace.records.front().noise_scale;
    rec.sample_begin = block.begin;
    rec.sample_end = block.end;
    rec.domain_center = x;
    rec.domain_radius = r_i;
    out.trace.leftover_samples += inner->trace.leftover_samples;
    for (EpochRecord& r : inner->trace.records) {
      out.trace.records.push_back(std::move(r));
    }
    x = std::move(inner->x);
    rec.iterate = x;
    out.trace.records.push_back(std::move(rec));
  }
  out.x = std::move(x);
  return out;
}

absl::StatusOr<SolverResult> epoch_growth_solver(
    const Instance& inst, const Point& x0, double clip, int T, double beta,
    const PrivacyBudget& budget, const InnerSolveConfig& cfg, RngStream& rng,
    const GrowthOptions& opts) {
  return epoch_growth_solver(inst, Slice{0, inst.n()}, InstanceRegion(inst),
                             x0, clip, T, beta, budget, cfg, rng,
                             GradientPolicy{}, opts);
}

double LocalizationRiskBound(double L, double r, std::size_t n, double beta,
                             int d, const PrivacyBudget& budget) {
  const double nn = static_cast<double>(n);
  const double ln_n = std::log(nn);
  const double log_beta = std::log(1.0 / beta);
  const double dim = budget.pure()
                         ? static_cast<double>(d)
                         : std::sqrt(d * std::log(1.0 / budget.delta));
  return 128.0 * L * r *
         (std::sqrt(log_beta) * std::pow(ln_n, 1.5) / std::sqrt(nn) +
          dim * log_beta * ln_n / (nn * budget.epsilon));
}

absl::StatusOr<SolverResult> lipschitz_wrap(const WrappableSolver& inner,
                                            double clip,
                                            const GradientHook* hook) {
  if (!(clip > 0.0)) return absl::InvalidArgumentError("clip must be positive");
  GradientPolicy policy;
  policy.extension = true;
  policy.clip = clip;
  policy.hook = hook;
  return inner(policy);
}

}  // namespace pinterp
