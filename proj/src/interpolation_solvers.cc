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

#include "pinterp/interpolation_solvers.h"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <functional>
#include <utility>

#include "absl/strings/cord.h"
#include "absl/strings/str_cat.h"

namespace pinterp {
namespace {

double RateTerm(int T, int m, double beta, double dim, double eps) {
  const double mm = static_cast<double>(m);
  const double log_tb = std::log(static_cast<double>(T) / beta);
  const double ln_m = std::log(mm);
  const double stat = std::sqrt(log_tb) * std::pow(ln_m, 1.5) / std::sqrt(mm);
  const double priv = dim * log_tb * ln_m / (mm * eps);
  return std::max(stat, priv);
}

// min(d, sqrt(d ln(1/delta))) under approximate DP.
double MinDimension(int d, const PrivacyBudget& b) {
  if (b.pure()) return static_cast<double>(d);
  return std::min(static_cast<double>(d),
                  std::sqrt(d * std::log(1.0 / b.delta)));
}

using ShrinkFn = std::function<double(double L_i)>;

absl::StatusOr<SolverResult> RunLocalization(const Instance& inst,
                                             const LocalizationScope& scope,
                                             const Schedule& schedule,
                                             const PrivacyBudget& budget,
                                             const InterpolationOptions& opts,
                                             RngStream& rng,
                                             const ShrinkFn& shrink) {
  if (!(inst.constants.growth > 0.0)) {
    return absl::InvalidArgumentError(
        "localization requires a positive growth constant");
  }
  if (absl::Status s = ValidateBudget(budget); !s.ok()) return s;
  if (absl::Status s = ValidateSchedule(schedule, scope.slice.size());
      !s.ok()) {
    return s;
  }
  if (scope.slice.end > inst.n() || scope.slice.begin > scope.slice.end) {
    return absl::InvalidArgumentError("slice out of range");
  }
  if (!(scope.lipschitz > 0.0)) {
    return absl::InvalidArgumentError("Lipschitz constant must be positive");
  }
  const int T = schedule.T;
  const int m = schedule.m;
  const int inner_epochs =
      std::min(m, schedule.inner_epochs > 0
                      ? schedule.inner_epochs
                      : DefaultGrowthEpochs(static_cast<std::size_t>(m),
                                            inst.constants.kappa_floor));
  const double H = inst.constants.smoothness;
  const double beta_epoch = schedule.beta / T;
  GrowthOptions growth;
  growth.step_scale = schedule.step_scale;

  SolverResult out;
  out.spent = budget;
  out.trace.leftover_samples =
      scope.slice.size() - static_cast<std::size_t>(T) * m;
  Ball ball = scope.domain;
  double D = ball.diameter();
  double L = scope.lipschitz;
  Point x = scope.x0;
  for (int i = 1; i <= T; ++i) {
    const Slice block{scope.slice.begin + static_cast<std::size_t>(i - 1) * m,
                      scope.slice.begin + static_cast<std::size_t>(i) * m};
    const Region region{{ball}};
    const Point start = x;
    WrappableSolver inner = [&](const GradientPolicy& policy) {
      return epoch_growth_solver(inst, block, region, start, L, inner_epochs,
                                 beta_epoch, budget, opts.inner, rng, policy,
                                 growth);
    };
    absl::StatusOr<SolverResult> res = lipschitz_wrap(inner, L, opts.hook);
    if (!res.ok()) return res.status();

    EpochRecord rec;
    rec.stage = Stage::kInterpolationEpoch;
    rec.index = i;
    rec.diameter = D;
    rec.lipschitz = L;
    rec.sample_begin = block.begin;
    rec.sample_end = block.end;
    rec.domain_center = ball.center;
    rec.domain_radius = ball.radius;
    for (const EpochRecord& r : res->trace.records) {
      if (r.stage == Stage::kLocalizationPhase) {
        rec.noise_scale = std::max(rec.noise_scale, r.noise_scale);
      }
    }
    out.trace.leftover_samples += res->trace.leftover_samples;
    for (EpochRecord& r : res->trace.records) {
      out.trace.records.push_back(std::move(r));
    }
    x = std::move(res->x);
    rec.iterate = x;
    out.trace.records.push_back(std::move(rec));

    const double next = std::min(shrink(L), D);
    if (!(next >= DBL_MIN) || !std::isfinite(next)) break;
    D = next;
    ball = Ball{x, D / 2.0};
    L = H * D;
  }
  // The output is a point of the input domain.
  out.x = ProjectOntoBallUnchecked(x, scope.domain);
  return out;
}

LocalizationScope WholeInstance(const Instance& inst, const Point& x0) {
  return LocalizationScope{Slice{0, inst.n()}, inst.domain, x0,
                           inst.constants.lipschitz};
}

ShrinkFormulaParams ParamsFor(const Instance& inst, const Schedule& s,
                              const PrivacyBudget& budget, double constant) {
  ShrinkFormulaParams p;
  p.constant = constant * s.constant_scale;
  p.T = s.T;
  p.m = s.m;
  p.beta = s.beta;
  p.d = inst.dim();
  p.budget = budget;
  p.growth = inst.constants.growth;
  p.kappa = inst.constants.kappa;
  return p;
}

}  // namespace

double ShrinkRateTerm(const ShrinkFormulaParams& p) {
  return RateTerm(p.T, p.m, p.beta, MinDimension(p.d, p.budget),
                  p.budget.epsilon);
}

double shrink_diameter(double L_i, const ShrinkFormulaParams& p) {
  return p.constant * (L_i / p.growth) * ShrinkRateTerm(p);
}

double KappaConstant(double kappa) { return 4.0 * std::exp2(12.0 / kappa); }

double kappa_shrink_diameter(double L_i, const ShrinkFormulaParams& p) {
  const double dim = p.budget.pure()
                         ? static_cast<double>(p.d)
                         : std::sqrt(p.d * std::log(1.0 / p.budget.delta));
  const double rate = RateTerm(p.T, p.m, p.beta, dim, p.budget.epsilon);
  return p.constant * std::pow(L_i / p.growth * rate, 1.0 / (p.kappa - 1.0));
}

absl::StatusOr<SolverResult> interpolation_localization(
    const Instance& inst, const LocalizationScope& scope,
    const Schedule& schedule, const PrivacyBudget& budget,
    const InterpolationOptions& opts, RngStream& rng) {
  const ShrinkFormulaParams p = ParamsFor(inst, schedule, budget, 256.0);
  return RunLocalization(inst, scope, schedule, budget, opts, rng,
                         [&](double L) { return shrink_diameter(L, p); });
}

absl::StatusOr<SolverResult> interpolation_localization(
    const Instance& inst, const Point& x0, const Schedule& schedule,
    const PrivacyBudget& budget, const InterpolationOptions& opts,
    RngStream& rng) {
  return interpolation_localization(inst, WholeInstance(inst, x0), schedule,
                                    budget, opts, rng);
}

absl::StatusOr<SolverResult> kappa_interpolation(
    const Instance& inst, const Point& x0, const Schedule& schedule,
    const PrivacyBudget& budget, const InterpolationOptions& opts,
    RngStream& rng) {
  if (!(inst.constants.kappa > 2.0)) {
    return absl::InvalidArgumentError(
        "kappa <= 2: use interpolation_localization instead");
  }
  const ShrinkFormulaParams p =
      ParamsFor(inst, schedule, budget, KappaConstant(inst.constants.kappa));
  return RunLocalization(inst, WholeInstance(inst, x0), schedule, budget, opts,
                         rng,
                         [&](double L) { return kappa_shrink_diameter(L, p); });
}

double AdaptiveDiameter(double L, double growth, std::size_t n, double beta,
                        int d, const PrivacyBudget& budget,
                        double constant_scale) {
  const double nn = static_cast<double>(n);
  const double ln_n = std::log(nn);
  const double log_2b = std::log(2.0 / beta);
  return 128.0 * constant_scale * (L / growth) *
         (std::sqrt(log_2b) * std::pow(ln_n, 1.5) / std::sqrt(nn) +
          MinDimension(d, budget) * log_2b * ln_n / (nn * budget.epsilon));
}

absl::StatusOr<SolverResult> adaptive_solver(const Instance& inst,
                                             const Point& x0,
                                             const Schedule& schedule,
                                             const PrivacyBudget& budget,
                                             const InterpolationOptions& opts,
                                             RngStream& rng) {
  const std::size_t n = inst.n();
  if (n < 2) {
    return absl::FailedPreconditionError("insufficient data: need n >= 2");
  }
  if (!(inst.constants.growth > 0.0)) {
    return absl::InvalidArgumentError(
        "adaptive solver requires a positive growth constant");
  }
  if (absl::Status s = ValidateBudget(budget); !s.ok()) return s;
  const std::size_t half = n / 2;
  const Slice first{0, half};
  const Slice second{half, n};
  const double L = inst.constants.lipschitz;
  const int T1 = DefaultGrowthEpochs(half, inst.constants.kappa_floor);
  if (half < static_cast<std::size_t>(T1)) {
    return absl::FailedPreconditionError("insufficient data for phase one");
  }
  GrowthOptions growth;
  growth.step_scale = schedule.step_scale;
  const Region domain{{inst.domain}};
  WrappableSolver phase_one = [&](const GradientPolicy& policy) {
    return epoch_growth_solver(inst, first, domain, x0, L, T1,
                               schedule.beta / 2.0, budget, opts.inner, rng,
                               policy, growth);
  };
  absl::StatusOr<SolverResult> one = lipschitz_wrap(phase_one, L, opts.hook);
  if (!one.ok()) return one.status();

  const double d_int = AdaptiveDiameter(L, inst.constants.growth, n,
                                        schedule.beta, inst.dim(), budget,
                                        schedule.constant_scale);
  Schedule two_schedule = schedule;
  two_schedule.beta = schedule.beta / 2.0;
  const LocalizationScope scope{second, Ball{one->x, d_int / 2.0}, one->x, L};
  absl::StatusOr<SolverResult> two = interpolation_localization(
      inst, scope, two_schedule, budget, opts, rng);
  if (!two.ok()) return two.status();

  SolverResult out;
  out.spent = budget;
  out.trace.leftover_samples =
      one->trace.leftover_samples + two->trace.leftover_samples;
  for (EpochRecord& r : one->trace.records) {
    out.trace.records.push_back(std::move(r));
  }
  EpochRecord p1;
  p1.stage = Stage::kAdaptivePhase;
  p1.index = 1;
  p1.diameter = inst.domain.diameter();
  p1.lipschitz = L;
  p1.iterate = one->x;
  p1.sample_begin = first.begin;
  p1.sample_end = first.end;
  p1.domain_center = inst.domain.center;
  p1.domain_radius = inst.domain.radius;
  out.trace.records.push_back(std::move(p1));
  for (EpochRecord& r : two->trace.records) {
    out.trace.records.push_back(std::move(r));
  }
  EpochRecord p2;
  p2.stage = Stage::kAdaptivePhase;
  p2.index = 2;
  p2.diameter = d_int;
  p2.lipschitz = L;
  p2.iterate = two->x;
  p2.sample_begin = second.begin;
  p2.sample_end = second.end;
  p2.domain_center = scope.domain.center;
  p2.domain_radius = scope.domain.radius;
  out.trace.records.push_back(std::move(p2));
  out.x = std::move(two->x);
  return out;
}

double ScheduleSamplesPerEpoch(std::size_t n, const LossConstants& c, int d,
                               const PrivacyBudget& budget, double mu,
                               double constant_scale) {
  const double nn = static_cast<double>(n);
  const double ln_n = std::log(nn);
  const double beta = std::pow(nn, -mu);
  const double H = c.smoothness;
  const double lam = c.growth;
  const double dim = budget.pure()
                         ? static_cast<double>(d)
                         : std::sqrt(static_cast<double>(d)) *
                               std::log(1.0 / budget.delta);
  return 256.0 * ln_n * ln_n * (H * std::log(1.0 / beta) / lam) *
         std::max(256.0 * H / lam, dim / (budget.epsilon * std::sqrt(ln_n))) *
         constant_scale;
}

absl::StatusOr<Schedule> default_schedule(std::size_t n,
                                          const LossConstants& c, int d,
                                          const PrivacyBudget& budget,
                                          double mu, double constant_scale) {
  if (n < 2) return absl::InvalidArgumentError("need n >= 2");
  if (!(c.growth > 0.0)) {
    return absl::InvalidArgumentError("schedule requires positive growth");
  }
  if (!(mu > 0.0) || !(constant_scale > 0.0)) {
    return absl::InvalidArgumentError("mu and constant_scale must be positive");
  }
  if (absl::Status s = ValidateBudget(budget); !s.ok()) return s;
  const double m_real =
      ScheduleSamplesPerEpoch(n, c, d, budget, mu, constant_scale);
  const double m_up = std::ceil(m_real);
  if (m_up > static_cast<double>(n)) {
    const double feasible = constant_scale * static_cast<double>(n) / m_real;
    absl::Status s = absl::FailedPreconditionError(absl::StrCat(
        "schedule infeasible: m = ", m_up, " exceeds n = ", n,
        "; use constant_scale <= ", feasible));
    s.SetPayload(kFeasibleScalePayload, absl::Cord(absl::StrCat(feasible)));
    return s;
  }
  Schedule out;
  out.m = std::max(1, static_cast<int>(m_up));
  out.T = static_cast<int>(n / static_cast<std::size_t>(out.m));
  out.beta = std::pow(static_cast<double>(n), -mu);
  out.mu = mu;
  out.constant_scale = constant_scale;
  return out;
}

double sample_complexity(double alpha, double rho, int d,
                         const PrivacyBudget& budget) {
  const double dim = budget.pure()
                         ? static_cast<double>(d)
                         : std::sqrt(d * std::log(1.0 / budget.delta));
  return std::pow(1.0 / alpha, rho) +
         dim / (rho * budget.epsilon) * std::log(1.0 / alpha);
}

}  // namespace pinterp
