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

// Domain-and-Lipschitz localization for interpolation problems, its
// kappa-growth variant, the adaptive two-phase solver, and the schedule and
// sample-complexity calculators. ln is the natural logarithm throughout.

#ifndef PINTERP_INTERPOLATION_SOLVERS_H_
#define PINTERP_INTERPOLATION_SOLVERS_H_

#include <cstddef>

#include "absl/status/statusor.h"
#include "pinterp/base_solvers.h"
#include "pinterp/domain.h"
#include "pinterp/mechanisms.h"

namespace pinterp {

struct ShrinkFormulaParams {
  // Absolute constant already multiplied by the schedule's constant_scale.
  double constant = 256.0;
  int T = 1;
  int m = 1;
  double beta = 0.05;
  int d = 1;
  PrivacyBudget budget;
  double growth = 1.0;
  double kappa = 2.0;
};

// max{sqrt(ln(T/beta)) ln^{3/2} m / sqrt(m), d' ln(T/beta) ln m / (m eps)}
// with d' = d under pure DP and min(d, sqrt(d ln(1/delta))) otherwise.
double ShrinkRateTerm(const ShrinkFormulaParams& p);

// c (L_i / lambda) * ShrinkRateTerm. The caller caps the result at D_i.
double shrink_diameter(double L_i, const ShrinkFormulaParams& p);

// c_kappa ((L_i / lambda) * rate)^{1/(kappa-1)}, where the rate uses d under
// pure DP and sqrt(d ln(1/delta)) otherwise.
double kappa_shrink_diameter(double L_i, const ShrinkFormulaParams& p);

// 4 * 2^{12/kappa}.
double KappaConstant(double kappa);

// Where a localization run lives inside a larger dataset and domain.
struct LocalizationScope {
  Slice slice;
  Ball domain;
  Point x0;
  double lipschitz = 0.0;
};

struct InterpolationOptions {
  InnerSolveConfig inner;
  const GradientHook* hook = nullptr;
};

absl::StatusOr<SolverResult> interpolation_localization(
    const Instance& inst, const Point& x0, const Schedule& schedule,
    const PrivacyBudget& budget, const InterpolationOptions& opts,
    RngStream& rng);

absl::StatusOr<SolverResult> interpolation_localization(
    const Instance& inst, const LocalizationScope& scope,
    const Schedule& schedule, const PrivacyBudget& budget,
    const InterpolationOptions& opts, RngStream& rng);

absl::StatusOr<SolverResult> kappa_interpolation(
    const Instance& inst, const Point& x0, const Schedule& schedule,
    const PrivacyBudget& budget, const InterpolationOptions& opts,
    RngStream& rng);

// Radius-D_int/2 ball around the phase-one output and the value of D_int.
struct AdaptiveDomain {
  Ball ball;
  double d_int = 0.0;
};

// 128 c (L/lambda)(sqrt(ln(2/beta)) ln^{3/2} n / sqrt(n)
//                 + d' ln(2/beta) ln n / (n eps)), d' as in ShrinkRateTerm.
double AdaptiveDiameter(double L, double growth, std::size_t n, double beta,
                        int d, const PrivacyBudget& budget,
                        double constant_scale);

// Phase one: wrapped growth solver on the first half. Phase two: the
// localization solver on the second half inside ball(x_1, D_int/2).
// schedule.T and schedule.m size phase two.
absl::StatusOr<SolverResult> adaptive_solver(const Instance& inst,
                                             const Point& x0,
                                             const Schedule& schedule,
                                             const PrivacyBudget& budget,
                                             const InterpolationOptions& opts,
                                             RngStream& rng);

// Real-valued m before rounding up.
double ScheduleSamplesPerEpoch(std::size_t n, const LossConstants& c, int d,
                               const PrivacyBudget& budget, double mu,
                               double constant_scale);

// beta = n^{-mu}, m as above rounded up, T = floor(n/m).
absl::StatusOr<Schedule> default_schedule(std::size_t n,
                                          const LossConstants& c, int d,
                                          const PrivacyBudget& budget,
                                          double mu,
                                          double constant_scale = 1.0);

// Payload key holding the largest feasible constant_scale.
inline constexpr char kFeasibleScalePayload[] = "pinterp/feasible_scale";

// 1/alpha^rho + (d'/(rho eps)) ln(1/alpha), d' = d or sqrt(d ln(1/delta)),
// with a unit hidden constant.
double sample_complexity(double alpha, double rho, int d,
                         const PrivacyBudget& budget);

}  // namespace pinterp

#endif  // PINTERP_INTERPOLATION_SOLVERS_H_
