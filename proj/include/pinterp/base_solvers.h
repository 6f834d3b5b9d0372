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

// Regularized-ERM localization with output perturbation, the epoch-based
// growth solver built on it, and the Lipschitzian-extension wrapper.
//
// Solvers read losses only through a GradientPolicy. The wrapper swaps raw
// gradients for extension gradients and changes nothing else, so a wrapped
// run on a clip-Lipschitz instance replays the unwrapped run bit for bit.

#ifndef PINTERP_BASE_SOLVERS_H_
#define PINTERP_BASE_SOLVERS_H_

#include <cstddef>
#include <functional>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pinterp/domain.h"
#include "pinterp/mechanisms.h"

namespace pinterp {

struct InnerSolveConfig {
  // Projected-gradient-norm stopping threshold; <= 0 selects sigma_i / 100.
  double tolerance = 0.0;
  int max_iters = 200000;
  bool exact_quadratic = true;
};

// Observes the norm of every gradient a solver consumes. For closed-form
// quadratic solves it receives the per-sample gradient bound on the feasible
// region instead, since no gradient is evaluated.
using GradientHook = std::function<void(double)>;

struct GradientPolicy {
  bool extension = false;
  double clip = 0.0;
  const GradientHook* hook = nullptr;
};

// Half-open range of absolute sample indices.
struct Slice {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
};

struct SolverResult {
  Point x;
  RunTrace trace;
  PrivacyBudget spent;
};

// Payload key of the last projected-gradient norm on convergence failures.
inline constexpr char kLastGradientNormPayload[] = "pinterp/last_gradient_norm";
double LastGradientNorm(const absl::Status& status);

// argmin over the region of
//   (1/n0) sum_{j in slice} F(x; s_j) + 1/(eta n0) ||x - center||^2.
absl::StatusOr<Point> solve_regularized_erm(const Instance& inst, Slice slice,
                                            const Point& center, double eta,
                                            const Region& domain,
                                            const InnerSolveConfig& cfg,
                                            const GradientPolicy& policy = {});

// k = ceil(ln n) phases on disjoint slices of n/k samples each.
absl::StatusOr<SolverResult> localization_erm(
    const Instance& inst, Slice slice, const Region& domain, const Point& x0,
    double eta, double clip, const PrivacyBudget& budget,
    const InnerSolveConfig& cfg, RngStream& rng,
    const GradientPolicy& policy = {});

// Whole dataset on the instance domain.
absl::StatusOr<SolverResult> localization_erm(const Instance& inst,
                                              const Point& x0, double eta,
                                              double clip,
                                              const PrivacyBudget& budget,
                                              const InnerSolveConfig& cfg,
                                              RngStream& rng);

// ceil(2 ln n / (kappa_floor - 1)), at least 1.
int DefaultGrowthEpochs(std::size_t n, double kappa_floor);

// eta_0 of the growth solver, before step_scale.
double GrowthStepSize(double r0, double clip, std::size_t n0, double beta,
                      int d, const PrivacyBudget& budget);

struct GrowthOptions {
  double step_scale = 1.0;
};

absl::StatusOr<SolverResult> epoch_growth_solver(
    const Instance& inst, Slice slice, const Region& domain, const Point& x0,
    double clip, int T, double beta, const PrivacyBudget& budget,
    const InnerSolveConfig& cfg, RngStream& rng,
    const GradientPolicy& policy = {}, const GrowthOptions& opts = {});

absl::StatusOr<SolverResult> epoch_growth_solver(
    const Instance& inst, const Point& x0, double clip, int T, double beta,
    const PrivacyBudget& budget, const InnerSolveConfig& cfg, RngStream& rng,
    const GrowthOptions& opts = {});

// 128 L r (sqrt(ln(1/beta)) ln^{3/2} n / sqrt(n) + d' ln(1/beta) ln n/(n eps))
// with d' = d under pure DP and sqrt(d ln(1/delta)) otherwise.
double LocalizationRiskBound(double L, double r, std::size_t n, double beta,
                             int d, const PrivacyBudget& budget);

// A solver with every argument bound except its gradient source.
using WrappableSolver =
    std::function<absl::StatusOr<SolverResult>(const GradientPolicy&)>;

// Runs inner on the Lipschitzian extensions at clip.
absl::StatusOr<SolverResult> lipschitz_wrap(const WrappableSolver& inner,
                                            double clip,
                                            const GradientHook* hook = nullptr);

}  // namespace pinterp

#endif  // PINTERP_BASE_SOLVERS_H_
