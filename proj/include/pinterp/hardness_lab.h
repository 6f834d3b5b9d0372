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

// Instance generators for interpolation problems and the lower-bound and
// superefficiency constructions, plus exact-algebra checks of minimizer
// stability, growth under sample removal, and minimizer pinching.

#ifndef PINTERP_HARDNESS_LAB_H_
#define PINTERP_HARDNESS_LAB_H_

#include <cstddef>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "pinterp/domain.h"
#include "pinterp/mechanisms.h"

namespace pinterp {

struct OracleReport {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  // Lower end of a two-sided check; NaN when one-sided.
  double lower = 0.0;
  bool pass = false;
  // bound - measured for upper checks, the smaller slack for two-sided ones.
  double margin = 0.0;
  // False when a search fell back to a greedy heuristic.
  bool exhaustive = true;
};

// Every anchor equals xstar. The domain has the given radius and a center
// drawn uniformly within radius/2 of xstar, so xstar is interior.
Instance make_noiseless_least_squares(int d, std::size_t n, const Point& xstar,
                                      double H, RngStream& rng,
                                      double radius = 0.5);

// Anchors xstar + N(0, noise_std^2 I). Excess risk is measured against the
// population mean xstar. The declared Lipschitz constant covers anchors
// within 3 noise_std sqrt(d) of xstar; the wrapper handles the rest.
Instance make_noisy_least_squares(int d, std::size_t n, const Point& xstar,
                                  double H, double noise_std, RngStream& rng,
                                  double radius = 0.5);

// Unit-norm features with labels y = sign <a, w>, kept only when
// |<a, w_dir>| >= 1/4, and witness w = 8 margin w_dir. Every sample then has
// y <a, w> >= 2 margin, so the witness and its margin/2 perturbations along
// any a_i have zero loss.
Instance make_margin_classification(int d, std::size_t n, double margin,
                                    RngStream& rng);

struct LowerBoundSpec {
  int d = 1;
  std::size_t n = 1;
  std::size_t k = 1;
  Point v;
  double H = 1.0;
};

// {0}^{n-k} followed by {v}^k under the indicator quadratic. Domain is the
// ball of radius ||v|| around the origin.
absl::StatusOr<Instance> make_lower_bound_instance(const LowerBoundSpec& spec);

struct PackingSpec {
  double diameter = 1.0;
  double separation = 0.25;
  int d = 1;
};

// Axis-aligned grid of the given spacing inside the ball of radius D/2.
absl::StatusOr<std::vector<Point>> make_packing(const PackingSpec& spec);

struct SuperefficiencyParams {
  double epsilon = 1.0;
  // Anchor location of the inserted samples; the domain is [-D, D].
  double D = 1.0;
  double t = 1.0;
  double c0 = 1.0;
  double c1 = 1.0;

  std::size_t removal() const;
};

// Drops the last r = ceil(1/eps) samples of a 1-D interpolating quadratic
// instance and appends r anchors at +D.
absl::StatusOr<Instance> superefficiency_construct(
    const Instance& base, const SuperefficiencyParams& params);

// Exact minimizer over the domain for the quadratic families.
absl::StatusOr<Point> QuadraticMinimizer(const Instance& inst);

// Largest minimizer shift reachable by replacing at most k samples with
// anchors at +-D (D = domain radius). measured is the certified lower bound
// on the modulus, bound the stability upper bound 4 k L / (lambda n).
absl::StatusOr<OracleReport> modulus_oracle(const Instance& base,
                                            std::size_t k);

// ||x*_S - x*_S'|| against 4 k L / (lambda n).
absl::StatusOr<OracleReport> stability_bound_check(
    const Instance& base, const Instance& swapped, std::size_t k,
    const LossConstants& constants);

// Smallest eigenvalue of (1/n) sum of per-sample Hessians after removing the
// r worst samples, against lambda - H r / n. Exhaustive for r <= 3.
absl::StatusOr<OracleReport> growth_closure_check(const Instance& base,
                                                  std::size_t r);
absl::StatusOr<OracleReport> growth_closure_check_eps(const Instance& base,
                                                      double eps);

// h(x) = curvature/2 (x - minimizer)^2 with declared growth and smoothness.
struct Quadratic1D {
  double curvature = 1.0;
  double minimizer = 0.0;
  double growth = 1.0;
  double smoothness = 1.0;
};

// Minimizer pinching for h + g and the gradient bounds
// (lambda/2) dist <= |q'| <= H dist at probe points, for q in {h, g}.
OracleReport pinch_check(const Quadratic1D& h, const Quadratic1D& g);

// max over samples of ||grad F(x*; s)|| <= tol.
OracleReport InterpolationCertificate(const Instance& inst, double tol = 1e-10);

std::string SerializeInstance(const Instance& inst);
absl::StatusOr<Instance> ParseInstance(const std::string& text);

}  // namespace pinterp

#endif  // PINTERP_HARDNESS_LAB_H_
