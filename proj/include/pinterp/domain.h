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

// Geometric and problem types shared by every solver, exact projection onto
// balls and ball intersections, and closed-form excess risk.

#ifndef PINTERP_DOMAIN_H_
#define PINTERP_DOMAIN_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace pinterp {

using Point = Eigen::VectorXd;

// Euclidean ball. radius >= 0.
struct Ball {
  Point center;
  double radius = 0.0;

  double diameter() const { return 2.0 * radius; }
  int dim() const { return static_cast<int>(center.size()); }
};

absl::StatusOr<Ball> MakeBall(Point center, double radius);

// Intersection of finitely many balls of a common dimension. Nonempty by
// construction in every solver: each ball added is centered inside the
// previous ones.
struct Region {
  std::vector<Ball> balls;

  int dim() const { return balls.empty() ? 0 : balls.front().dim(); }
  bool Contains(const Point& x, double slack = 0.0) const;
  // Radius of the smallest member ball; every point of the region lies in it.
  const Ball& Tightest() const;
};

enum class LossFamilyId {
  kQuadraticAnchor,
  kIndicatorQuadratic,
  kSmoothedHingeMargin,
};

std::string FamilyName(LossFamilyId family);
absl::StatusOr<LossFamilyId> ParseFamily(const std::string& name);

// Anchor s for the quadratic families; feature a with label y = +-1 for the
// hinge family.
struct SamplePayload {
  Point point;
  double label = 0.0;
};

struct Dataset {
  std::vector<SamplePayload> samples;

  std::size_t size() const { return samples.size(); }
  int dim() const {
    return samples.empty() ? 0 : static_cast<int>(samples[0].point.size());
  }
};

// Per-family loss parameters. margin and smoothing are read only by the
// hinge family; smoothing <= 0 selects the default margin / 2.
struct LossSpec {
  LossFamilyId family = LossFamilyId::kQuadraticAnchor;
  double smoothness = 1.0;
  double margin = 0.0;
  double smoothing = 0.0;

  double tau() const { return smoothing > 0.0 ? smoothing : margin / 2.0; }
};

struct LossConstants {
  double lipschitz = 1.0;
  double smoothness = 1.0;
  double growth = 0.0;
  double kappa = 2.0;
  double kappa_floor = 2.0;
};

absl::Status ValidateConstants(const LossConstants& c);

// delta == 0 selects pure-DP branches.
struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 0.0;

  bool pure() const { return delta == 0.0; }
};

absl::Status ValidateBudget(const PrivacyBudget& b);

// Minimizer set of a synthetic instance: a single point, or the hyperplane
// {x : <normal, x> = offset}.
struct OptimumSet {
  enum class Kind { kPoint, kAffine };
  Kind kind = Kind::kPoint;
  Point point;
  Point normal;
  double offset = 0.0;

  static OptimumSet AtPoint(Point p);
  static OptimumSet Hyperplane(Point normal, double offset);
  double Distance(const Point& x) const;
  // Closest member of the set to x.
  Point Nearest(const Point& x) const;
};

struct Instance {
  LossSpec loss;
  Dataset dataset;
  Ball domain;
  LossConstants constants;
  std::optional<OptimumSet> optimum;
  // Mean of an isotropic anchor distribution. When set, excess risk of the
  // quadratic-anchor family is measured against the population rather than
  // the empirical average.
  std::optional<Point> population_mean;
  bool interpolating = false;

  int dim() const { return domain.dim(); }
  std::size_t n() const { return dataset.size(); }
};

absl::Status ValidateInstance(const Instance& inst);

struct Schedule {
  int T = 1;
  int m = 1;
  double beta = 0.05;
  double mu = 1.0;
  double constant_scale = 1.0;
  // Multiplier on the localization step size eta_0. 1 is the literal value.
  double step_scale = 1.0;
  // Epoch count of the inner growth solver; 0 selects ceil(2 ln m/(kbar-1)).
  int inner_epochs = 0;
};

absl::Status ValidateSchedule(const Schedule& s, std::size_t n);

enum class Stage {
  kLocalizationPhase,
  kGrowthEpoch,
  kInterpolationEpoch,
  kAdaptivePhase,
};

std::string StageName(Stage stage);

// One loop iteration of some solver. Sample ranges are absolute indices into
// the top-level dataset, half-open.
struct EpochRecord {
  Stage stage = Stage::kLocalizationPhase;
  int index = 0;
  double diameter = 0.0;
  double lipschitz = 0.0;
  double eta = 0.0;
  Point iterate;
  double noise_scale = 0.0;
  std::size_t sample_begin = 0;
  std::size_t sample_end = 0;
  // Center and radius of the domain the epoch was run on.
  Point domain_center;
  double domain_radius = 0.0;
};

struct RunTrace {
  std::vector<EpochRecord> records;
  std::size_t leftover_samples = 0;

  std::vector<const EpochRecord*> OfStage(Stage stage) const;
};

absl::StatusOr<Point> project_onto_ball(const Point& x, const Ball& b);
// Unchecked variant for inner loops; dimensions must match.
Point ProjectOntoBallUnchecked(const Point& x, const Ball& b);

// Euclidean projection onto an intersection of balls. Exact for one or two
// active balls; alternating projections with correction otherwise.
Point ProjectOntoRegion(const Point& x, const Region& r);

absl::StatusOr<double> excess_risk(const Instance& inst, const Point& x);

// Empirical risk (1/n) sum F(x; s_j).
double EmpiricalRisk(const Instance& inst, const Point& x);

}  // namespace pinterp

#endif  // PINTERP_DOMAIN_H_
