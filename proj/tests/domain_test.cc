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

#include "pinterp/domain.h"

#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"
#include "pinterp/hardness_lab.h"
#include "pinterp/mechanisms.h"

namespace pinterp {
namespace {

Point P(std::initializer_list<double> v) {
  Point p(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

TEST(ProjectOntoBall, RadialProjection) {
  absl::StatusOr<Point> p = project_onto_ball(P({3, 0}), Ball{P({0, 0}), 1});
  ASSERT_TRUE(p.ok());
  EXPECT_DOUBLE_EQ((*p)[0], 1.0);
  EXPECT_DOUBLE_EQ((*p)[1], 0.0);
}

TEST(ProjectOntoBall, InteriorUnchanged) {
  absl::StatusOr<Point> p = project_onto_ball(P({0.5, 0}), Ball{P({0, 0}), 1});
  ASSERT_TRUE(p.ok());
  EXPECT_EQ(*p, P({0.5, 0}));
}

TEST(ProjectOntoBall, Diagonal) {
  absl::StatusOr<Point> p = project_onto_ball(P({1, 1}), Ball{P({0, 0}), 1});
  ASSERT_TRUE(p.ok());
  EXPECT_NEAR((*p)[0], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR((*p)[1], 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(ProjectOntoBall, DimensionMismatchIsAnError) {
  EXPECT_FALSE(project_onto_ball(P({1, 2, 3}), Ball{P({0, 0}), 1}).ok());
}

TEST(ProjectOntoBall, IdempotentAndNonexpansive) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> z(0.0, 2.0);
  for (int t = 0; t < 1000; ++t) {
    const int d = 1 + t % 4;
    Ball b{Point::NullaryExpr(d, [&] { return z(gen); }),
           std::abs(z(gen)) + 0.01};
    Point x = Point::NullaryExpr(d, [&] { return z(gen); });
    Point y = Point::NullaryExpr(d, [&] { return z(gen); });
    Point px = ProjectOntoBallUnchecked(x, b);
    Point py = ProjectOntoBallUnchecked(y, b);
    EXPECT_LE((px - b.center).norm(), b.radius * (1 + 1e-12));
    EXPECT_LE((ProjectOntoBallUnchecked(px, b) - px).norm(), 1e-12);
    EXPECT_LE((px - py).norm(), (x - y).norm() + 1e-12);
  }
}

// Brute-force projection onto a 2-D ball intersection: the nearest feasible
// point is x itself or lies on some boundary circle, scanned densely.
Point GridProjection(const Point& x, const Region& r) {
  if (r.Contains(x)) return x;
  double best = INFINITY;
  Point arg;
  const int steps = 200000;
  for (const Ball& b : r.balls) {
    for (int k = 0; k < steps; ++k) {
      const double th = 2.0 * std::numbers::pi * k / steps;
      Point p = b.center + b.radius * P({std::cos(th), std::sin(th)});
      if (!r.Contains(p, 1e-12)) continue;
      const double dist = (p - x).norm();
      if (dist < best) {
        best = dist;
        arg = p;
      }
    }
  }
  return arg;
}

TEST(ProjectOntoRegion, MatchesBoundaryScanOnTwoAndThreeBalls) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 60; ++t) {
    Region r;
    const int count = 2 + t % 2;
    Point c0 = P({u(gen), u(gen)});
    r.balls.push_back(Ball{c0, 1.0 + 0.5 * u(gen)});
    for (int i = 1; i < count; ++i) {
      // Centers inside the first ball keep the region nonempty.
      Point c = c0 + 0.5 * r.balls[0].radius * P({u(gen), u(gen)}) / std::sqrt(2.0);
      r.balls.push_back(Ball{c, 0.6 + 0.4 * std::abs(u(gen))});
    }
    Point x = P({3 * u(gen), 3 * u(gen)});
    Point got = ProjectOntoRegion(x, r);
    Point want = GridProjection(x, r);
    EXPECT_TRUE(r.Contains(got, 1e-9));
    EXPECT_NEAR((got - x).norm(), (want - x).norm(), 1e-6) << "trial " << t;
    EXPECT_LE((got - want).norm(), 1e-3) << "trial " << t;
  }
}

TEST(ExcessRisk, LowerBoundInstanceClosedForm) {
  LowerBoundSpec spec;
  spec.d = 2;
  spec.n = 10;
  spec.k = 5;
  spec.v = P({1, 0});
  spec.H = 1.0;
  absl::StatusOr<Instance> inst = make_lower_bound_instance(spec);
  ASSERT_TRUE(inst.ok());
  absl::StatusOr<double> e = excess_risk(*inst, P({0, 0}));
  ASSERT_TRUE(e.ok());
  EXPECT_DOUBLE_EQ(*e, 0.25);
}

TEST(ExcessRisk, ZeroAtKnownOptimum) {
  RngStream rng(1, 0);
  Instance inst = make_noiseless_least_squares(3, 20, P({0.1, -0.2, 0.3}), 2.0, rng);
  absl::StatusOr<double> e = excess_risk(inst, inst.optimum->point);
  ASSERT_TRUE(e.ok());
  EXPECT_LE(*e, 1e-30);
}

TEST(ExcessRisk, NoiselessLeastSquaresHandComputed) {
  Instance inst;
  inst.loss.family = LossFamilyId::kQuadraticAnchor;
  inst.loss.smoothness = 1.0;
  inst.domain = Ball{P({0}), 5.0};
  for (int i = 0; i < 3; ++i) inst.dataset.samples.push_back({P({2}), 0.0});
  absl::StatusOr<double> e = excess_risk(inst, P({0}));
  ASSERT_TRUE(e.ok());
  // Average of H/2 (x - s)^2 over three anchors at 2, minus the zero minimum.
  EXPECT_DOUBLE_EQ(*e, (0.5 * 4 + 0.5 * 4 + 0.5 * 4) / 3.0);
}

TEST(ExcessRisk, NonInterpolatingHingeIsUnsupported) {
  RngStream rng(2, 0);
  Instance inst = make_margin_classification(2, 10, 0.2, rng);
  inst.interpolating = false;
  EXPECT_EQ(excess_risk(inst, P({0, 0})).status().code(),
            absl::StatusCode::kUnimplemented);
}

TEST(ExcessRisk, GrowthAndSmoothnessSandwich) {
  RngStream rng(3, 0);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<Instance> insts;
  insts.push_back(make_noiseless_least_squares(2, 30, P({0.3, -0.1}), 1.5, rng));
  LowerBoundSpec spec;
  spec.d = 3;
  spec.n = 40;
  spec.k = 7;
  spec.v = P({0.2, 0.4, -0.3});
  spec.H = 2.0;
  insts.push_back(*make_lower_bound_instance(spec));
  for (const Instance& inst : insts) {
    for (int t = 0; t < 500; ++t) {
      Point x = Point::NullaryExpr(inst.dim(), [&] { return z(gen); });
      const double dist = inst.optimum->Distance(x);
      const double e = *excess_risk(inst, x);
      EXPECT_GE(e, 0.5 * inst.constants.growth * dist * dist * (1 - 1e-12));
      EXPECT_LE(e, 0.5 * inst.constants.smoothness * dist * dist * (1 + 1e-12));
    }
  }
}

TEST(OptimumSet, HyperplaneDistanceAndNearest) {
  OptimumSet o = OptimumSet::Hyperplane(P({3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(o.Distance(P({0, 0})), 1.0);
  Point q = o.Nearest(P({0, 0}));
  EXPECT_NEAR(q[0], 0.6, 1e-15);
  EXPECT_NEAR(q[1], 0.8, 1e-15);
}

TEST(Validation, RejectsBadConstantsBudgetsAndSchedules) {
  LossConstants c;
  c.kappa = 1.5;
  EXPECT_FALSE(ValidateConstants(c).ok());
  EXPECT_FALSE(ValidateBudget({0.0, 0.0}).ok());
  EXPECT_FALSE(ValidateBudget({1.0, 1.0}).ok());
  Schedule s;
  s.T = 3;
  s.m = 4;
  EXPECT_FALSE(ValidateSchedule(s, 11).ok());
  EXPECT_TRUE(ValidateSchedule(s, 12).ok());
}

TEST(Validation, DeclaredOptimumMustHaveZeroExcess) {
  RngStream rng(4, 0);
  Instance inst = make_noiseless_least_squares(2, 5, P({0.1, 0.1}), 1.0, rng);
  EXPECT_TRUE(ValidateInstance(inst).ok());
  inst.optimum = OptimumSet::AtPoint(P({0.2, 0.1}));
  EXPECT_FALSE(ValidateInstance(inst).ok());
}

}  // namespace
}  // namespace pinterp
