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
#include <random>

#include "gtest/gtest.h"
#include "pinterp/hardness_lab.h"
#include "pinterp/losses.h"

namespace pinterp {
namespace {

Point P(std::initializer_list<double> v) {
  Point p(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

Instance OneAnchor(double anchor, double radius) {
  Instance inst;
  inst.loss.family = LossFamilyId::kQuadraticAnchor;
  inst.loss.smoothness = 1.0;
  inst.domain = Ball{P({0}), radius};
  inst.constants.smoothness = 1.0;
  inst.constants.growth = 1.0;
  inst.constants.lipschitz = 2.0 * radius;
  inst.dataset.samples.push_back({P({anchor}), 0.0});
  return inst;
}

// Regularized objective written out directly from loss_value.
double RegObjective(const Instance& inst, Slice slice, const Point& center,
                    double eta, const Point& x) {
  const double n0 = static_cast<double>(slice.size());
  double f = 0.0;
  for (std::size_t j = slice.begin; j < slice.end; ++j) {
    f += loss_value(inst.loss, x, inst.dataset.samples[j]);
  }
  return f / n0 + (x - center).squaredNorm() / (eta * n0);
}

TEST(SolveRegularizedErm, OneDimensionalExample) {
  Instance inst = OneAnchor(1.0, 5.0);
  InnerSolveConfig cfg;
  absl::StatusOr<Point> x = solve_regularized_erm(
      inst, Slice{0, 1}, P({0}), 2.0, Region{{inst.domain}}, cfg);
  ASSERT_TRUE(x.ok());
  EXPECT_DOUBLE_EQ((*x)[0], 0.5);
  cfg.exact_quadratic = false;
  cfg.tolerance = 1e-13;
  x = solve_regularized_erm(inst, Slice{0, 1}, P({0}), 2.0,
                            Region{{inst.domain}}, cfg);
  ASSERT_TRUE(x.ok());
  EXPECT_NEAR((*x)[0], 0.5, 1e-12);
}

TEST(SolveRegularizedErm, ConstrainedExampleProjects) {
  Instance inst = OneAnchor(4.0, 1.0);
  absl::StatusOr<Point> x = solve_regularized_erm(
      inst, Slice{0, 1}, P({0}), 1e6, Region{{inst.domain}}, {});
  ASSERT_TRUE(x.ok());
  EXPECT_DOUBLE_EQ((*x)[0], 1.0);
}

TEST(SolveRegularizedErm, GradientDescentMatchesClosedForm) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int t = 0; t < 40; ++t) {
    RngStream rng(100 + t, 0);
    const int d = 1 + t % 3;
    Instance inst = make_noiseless_least_squares(
        d, 30, Point::NullaryExpr(d, [&] { return 0.2 * z(gen); }), 1.5, rng);
    Point center = inst.domain.center + 0.3 * Point::NullaryExpr(d, [&] { return z(gen); });
    Region region{{inst.domain, Ball{center, 0.05 + 0.2 * std::abs(z(gen))}}};
    const double eta = std::pow(10.0, -2.0 + 3.0 * (t % 5) / 4.0);
    InnerSolveConfig exact;
    InnerSolveConfig pgd;
    pgd.exact_quadratic = false;
    pgd.tolerance = 1e-12;
    Slice slice{5, 25};
    Point a = *solve_regularized_erm(inst, slice, center, eta, region, exact);
    Point b = *solve_regularized_erm(inst, slice, center, eta, region, pgd);
    EXPECT_LE((a - b).norm(), 1e-7) << "trial " << t;
  }
}

TEST(SolveRegularizedErm, HingeSolutionIsLocallyOptimal) {
  std::mt19937_64 gen(23);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    RngStream rng(200 + t, 0);
    Instance inst = make_margin_classification(2, 40, 0.1, rng);
    Region region{{inst.domain}};
    const Point center = P({0.1 * z(gen), 0.1 * z(gen)});
    InnerSolveConfig cfg;
    cfg.tolerance = 1e-11;
    Slice slice{0, 40};
    const double eta = 0.05;
    absl::StatusOr<Point> x =
        solve_regularized_erm(inst, slice, center, eta, region, cfg);
    ASSERT_TRUE(x.ok()) << x.status();
    const double fx = RegObjective(inst, slice, center, eta, *x);
    for (int k = 0; k < 200; ++k) {
      Point y = ProjectOntoRegion(*x + 1e-3 * P({z(gen), z(gen)}), region);
      EXPECT_GE(RegObjective(inst, slice, center, eta, y), fx - 1e-12);
    }
  }
}

TEST(SolveRegularizedErm, RejectsBadArguments) {
  Instance inst = OneAnchor(1.0, 1.0);
  Region r{{inst.domain}};
  EXPECT_FALSE(solve_regularized_erm(inst, Slice{0, 1}, P({0}), 0.0, r, {}).ok());
  EXPECT_FALSE(solve_regularized_erm(inst, Slice{0, 2}, P({0}), 1.0, r, {}).ok());
  EXPECT_FALSE(solve_regularized_erm(inst, Slice{0, 0}, P({0}), 1.0, r, {}).ok());
  EXPECT_FALSE(solve_regularized_erm(inst, Slice{0, 1}, P({0, 0}), 1.0, r, {}).ok());
}

TEST(SolveRegularizedErm, ConvergenceFailureCarriesGradientNorm) {
  RngStream rng(3, 0);
  Instance inst = make_margin_classification(3, 50, 0.05, rng);
  InnerSolveConfig cfg;
  cfg.max_iters = 2;
  cfg.tolerance = 1e-15;
  absl::StatusOr<Point> x = solve_regularized_erm(
      inst, Slice{0, 50}, P({0.3, -0.2, 0.1}), 10.0, Region{{inst.domain}}, cfg);
  ASSERT_FALSE(x.ok());
  EXPECT_GT(LastGradientNorm(x.status()), 0.0);
}

class LocalizationErmTest : public ::testing::Test {
 protected:
  LocalizationErmTest() : rng_(7, 0) {
    RngStream gen(8, 0);
    inst_ = make_noiseless_least_squares(2, 1000, P({0.1, 0.2}), 1.0, gen);
  }
  Instance inst_;
  RngStream rng_;
};

TEST_F(LocalizationErmTest, PhaseStructure) {
  const double eta = 0.01, clip = inst_.constants.lipschitz;
  absl::StatusOr<SolverResult> r = localization_erm(
      inst_, inst_.domain.center, eta, clip, {1.0, 0.0}, {}, rng_);
  ASSERT_TRUE(r.ok());
  const auto& recs = r->trace.records;
  // ceil(ln 1000) = 7 phases of floor(1000 / 7) = 142 samples.
  ASSERT_EQ(recs.size(), 7u);
  EXPECT_EQ(r->trace.leftover_samples, 1000u - 7u * 142u);
  EXPECT_EQ(recs[2].eta / recs[0].eta, std::ldexp(1.0, -8));
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const double eta_i = eta * std::pow(2.0, -4.0 * (i + 1));
    EXPECT_DOUBLE_EQ(recs[i].eta, eta_i);
    EXPECT_DOUBLE_EQ(recs[i].noise_scale, 4.0 * clip * eta_i * std::sqrt(2.0) / 1.0);
    EXPECT_DOUBLE_EQ(recs[i].domain_radius, 2.0 * clip * eta_i * 142.0);
    EXPECT_EQ(recs[i].sample_end - recs[i].sample_begin, 142u);
    if (i > 0) {
      EXPECT_EQ(recs[i].sample_begin, recs[i - 1].sample_end);
    }
  }
  EXPECT_EQ(r->x, recs.back().iterate);
}

TEST_F(LocalizationErmTest, ApproximateBranchUsesGaussianScale) {
  const double eta = 0.01, clip = 2.0;
  absl::StatusOr<SolverResult> r = localization_erm(
      inst_, inst_.domain.center, eta, clip, {0.5, 1e-5}, {}, rng_);
  ASSERT_TRUE(r.ok());
  const double eta1 = eta / 16.0;
  EXPECT_DOUBLE_EQ(r->trace.records[0].noise_scale,
                   4.0 * clip * eta1 * std::sqrt(std::log(1e5)) / 0.5);
}

TEST_F(LocalizationErmTest, DeterministicAndTooFewSamples) {
  RngStream a(1, 1), b(1, 1);
  Point xa = localization_erm(inst_, inst_.domain.center, 0.01, 1.0, {1, 0}, {}, a)->x;
  Point xb = localization_erm(inst_, inst_.domain.center, 0.01, 1.0, {1, 0}, {}, b)->x;
  EXPECT_EQ(xa, xb);
  EXPECT_EQ(localization_erm(inst_, Slice{0, 0}, Region{{inst_.domain}},
                             inst_.domain.center, 0.01, 1.0, {1, 0}, {}, a)
                .status()
                .code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(LocalizationErm, ExcessRiskWithinHighProbabilityBound) {
  // Empirical excess over the slice against the stated risk bound at
  // beta = 0.05 on n = 2^14: at most a beta fraction of runs may exceed it.
  const std::size_t n = 1 << 14;
  const double beta = 0.05;
  const PrivacyBudget budget{1.0, 0.0};
  int exceed = 0;
  const int runs = 20;
  for (int s = 0; s < runs; ++s) {
    RngStream gen(300 + s, 0);
    Instance inst = make_noisy_least_squares(2, n, P({0.0, 0.1}), 1.0, 0.3, gen);
    const double L = inst.constants.lipschitz;
    const double r = inst.domain.diameter();
    const double eta = r / L * std::min(1.0 / std::sqrt(static_cast<double>(n)),
                                        budget.epsilon / 2.0);
    RngStream rng(400 + s, 0);
    absl::StatusOr<SolverResult> out = lipschitz_wrap(
        [&](const GradientPolicy& p) {
          return localization_erm(inst, Slice{0, n}, Region{{inst.domain}},
                                  inst.domain.center, eta, L, budget, {}, rng, p);
        },
        L);
    ASSERT_TRUE(out.ok());
    const Point best = *QuadraticMinimizer(inst);
    const double excess = EmpiricalRisk(inst, out->x) - EmpiricalRisk(inst, best);
    if (excess > LocalizationRiskBound(L, r, n, beta, 2, budget)) ++exceed;
  }
  EXPECT_LE(exceed, 1);
}

TEST(GrowthSolver, EpochHalving) {
  RngStream gen(5, 0);
  Instance inst = make_noiseless_least_squares(2, 4000, P({0.0, 0.0}), 1.0, gen);
  RngStream rng(6, 0);
  const double clip = inst.constants.lipschitz;
  absl::StatusOr<SolverResult> r = epoch_growth_solver(
      inst, inst.domain.center, clip, 4, 0.05, {1.0, 0.0}, {}, rng);
  ASSERT_TRUE(r.ok());
  std::vector<const EpochRecord*> epochs = r->trace.OfStage(Stage::kGrowthEpoch);
  ASSERT_EQ(epochs.size(), 4u);
  const double r0 = inst.domain.diameter();
  const double eta0 = GrowthStepSize(r0, clip, 1000, 0.05, 2, {1.0, 0.0});
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(epochs[i]->domain_radius, std::ldexp(r0, -i));
    EXPECT_DOUBLE_EQ(epochs[i]->eta, std::ldexp(eta0, -i));
    EXPECT_EQ(epochs[i]->sample_begin, 1000u * i);
    EXPECT_EQ(epochs[i]->sample_end, 1000u * (i + 1));
  }
  // The inner phases of each epoch stay inside its block.
  for (const EpochRecord* p : r->trace.OfStage(Stage::kLocalizationPhase)) {
    const std::size_t block = p->sample_begin / 1000;
    EXPECT_LE(p->sample_end, 1000u * (block + 1));
  }
}

TEST(GrowthSolver, StepSizeFormula) {
  const double n = 1000;
  const double lb = std::log(20.0);
  const double stat = 1.0 / std::sqrt(n * std::log(n) * lb);
  const double priv = 1.0 / (3.0 * lb);
  EXPECT_DOUBLE_EQ(GrowthStepSize(2.0, 4.0, 1000, 0.05, 3, {1.0, 0.0}),
                   2.0 / 8.0 * std::min(stat, priv));
  EXPECT_EQ(DefaultGrowthEpochs(1000, 2.0), 14);
  EXPECT_EQ(DefaultGrowthEpochs(1, 2.0), 1);
}

TEST(GrowthSolver, RejectsBadArguments) {
  RngStream gen(5, 0);
  Instance inst = make_noiseless_least_squares(1, 10, P({0.0}), 1.0, gen);
  RngStream rng(6, 0);
  EXPECT_FALSE(epoch_growth_solver(inst, inst.domain.center, 1.0, 0, 0.05,
                                   {1, 0}, {}, rng).ok());
  EXPECT_FALSE(epoch_growth_solver(inst, inst.domain.center, 1.0, 2, 1.0,
                                   {1, 0}, {}, rng).ok());
  EXPECT_EQ(epoch_growth_solver(inst, inst.domain.center, 1.0, 11, 0.05,
                                {1, 0}, {}, rng).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(LipschitzWrap, IdentityWhenClipDominates) {
  RngStream gen(9, 0);
  Instance inst = make_noiseless_least_squares(3, 500, P({0.1, 0.0, -0.1}), 1.0, gen);
  const double clip = inst.constants.lipschitz;
  RngStream a(10, 0), b(10, 0);
  Point plain = epoch_growth_solver(inst, inst.domain.center, clip, 3, 0.05,
                                    {1.0, 0.0}, {}, a)->x;
  Point wrapped = lipschitz_wrap(
                      [&](const GradientPolicy& p) {
                        return epoch_growth_solver(
                            inst, Slice{0, inst.n()}, Region{{inst.domain}},
                            inst.domain.center, clip, 3, 0.05, {1.0, 0.0}, {},
                            b, p);
                      },
                      clip)
                      ->x;
  EXPECT_EQ(plain, wrapped);
}

TEST(LipschitzWrap, HookSeesSampleBoundsAndClipBindsGradients) {
  RngStream gen(11, 0);
  Instance inst = make_noisy_least_squares(2, 200, P({0.0, 0.0}), 1.0, 2.0, gen);
  double max_seen = 0.0;
  GradientHook hook = [&](double g) { max_seen = std::max(max_seen, g); };
  RngStream rng(12, 0);
  const double clip = 0.5;
  absl::StatusOr<SolverResult> r = lipschitz_wrap(
      [&](const GradientPolicy& p) {
        return localization_erm(inst, Slice{0, 200}, Region{{inst.domain}},
                                inst.domain.center, 0.01, clip, {1, 0}, {}, rng,
                                p);
      },
      clip, &hook);
  ASSERT_TRUE(r.ok());
  EXPECT_GT(max_seen, 0.0);
  EXPECT_LE(max_seen, clip * (1.0 + 1e-12));
  EXPECT_FALSE(lipschitz_wrap([](const GradientPolicy&) {
                 return absl::StatusOr<SolverResult>(SolverResult{});
               }, 0.0).ok());
}

}  // namespace
}  // namespace pinterp
