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

// Experiment plumbing behind the command-line driver: configuration, seeded
// sweeps written as CSV, rate fits, and the audit and oracle suites.

#ifndef PINTERP_BENCH_H_
#define PINTERP_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pinterp/domain.h"
#include "pinterp/hardness_lab.h"

namespace pinterp {

struct ExperimentConfig {
  // noiseless_ls | noisy_ls | margin | lower_bound
  std::string instance = "noiseless_ls";
  // localization | growth | adaptive | kappa | erm
  std::string solver = "localization";
  int d = 2;
  double H = 1.0;
  double radius = 0.5;
  double noise_std = 0.5;
  double margin = 0.1;
  // Declared growth exponent; kappa > 2 only matters for the kappa solver.
  double kappa = 2.0;
  // Lower-bound instance: k = max(1, round(k_fraction n)).
  double k_fraction = 0.1;
  double eps = 1.0;
  double delta = 0.0;
  std::vector<std::size_t> n_grid = {1024, 2048, 4096, 8192};
  int seeds = 20;
  std::uint64_t seed_base = 0;
  // Schedule overrides. m = 0 selects the default schedule; T = 0 selects
  // floor(n/m); beta = 0 selects n^{-mu}.
  int T = 0;
  int m = 0;
  double beta = 0.0;
  double mu = 1.0;
  double constant_scale = 1.0;
  double step_scale = 1.0;
  int inner_epochs = 0;
  // Epochs of the standalone growth solver; 0 selects the default.
  int growth_epochs = 0;
  // Step size of the standalone erm solver; 0 selects 1/(lambda n).
  double erm_eta = 0.0;
  std::string out;
  int parallel = 1;
  // Wall time breaks byte-identical reruns, so it is opt-in; 0 is written
  // otherwise.
  bool wall_clock = false;
  // Complexity calculator inputs.
  double alpha = 0.01;
  double rho = 1.0;
};

absl::Status ValidateConfig(const ExperimentConfig& cfg);

// Flat "key = value" lines; '#' starts a comment.
absl::StatusOr<std::map<std::string, std::string>> ParseKeyValues(
    const std::string& text);

// Applies each pair in order; unknown keys and malformed values are errors.
absl::Status ApplySettings(const std::map<std::string, std::string>& kv,
                           ExperimentConfig& cfg);

// Defaults, then the file at path (when nonempty), then the overrides.
absl::StatusOr<ExperimentConfig> LoadConfig(
    const std::string& path, const std::map<std::string, std::string>& cli);

struct SweepRow {
  std::size_t run_id = 0;
  std::string solver;
  std::string family;
  std::size_t n = 0;
  int d = 0;
  double eps = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  double constant_scale = 0.0;
  int T = 0;
  int m = 0;
  double beta = 0.0;
  double excess_risk = 0.0;
  double final_D = 0.0;
  double final_L = 0.0;
  double wall_ms = 0.0;
};

inline constexpr char kCsvHeader[] =
    "run_id,solver,family,n,d,eps,delta,seed,constant_scale,T,m,beta,"
    "excess_risk,final_D,final_L,wall_ms";

// Generator for the configured instance at sample size n.
absl::StatusOr<Instance> BuildInstance(const ExperimentConfig& cfg,
                                       std::size_t n, RngStream& rng);

// Schedule for sample size n after applying the overrides.
absl::StatusOr<Schedule> ResolveSchedule(const ExperimentConfig& cfg,
                                         const Instance& inst);

// One (n, seed) point.
absl::StatusOr<SweepRow> RunPoint(const ExperimentConfig& cfg, std::size_t n,
                                  std::uint64_t seed);

// Rows sorted by (n, seed) with run_id = position.
absl::StatusOr<std::vector<SweepRow>> run_sweep(const ExperimentConfig& cfg);

std::string FormatCsv(const std::vector<SweepRow>& rows);
absl::StatusOr<std::vector<SweepRow>> ParseCsv(const std::string& text);

struct RateFit {
  // "exponential": ln(median) against n; "polynomial": against ln n.
  std::string model;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

struct RateFits {
  RateFit exponential;
  RateFit polynomial;
};

// Ordinary least squares of y on x; R^2 is 1 for constant y.
RateFit FitLine(const std::vector<double>& x, const std::vector<double>& y);

// Median excess risk per n, then both fits.
absl::StatusOr<RateFits> fit_rate(const std::vector<SweepRow>& rows);

struct SuiteResult {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

// "name pass|FAIL measured bound" lines.
std::string FormatSuite(const std::vector<SuiteResult>& results);
bool AllPass(const std::vector<SuiteResult>& results);

struct AuditSuiteConfig {
  double eps = 1.0;
  int trials = 100000;
  std::size_t n = 100;
  std::uint64_t seed = 0;
  // Scales the calibrated noise of the mechanism under test.
  double noise_factor = 1.0;
};

// Clipped-mean output perturbation with Laplace noise, audited on the pair
// {0}^n vs {0}^{n-1} u {1}. Passes when eps_hat <= eps + 0.5; one retry on a
// fresh stream.
absl::StatusOr<SuiteResult> AuditLaplaceMean(const AuditSuiteConfig& cfg);

// Calibrated mechanism plus the sigma/2 negative control, which passes when
// its estimate exceeds eps + 0.5.
absl::StatusOr<std::vector<SuiteResult>> run_audit(const AuditSuiteConfig& cfg);

// Modulus, stability, growth-closure, pinch, and certificate checks.
absl::StatusOr<std::vector<SuiteResult>> run_oracles(std::uint64_t seed);

}  // namespace pinterp

#endif  // PINTERP_BENCH_H_
