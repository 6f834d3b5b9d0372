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

// Command-line driver. Exit codes: 0 success, 1 suite or run failure,
// 2 configuration error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_format.h"
#include "pinterp/bench.h"
#include "pinterp/interpolation_solvers.h"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kConfigError = 2;

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed_base;
  std::optional<int> parallel;
  std::vector<std::string> sets;
};

void AddCommon(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "key=value configuration file");
  app->add_option("--out", f.out, "output path (stdout when omitted)");
  app->add_option("--seed-base", f.seed_base, "base seed");
  app->add_option("--parallel", f.parallel, "worker threads");
  app->add_option("--set", f.sets, "override key=value (repeatable)");
}

int ConfigError(const std::string& msg) {
  std::cerr << "config error: " << msg << "\n";
  return kConfigError;
}

// Folds the dedicated flags and --set pairs into one override map; the
// dedicated flags win over --set.
std::optional<pinterp::ExperimentConfig> Load(const CommonFlags& f, int& rc) {
  std::map<std::string, std::string> cli;
  for (const std::string& kv : f.sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      rc = ConfigError("--set expects key=value, got '" + kv + "'");
      return std::nullopt;
    }
    cli[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  if (f.seed_base) cli["seed_base"] = std::to_string(*f.seed_base);
  if (f.parallel) cli["parallel"] = std::to_string(*f.parallel);
  if (!f.out.empty()) cli["out"] = f.out;
  absl::StatusOr<pinterp::ExperimentConfig> cfg = pinterp::LoadConfig(f.config, cli);
  if (!cfg.ok()) {
    rc = ConfigError(std::string(cfg.status().message()));
    return std::nullopt;
  }
  return *cfg;
}

bool Emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

int Sweep(const CommonFlags& f) {
  int rc = kOk;
  std::optional<pinterp::ExperimentConfig> cfg = Load(f, rc);
  if (!cfg) return rc;
  absl::StatusOr<std::vector<pinterp::SweepRow>> rows = pinterp::run_sweep(*cfg);
  if (!rows.ok()) {
    std::cerr << "sweep failed: " << rows.status().message() << "\n";
    return rows.status().code() == absl::StatusCode::kFailedPrecondition ||
                   rows.status().code() == absl::StatusCode::kInvalidArgument
               ? kConfigError
               : kFailure;
  }
  return Emit(cfg->out, pinterp::FormatCsv(*rows)) ? kOk : kFailure;
}

int Fit(const CommonFlags& f, const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) return ConfigError("cannot read " + csv_path);
  std::stringstream buf;
  buf << in.rdbuf();
  absl::StatusOr<std::vector<pinterp::SweepRow>> rows = pinterp::ParseCsv(buf.str());
  if (!rows.ok()) return ConfigError(std::string(rows.status().message()));
  absl::StatusOr<pinterp::RateFits> fits = pinterp::fit_rate(*rows);
  if (!fits.ok()) {
    std::cerr << "fit failed: " << fits.status().message() << "\n";
    return kFailure;
  }
  std::string text = "model,slope,intercept,r2\n";
  for (const pinterp::RateFit* r : {&fits->exponential, &fits->polynomial}) {
    absl::StrAppendFormat(&text, "%s,%.17g,%.17g,%.17g\n", r->model, r->slope,
                          r->intercept, r->r2);
  }
  return Emit(f.out, text) ? kOk : kFailure;
}

int Audit(const CommonFlags& f, int trials) {
  int rc = kOk;
  std::optional<pinterp::ExperimentConfig> cfg = Load(f, rc);
  if (!cfg) return rc;
  pinterp::AuditSuiteConfig ac;
  ac.eps = cfg->eps;
  ac.trials = trials;
  ac.seed = cfg->seed_base;
  absl::StatusOr<std::vector<pinterp::SuiteResult>> res = pinterp::run_audit(ac);
  if (!res.ok()) {
    std::cerr << "audit failed: " << res.status().message() << "\n";
    return kFailure;
  }
  if (!Emit(cfg->out, pinterp::FormatSuite(*res))) return kFailure;
  return pinterp::AllPass(*res) ? kOk : kFailure;
}

int Oracles(const CommonFlags& f) {
  int rc = kOk;
  std::optional<pinterp::ExperimentConfig> cfg = Load(f, rc);
  if (!cfg) return rc;
  absl::StatusOr<std::vector<pinterp::SuiteResult>> res =
      pinterp::run_oracles(cfg->seed_base);
  if (!res.ok()) {
    std::cerr << "oracles failed: " << res.status().message() << "\n";
    return kFailure;
  }
  if (!Emit(cfg->out, pinterp::FormatSuite(*res))) return kFailure;
  for (const pinterp::SuiteResult& r : *res) {
    if (!r.pass) {
      std::cerr << "FAIL " << r.name << ": measured " << r.measured
                << " vs bound " << r.bound << "\n";
    }
  }
  return pinterp::AllPass(*res) ? kOk : kFailure;
}

int Complexity(const CommonFlags& f) {
  int rc = kOk;
  std::optional<pinterp::ExperimentConfig> cfg = Load(f, rc);
  if (!cfg) return rc;
  if (!(cfg->alpha > 0.0 && cfg->alpha < 1.0) || !(cfg->rho > 0.0)) {
    return ConfigError("need alpha in (0, 1) and rho > 0");
  }
  const double n = pinterp::sample_complexity(
      cfg->alpha, cfg->rho, cfg->d, pinterp::PrivacyBudget{cfg->eps, cfg->delta});
  const std::string text = absl::StrFormat(
      "alpha,rho,d,eps,delta,samples\n%.17g,%.17g,%d,%.17g,%.17g,%.17g\n",
      cfg->alpha, cfg->rho, cfg->d, cfg->eps, cfg->delta, n);
  return Emit(cfg->out, text) ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pinterp experiment driver"};
  app.require_subcommand(1);

  CommonFlags sweep_f, fit_f, audit_f, oracle_f, complexity_f;
  std::string csv_path;
  int trials = 100000;

  CLI::App* sweep = app.add_subcommand("sweep", "run a seeded sweep to CSV");
  AddCommon(sweep, sweep_f);
  CLI::App* fit = app.add_subcommand("fit", "fit both rate models to a CSV");
  AddCommon(fit, fit_f);
  fit->add_option("--csv", csv_path, "sweep CSV")->required();
  CLI::App* audit = app.add_subcommand("audit", "empirical epsilon audit");
  AddCommon(audit, audit_f);
  audit->add_option("--trials", trials, "trials per dataset");
  CLI::App* oracles = app.add_subcommand("oracles", "hardness-lab checks");
  AddCommon(oracles, oracle_f);
  CLI::App* complexity =
      app.add_subcommand("complexity", "sample-complexity calculator");
  AddCommon(complexity, complexity_f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  if (sweep->parsed()) return Sweep(sweep_f);
  if (fit->parsed()) return Fit(fit_f, csv_path);
  if (audit->parsed()) return Audit(audit_f, trials);
  if (oracles->parsed()) return Oracles(oracle_f);
  return Complexity(complexity_f);
}
