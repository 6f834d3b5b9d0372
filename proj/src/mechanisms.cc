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

#include "pinterp/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "absl/strings/str_cat.h"

namespace pinterp {
namespace {

std::mt19937_64 SeedEngine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32),
                    0x70696e74u};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(SeedEngine(seed, stream)) {}

double RngStream::Uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RngStream::Normal() { return normal_(engine_); }

double RngStream::Laplace(double scale) {
  const double e = std::exponential_distribution<double>(1.0)(engine_);
  const bool negative = (engine_() & 1u) != 0;
  return negative ? -scale * e : scale * e;
}

RngStream RngStream::Fork(std::uint64_t child) const {
  // splitmix64 keeps child stream ids well separated.
  std::uint64_t z = stream_ + 0x9e3779b97f4a7c15ull * (child + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z ^= z >> 31;
  return RngStream(seed_, z);
}

absl::StatusOr<Point> laplace_vector(int d, double sigma, RngStream& rng) {
  if (!(sigma > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Laplace scale must be positive, got ", sigma));
  }
  if (d < 0) return absl::InvalidArgumentError("negative dimension");
  Point v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.Laplace(sigma);
  return v;
}

absl::StatusOr<Point> gaussian_vector(int d, double sigma, RngStream& rng) {
  if (!(sigma > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Gaussian scale must be positive, got ", sigma));
  }
  if (d < 0) return absl::InvalidArgumentError("negative dimension");
  Point v(d);
  for (int i = 0; i < d; ++i) v(i) = sigma * rng.Normal();
  return v;
}

double pure_noise_scale(double L, double eta, int d, double eps) {
  return 4.0 * L * eta * std::sqrt(static_cast<double>(d)) / eps;
}

absl::StatusOr<double> approx_noise_scale(double L, double eta, double delta,
                                          double eps) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  return 4.0 * L * eta * std::sqrt(std::log(1.0 / delta)) / eps;
}

absl::StatusOr<double> empirical_epsilon(const ScalarMechanism& mech,
                                         const Dataset& s,
                                         const Dataset& s_neighbor,
                                         const AuditConfig& cfg,
                                         RngStream& rng) {
  if (cfg.trials < 1 || cfg.bins < 1) {
    return absl::InvalidArgumentError("trials and bins must be positive");
  }
  std::vector<double> a(cfg.trials), b(cfg.trials);
  for (int t = 0; t < cfg.trials; ++t) a[t] = mech(s, rng);
  for (int t = 0; t < cfg.trials; ++t) b[t] = mech(s_neighbor, rng);

  double lo = cfg.lo, hi = cfg.hi;
  if (!(lo < hi)) {
    double mean = 0.0;
    for (double v : a) mean += v;
    for (double v : b) mean += v;
    mean /= 2.0 * cfg.trials;
    lo = mean - cfg.clamp_sigmas * cfg.sigma;
    hi = mean + cfg.clamp_sigmas * cfg.sigma;
  }
  if (!(lo < hi)) return absl::InvalidArgumentError("empty clamp range");

  const double width = (hi - lo) / cfg.bins;
  auto bin_of = [&](double v) {
    const double c = std::clamp(v, lo, hi);
    return std::min(cfg.bins - 1, static_cast<int>((c - lo) / width));
  };
  std::vector<long> ca(cfg.bins, 0), cb(cfg.bins, 0);
  for (double v : a) ++ca[bin_of(v)];
  for (double v : b) ++cb[bin_of(v)];

  const double denom = static_cast<double>(cfg.trials + cfg.bins);
  double best = -std::numeric_limits<double>::infinity();
  int used = 0;
  for (int k = 0; k < cfg.bins; ++k) {
    const long pooled = ca[k] + cb[k];
    if (pooled == 0 || pooled < cfg.min_bin_count) continue;
    ++used;
    const double pa = (ca[k] + 1.0) / denom;
    const double pb = (cb[k] + 1.0) / denom;
    best = std::max(best, std::log(pa / pb));
  }
  if (used < 2) {
    return absl::FailedPreconditionError(
        absl::StrCat("inconclusive audit: only ", used, " usable bins"));
  }
  return std::max(0.0, best);
}

}  // namespace pinterp
