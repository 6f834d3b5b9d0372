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

#ifndef PINTERP_MECHANISMS_H_
#define PINTERP_MECHANISMS_H_

#include <cstdint>
#include <functional>
#include <random>

#include "absl/status/statusor.h"
#include "pinterp/domain.h"

namespace pinterp {

// Deterministic random stream. Equal (seed, stream) pairs replay the same
// sequence on the same standard library.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  double Uniform();
  double Normal();
  // Density proportional to exp(-|z| / scale).
  double Laplace(double scale);
  // Child stream keyed by (seed, stream, child); does not advance this one.
  RngStream Fork(std::uint64_t child) const;

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// d i.i.d. Laplace(sigma) coordinates.
absl::StatusOr<Point> laplace_vector(int d, double sigma, RngStream& rng);
// d i.i.d. N(0, sigma^2) coordinates.
absl::StatusOr<Point> gaussian_vector(int d, double sigma, RngStream& rng);

// 4 L eta sqrt(d) / eps.
double pure_noise_scale(double L, double eta, int d, double eps);
// 4 L eta sqrt(ln(1/delta)) / eps; delta must lie in (0, 1).
absl::StatusOr<double> approx_noise_scale(double L, double eta, double delta,
                                          double eps);

struct AuditConfig {
  int trials = 100000;
  int bins = 64;
  // Clamp range; lo >= hi derives it as pooled mean +- clamp_sigmas * sigma.
  double lo = 0.0;
  double hi = 0.0;
  double sigma = 1.0;
  double clamp_sigmas = 8.0;
  // Bins with fewer pooled outcomes are skipped.
  int min_bin_count = 1000;
};

using ScalarMechanism = std::function<double(const Dataset&, RngStream&)>;

// max over bins O of ln(P(M(S) in O) / P(M(S') in O)) with add-one smoothing.
// An estimate, not a certificate.
absl::StatusOr<double> empirical_epsilon(const ScalarMechanism& mech,
                                         const Dataset& s,
                                         const Dataset& s_neighbor,
                                         const AuditConfig& cfg,
                                         RngStream& rng);

}  // namespace pinterp

#endif  // PINTERP_MECHANISMS_H_
