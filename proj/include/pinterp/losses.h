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

// Loss families, their gradients, and closed-form Lipschitzian extensions
//   F_L(x) = inf_y { F(y) + L ||x - y|| }.
//
// QuadraticAnchor      F(x; s) = H/2 ||x - s||^2
// IndicatorQuadratic   F(x; s) = H/2 ||x - s||^2 * 1{s != 0}
// SmoothedHingeMargin  F(x; (a, y)) = psi(margin - y <a, x>), with
//   psi(u) = 0 for u <= 0, u^2 / (2 tau) on (0, tau], u - tau/2 beyond.

#ifndef PINTERP_LOSSES_H_
#define PINTERP_LOSSES_H_

#include "absl/status/status.h"
#include "pinterp/domain.h"

namespace pinterp {

struct ExtensionQuery {
  Point x;
  SamplePayload payload;
  double clip = 1.0;
};

double loss_value(const LossSpec& spec, const Point& x,
                  const SamplePayload& s);
Point loss_gradient(const LossSpec& spec, const Point& x,
                    const SamplePayload& s);

// Returns grad F when ||grad F|| <= clip, else clip (x - y(x))/||x - y(x)||.
Point lip_ext_gradient(const LossSpec& spec, const ExtensionQuery& q);
// Same, without copying the query operands.
Point ExtensionGradient(const LossSpec& spec, const Point& x,
                        const SamplePayload& s, double clip);
double lip_ext_value(const LossSpec& spec, const ExtensionQuery& q);
// Minimizer y(x) of F(y) + clip ||x - y||. Equals x when no clipping occurs.
Point lip_ext_argmin(const LossSpec& spec, const ExtensionQuery& q);

// Rejects queries whose extension argmin could sit at infinite distance:
// non-finite coordinates, non-positive clip, dimension mismatch, a hinge
// label outside {-1, +1} or a non-positive hinge margin.
absl::Status CheckExtensionQuery(const LossSpec& spec, const ExtensionQuery& q);

// H * diameter(b) on interpolating instances, the global L otherwise.
double effective_lipschitz(const LossConstants& c, const Ball& b,
                           bool interpolating);

// sup over y in b of ||grad F(y; s)||, exact for every family.
double SampleLipschitzOnBall(const LossSpec& spec, const SamplePayload& s,
                             const Ball& b);

// Nonzero test used by the indicator family.
bool IsZeroPayload(const SamplePayload& s);

// Hinge profile and its derivative.
double HingePsi(double u, double tau);
double HingePsiPrime(double u, double tau);

}  // namespace pinterp

#endif  // PINTERP_LOSSES_H_
