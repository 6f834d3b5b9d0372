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

#include "pinterp/losses.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace pinterp {
namespace {

bool IsQuadratic(const LossSpec& spec, const SamplePayload& s) {
  if (spec.family == LossFamilyId::kQuadraticAnchor) return true;
  return spec.family == LossFamilyId::kIndicatorQuadratic && !IsZeroPayload(s);
}

// u = margin - y <a, x>.
double HingeArg(const LossSpec& spec, const Point& x, const SamplePayload& s) {
  return spec.margin - s.label * s.point.dot(x);
}

}  // namespace

bool IsZeroPayload(const SamplePayload& s) {
  return (s.point.array() == 0.0).all();
}

double HingePsi(double u, double tau) {
  if (u <= 0.0) return 0.0;
  if (u <= tau) return u * u / (2.0 * tau);
  return u - tau / 2.0;
}

double HingePsiPrime(double u, double tau) {
  if (u <= 0.0) return 0.0;
  if (u <= tau) return u / tau;
  return 1.0;
}

double loss_value(const LossSpec& spec, const Point& x,
                  const SamplePayload& s) {
  switch (spec.family) {
    case LossFamilyId::kQuadraticAnchor:
      return 0.5 * spec.smoothness * (x - s.point).squaredNorm();
    case LossFamilyId::kIndicatorQuadratic:
      if (IsZeroPayload(s)) return 0.0;
      return 0.5 * spec.smoothness * (x - s.point).squaredNorm();
    case LossFamilyId::kSmoothedHingeMargin:
      return HingePsi(HingeArg(spec, x, s), spec.tau());
  }
  return 0.0;
}

Point loss_gradient(const LossSpec& spec, const Point& x,
                    const SamplePayload& s) {
  switch (spec.family) {
    case LossFamilyId::kQuadraticAnchor:
      return spec.smoothness * (x - s.point);
    case LossFamilyId::kIndicatorQuadratic:
      if (IsZeroPayload(s)) return Point::Zero(x.size());
      return spec.smoothness * (x - s.point);
    case LossFamilyId::kSmoothedHingeMargin: {
      const double slope = HingePsiPrime(HingeArg(spec, x, s), spec.tau());
      return (-s.label * slope) * s.point;
    }
  }
  return Point::Zero(x.size());
}

Point ExtensionGradient(const LossSpec& spec, const Point& x,
                        const SamplePayload& s, double clip) {
  Point g = loss_gradient(spec, x, s);
  const double norm = g.norm();
  if (norm <= clip) return g;
  // Both closed forms give a gradient of norm clip along the unclipped one.
  return (clip / norm) * g;
}

Point lip_ext_gradient(const LossSpec& spec, const ExtensionQuery& q) {
  return ExtensionGradient(spec, q.x, q.payload, q.clip);
}

double lip_ext_value(const LossSpec& spec, const ExtensionQuery& q) {
  const double L = q.clip;
  if (IsQuadratic(spec, q.payload)) {
    const double H = spec.smoothness;
    const double r = (q.x - q.payload.point).norm();
    if (H * r <= L) return 0.5 * H * r * r;
    return L * L / (2.0 * H) + L * (r - L / H);
  }
  if (spec.family == LossFamilyId::kIndicatorQuadratic) return 0.0;
  // Hinge: 1-D inf-convolution of psi with (L/||a||)|.| along a.
  const double tau = spec.tau();
  const double u = HingeArg(spec, q.x, q.payload);
  const double c = L / q.payload.point.norm();
  if (c >= 1.0 || u <= c * tau) return HingePsi(u, tau);
  return c * u - 0.5 * c * c * tau;
}

Point lip_ext_argmin(const LossSpec& spec, const ExtensionQuery& q) {
  const double L = q.clip;
  if (IsQuadratic(spec, q.payload)) {
    const double H = spec.smoothness;
    const Point diff = q.x - q.payload.point;
    const double r = diff.norm();
    if (H * r <= L) return q.x;
    return q.payload.point + (L / (H * r)) * diff;
  }
  if (spec.family == LossFamilyId::kIndicatorQuadratic) return q.x;
  const double tau = spec.tau();
  const double u = HingeArg(spec, q.x, q.payload);
  const double a_norm = q.payload.point.norm();
  const double c = L / a_norm;
  if (c >= 1.0 || u <= c * tau) return q.x;
  // Move along y a until u drops to c tau.
  const double shift = (u - c * tau) / a_norm;
  return q.x + (q.payload.label * shift / a_norm) * q.payload.point;
}

absl::Status CheckExtensionQuery(const LossSpec& spec,
                                 const ExtensionQuery& q) {
  if (!(q.clip > 0.0) || !std::isfinite(q.clip)) {
    return absl::InvalidArgumentError(
        absl::StrCat("clip must be positive and finite, got ", q.clip));
  }
  if (q.x.size() != q.payload.point.size()) {
    return absl::InvalidArgumentError("dimension mismatch in extension query");
  }
  if (!q.x.allFinite() || !q.payload.point.allFinite()) {
    return absl::InvalidArgumentError("non-finite coordinates");
  }
  if (spec.family == LossFamilyId::kSmoothedHingeMargin) {
    if (q.payload.label != 1.0 && q.payload.label != -1.0) {
      return absl::InvalidArgumentError("hinge label must be +1 or -1");
    }
    if (!(spec.margin > 0.0) || !(spec.tau() > 0.0)) {
      return absl::InvalidArgumentError("hinge margin must be positive");
    }
  }
  return absl::OkStatus();
}

double effective_lipschitz(const LossConstants& c, const Ball& b,
                           bool interpolating) {
  if (interpolating) return c.smoothness * b.diameter();
  return c.lipschitz;
}

double SampleLipschitzOnBall(const LossSpec& spec, const SamplePayload& s,
                             const Ball& b) {
  if (IsQuadratic(spec, s)) {
    return spec.smoothness * ((b.center - s.point).norm() + b.radius);
  }
  if (spec.family == LossFamilyId::kIndicatorQuadratic) return 0.0;
  // psi' is nondecreasing, so the sup sits at the largest u on the ball.
  const double a_norm = s.point.norm();
  const double u_max = HingeArg(spec, b.center, s) + a_norm * b.radius;
  return HingePsiPrime(u_max, spec.tau()) * a_norm;
}

}  // namespace pinterp
