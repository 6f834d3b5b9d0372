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
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "pinterp/losses.h"

namespace pinterp {
namespace {

double FeasibilitySlack(double radius) { return 1e-12 * (1.0 + radius); }

// Exact projection onto B_i intersect B_j.
Point ProjectOntoPair(const Point& x, const Ball& a, const Ball& b) {
  Point pa = ProjectOntoBallUnchecked(x, a);
  if ((pa - b.center).norm() <= b.radius + FeasibilitySlack(b.radius)) {
    return pa;
  }
  Point pb = ProjectOntoBallUnchecked(x, b);
  if ((pb - a.center).norm() <= a.radius + FeasibilitySlack(a.radius)) {
    return pb;
  }
  // Both spheres active: nearest point of their intersection sphere.
  const Point axis = b.center - a.center;
  const double dist = axis.norm();
  if (dist == 0.0) return pa;
  const Point e = axis / dist;
  const double offset =
      (dist * dist + a.radius * a.radius - b.radius * b.radius) / (2.0 * dist);
  const double h = std::sqrt(std::max(0.0, a.radius * a.radius - offset * offset));
  const Point mid = a.center + offset * e;
  Point w = (x - mid) - (x - mid).dot(e) * e;
  double wn = w.norm();
  if (wn == 0.0) {
    // x sits on the axis; every point of the circle is equidistant.
    w = Point::Zero(x.size());
    int k = 0;
    for (int i = 1; i < e.size(); ++i) {
      if (std::abs(e(i)) < std::abs(e(k))) k = i;
    }
    w(k) = 1.0;
    w -= w.dot(e) * e;
    wn = w.norm();
    if (wn == 0.0) return mid;
  }
  return mid + (h / wn) * w;
}

// Dykstra's alternating projections; used only when three or more balls are
// simultaneously active.
Point Dykstra(const Point& x, const Region& r) {
  const std::size_t k = r.balls.size();
  std::vector<Point> inc(k, Point::Zero(x.size()));
  Point y = x;
  for (int iter = 0; iter < 100000; ++iter) {
    Point prev = y;
    for (std::size_t j = 0; j < k; ++j) {
      Point z = y + inc[j];
      Point p = ProjectOntoBallUnchecked(z, r.balls[j]);
      inc[j] = z - p;
      y = std::move(p);
    }
    if ((y - prev).norm() <= 1e-15 * (1.0 + y.norm())) break;
  }
  return y;
}

}  // namespace

absl::StatusOr<Ball> MakeBall(Point center, double radius) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    return absl::InvalidArgumentError(
        absl::StrCat("ball radius must be finite and >= 0, got ", radius));
  }
  if (!center.allFinite()) {
    return absl::InvalidArgumentError("ball center must be finite");
  }
  return Ball{std::move(center), radius};
}

bool Region::Contains(const Point& x, double slack) const {
  for (const Ball& b : balls) {
    if ((x - b.center).norm() > b.radius + slack) return false;
  }
  return true;
}

const Ball& Region::Tightest() const {
  std::size_t best = 0;
  for (std::size_t j = 1; j < balls.size(); ++j) {
    if (balls[j].radius < balls[best].radius) best = j;
  }
  return balls[best];
}

std::string FamilyName(LossFamilyId family) {
  switch (family) {
    case LossFamilyId::kQuadraticAnchor:
      return "quadratic_anchor";
    case LossFamilyId::kIndicatorQuadratic:
      return "indicator_quadratic";
    case LossFamilyId::kSmoothedHingeMargin:
      return "smoothed_hinge";
  }
  return "unknown";
}

absl::StatusOr<LossFamilyId> ParseFamily(const std::string& name) {
  for (LossFamilyId f :
       {LossFamilyId::kQuadraticAnchor, LossFamilyId::kIndicatorQuadratic,
        LossFamilyId::kSmoothedHingeMargin}) {
    if (FamilyName(f) == name) return f;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown family: ", name));
}

absl::Status ValidateConstants(const LossConstants& c) {
  if (!(c.lipschitz > 0.0) || !(c.smoothness > 0.0)) {
    return absl::InvalidArgumentError("L and H must be positive");
  }
  if (!(c.growth >= 0.0)) {
    return absl::InvalidArgumentError("growth must be nonnegative");
  }
  if (!(c.kappa_floor > 1.0) || !(c.kappa >= c.kappa_floor)) {
    return absl::InvalidArgumentError("need kappa >= kappa_floor > 1");
  }
  return absl::OkStatus();
}

absl::Status ValidateBudget(const PrivacyBudget& b) {
  if (!(b.epsilon > 0.0)) {
    return absl::InvalidArgumentError("epsilon must be positive");
  }
  if (!(b.delta >= 0.0 && b.delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in [0, 1)");
  }
  return absl::OkStatus();
}

OptimumSet OptimumSet::AtPoint(Point p) {
  OptimumSet o;
  o.kind = Kind::kPoint;
  o.point = std::move(p);
  return o;
}

OptimumSet OptimumSet::Hyperplane(Point normal, double offset) {
  OptimumSet o;
  o.kind = Kind::kAffine;
  o.normal = std::move(normal);
  o.offset = offset;
  return o;
}

double OptimumSet::Distance(const Point& x) const {
  if (kind == Kind::kPoint) return (x - point).norm();
  return std::abs(normal.dot(x) - offset) / normal.norm();
}

Point OptimumSet::Nearest(const Point& x) const {
  if (kind == Kind::kPoint) return point;
  return x - ((normal.dot(x) - offset) / normal.squaredNorm()) * normal;
}

absl::Status ValidateInstance(const Instance& inst) {
  if (inst.dataset.size() == 0) {
    return absl::InvalidArgumentError("dataset must be nonempty");
  }
  const int d = inst.domain.dim();
  for (const SamplePayload& s : inst.dataset.samples) {
    if (s.point.size() != d) {
      return absl::InvalidArgumentError("payload dimension mismatch");
    }
    if (!s.point.allFinite()) {
      return absl::InvalidArgumentError("non-finite payload");
    }
    if (inst.loss.family == LossFamilyId::kSmoothedHingeMargin &&
        s.label != 1.0 && s.label != -1.0) {
      return absl::InvalidArgumentError("hinge label must be +1 or -1");
    }
  }
  if (!(inst.domain.radius >= 0.0)) {
    return absl::InvalidArgumentError("domain radius must be >= 0");
  }
  if (inst.loss.family == LossFamilyId::kSmoothedHingeMargin &&
      !(inst.loss.margin > 0.0 && inst.loss.tau() > 0.0)) {
    return absl::InvalidArgumentError("hinge margin must be positive");
  }
  if (absl::Status s = ValidateConstants(inst.constants); !s.ok()) return s;
  if (inst.optimum.has_value()) {
    const OptimumSet& o = *inst.optimum;
    const Point& probe = o.kind == OptimumSet::Kind::kPoint ? o.point : o.normal;
    if (probe.size() != d) {
      return absl::InvalidArgumentError("optimum dimension mismatch");
    }
    absl::StatusOr<double> at_opt = excess_risk(inst, o.Nearest(inst.domain.center));
    if (at_opt.ok() && *at_opt > 1e-12) {
      return absl::InvalidArgumentError(
          absl::StrCat("excess risk at declared optimum is ", *at_opt));
    }
  }
  return absl::OkStatus();
}

absl::Status ValidateSchedule(const Schedule& s, std::size_t n) {
  if (s.T < 1 || s.m < 1) {
    return absl::InvalidArgumentError("T and m must be positive");
  }
  if (static_cast<std::size_t>(s.T) * static_cast<std::size_t>(s.m) > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("T*m = ", s.T * static_cast<long long>(s.m),
                     " exceeds n = ", n));
  }
  if (!(s.beta > 0.0 && s.beta < 1.0)) {
    return absl::InvalidArgumentError("beta must lie in (0, 1)");
  }
  if (!(s.mu > 0.0)) return absl::InvalidArgumentError("mu must be positive");
  if (!(s.constant_scale > 0.0) || !(s.step_scale > 0.0)) {
    return absl::InvalidArgumentError("scales must be positive");
  }
  if (s.inner_epochs < 0) {
    return absl::InvalidArgumentError("inner_epochs must be >= 0");
  }
  return absl::OkStatus();
}

std::string StageName(Stage stage) {
  switch (stage) {
    case Stage::kLocalizationPhase:
      return "localization_phase";
    case Stage::kGrowthEpoch:
      return "growth_epoch";
    case Stage::kInterpolationEpoch:
      return "interpolation_epoch";
    case Stage::kAdaptivePhase:
      return "adaptive_phase";
  }
  return "unknown";
}

std::vector<const EpochRecord*> RunTrace::OfStage(Stage stage) const {
  std::vector<const EpochRecord*> out;
  for (const EpochRecord& r : records) {
    if (r.stage == stage) out.push_back(&r);
  }
  return out;
}

Point ProjectOntoBallUnchecked(const Point& x, const Ball& b) {
  const Point diff = x - b.center;
  const double dist = diff.norm();
  if (dist <= b.radius) return x;
  return b.center + (b.radius / dist) * diff;
}

absl::StatusOr<Point> project_onto_ball(const Point& x, const Ball& b) {
  if (x.size() != b.center.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension mismatch: point has ", x.size(), ", ball has ",
        b.center.size()));
  }
  return ProjectOntoBallUnchecked(x, b);
}

Point ProjectOntoRegion(const Point& x, const Region& r) {
  if (r.balls.empty() || r.Contains(x)) return x;
  if (r.balls.size() == 1) return ProjectOntoBallUnchecked(x, r.balls[0]);
  const double slack = FeasibilitySlack(r.Tightest().radius);
  // The projection equals the projection onto the intersection of its active
  // balls, so the nearest feasible candidate over active sets of size <= 2
  // is exact whenever the true active set has size <= 2.
  double best = std::numeric_limits<double>::infinity();
  Point best_point;
  auto consider = [&](Point p) {
    if (!r.Contains(p, slack)) return;
    const double dist = (p - x).norm();
    if (dist < best) {
      best = dist;
      best_point = std::move(p);
    }
  };
  for (const Ball& b : r.balls) consider(ProjectOntoBallUnchecked(x, b));
  if (best_point.size() == 0) {
    for (std::size_t i = 0; i < r.balls.size(); ++i) {
      for (std::size_t j = i + 1; j < r.balls.size(); ++j) {
        consider(ProjectOntoPair(x, r.balls[i], r.balls[j]));
      }
    }
  }
  if (best_point.size() == 0) return Dykstra(x, r);
  return best_point;
}

double EmpiricalRisk(const Instance& inst, const Point& x) {
  double total = 0.0;
  for (const SamplePayload& s : inst.dataset.samples) {
    total += loss_value(inst.loss, x, s);
  }
  return total / static_cast<double>(inst.dataset.size());
}

absl::StatusOr<double> excess_risk(const Instance& inst, const Point& x) {
  if (x.size() != inst.dim()) {
    return absl::InvalidArgumentError("dimension mismatch in excess_risk");
  }
  const double H = inst.loss.smoothness;
  const std::size_t n = inst.dataset.size();
  switch (inst.loss.family) {
    case LossFamilyId::kQuadraticAnchor: {
      if (inst.population_mean.has_value()) {
        return 0.5 * H * (x - *inst.population_mean).squaredNorm();
      }
      Point mean = Point::Zero(x.size());
      for (const SamplePayload& s : inst.dataset.samples) mean += s.point;
      mean /= static_cast<double>(n);
      return 0.5 * H * (x - mean).squaredNorm();
    }
    case LossFamilyId::kIndicatorQuadratic: {
      Point mean = Point::Zero(x.size());
      std::size_t k = 0;
      for (const SamplePayload& s : inst.dataset.samples) {
        if (IsZeroPayload(s)) continue;
        mean += s.point;
        ++k;
      }
      if (k == 0) return 0.0;
      mean /= static_cast<double>(k);
      return 0.5 * H * static_cast<double>(k) / static_cast<double>(n) *
             (x - mean).squaredNorm();
    }
    case LossFamilyId::kSmoothedHingeMargin: {
      if (!inst.optimum.has_value() || !inst.interpolating) {
        return absl::UnimplementedError(
            "smoothed hinge has a closed-form minimum only when interpolating");
      }
      // Interpolation pins min f at 0.
      return EmpiricalRisk(inst, x);
    }
  }
  return absl::UnimplementedError("family without closed-form risk");
}

}  // namespace pinterp
