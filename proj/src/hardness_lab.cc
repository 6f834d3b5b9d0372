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

#include "pinterp/hardness_lab.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "pinterp/losses.h"

namespace pinterp {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Point RandomDirection(int d, RngStream& rng) {
  Point v(d);
  do {
    for (int i = 0; i < d; ++i) v[i] = rng.Normal();
  } while (v.norm() == 0.0);
  return v / v.norm();
}

// Uniform point of the ball of the given radius around the origin.
Point RandomInBall(int d, double radius, RngStream& rng) {
  const Point dir = RandomDirection(d, rng);
  return radius * std::pow(rng.Uniform(), 1.0 / d) * dir;
}

Instance QuadraticAnchorShell(int d, double H, const Ball& domain) {
  Instance inst;
  inst.loss.family = LossFamilyId::kQuadraticAnchor;
  inst.loss.smoothness = H;
  inst.domain = domain;
  inst.constants.smoothness = H;
  inst.constants.growth = H;
  // Largest gradient norm of any sample whose anchor lies in the domain.
  inst.constants.lipschitz = H * domain.diameter();
  (void)d;
  return inst;
}

bool IsQuadraticFamily(LossFamilyId f) {
  return f == LossFamilyId::kQuadraticAnchor ||
         f == LossFamilyId::kIndicatorQuadratic;
}

// Curvature multiplier of sample j: the per-sample Hessian is this times H I.
double HessianWeight(const Instance& inst, const SamplePayload& s) {
  if (inst.loss.family == LossFamilyId::kIndicatorQuadratic &&
      IsZeroPayload(s)) {
    return 0.0;
  }
  return 1.0;
}

OracleReport UpperReport(std::string name, double measured, double bound) {
  OracleReport r;
  r.name = std::move(name);
  r.measured = measured;
  r.bound = bound;
  r.lower = kNaN;
  r.margin = bound - measured;
  r.pass = measured <= bound * (1.0 + 1e-12) + 1e-15;
  return r;
}

}  // namespace

Instance make_noiseless_least_squares(int d, std::size_t n, const Point& xstar,
                                      double H, RngStream& rng,
                                      double radius) {
  Ball domain{xstar + RandomInBall(d, radius / 2.0, rng), radius};
  Instance inst = QuadraticAnchorShell(d, H, domain);
  inst.dataset.samples.assign(n, SamplePayload{xstar, 0.0});
  inst.optimum = OptimumSet::AtPoint(xstar);
  inst.interpolating = true;
  return inst;
}

Instance make_noisy_least_squares(int d, std::size_t n, const Point& xstar,
                                  double H, double noise_std, RngStream& rng,
                                  double radius) {
  Ball domain{xstar + RandomInBall(d, radius / 2.0, rng), radius};
  Instance inst = QuadraticAnchorShell(d, H, domain);
  inst.dataset.samples.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    Point a(d);
    for (int i = 0; i < d; ++i) a[i] = xstar[i] + noise_std * rng.Normal();
    inst.dataset.samples.push_back({std::move(a), 0.0});
  }
  inst.constants.lipschitz =
      H * (domain.diameter() + 3.0 * noise_std * std::sqrt(double(d)));
  inst.population_mean = xstar;
  inst.optimum = OptimumSet::AtPoint(xstar);
  inst.interpolating = false;
  return inst;
}

Instance make_margin_classification(int d, std::size_t n, double margin,
                                    RngStream& rng) {
  const Point w_dir = RandomDirection(d, rng);
  const Point w = 8.0 * margin * w_dir;
  Instance inst;
  inst.loss.family = LossFamilyId::kSmoothedHingeMargin;
  inst.loss.margin = margin;
  inst.loss.smoothing = margin / 2.0;
  inst.loss.smoothness = 1.0 / inst.loss.tau();
  inst.domain = Ball{Point::Zero(d), 16.0 * margin};
  inst.constants.lipschitz = 1.0;
  inst.constants.smoothness = 1.0 / inst.loss.tau();
  inst.constants.growth = 0.0;
  inst.dataset.samples.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    // a = t w_dir + sqrt(1 - t^2) u with u orthogonal to w_dir, |t| >= 1/4.
    const double t_abs = 0.25 + 0.75 * rng.Uniform();
    const double t = rng.Uniform() < 0.5 ? -t_abs : t_abs;
    Point a = t * w_dir;
    if (d > 1) {
      Point u = RandomDirection(d, rng);
      u -= u.dot(w_dir) * w_dir;
      if (u.norm() > 1e-12) {
        a += std::sqrt(1.0 - t * t) * u / u.norm();
      } else {
        a = (t > 0 ? 1.0 : -1.0) * w_dir;
      }
    } else {
      a = (t > 0 ? 1.0 : -1.0) * w_dir;
    }
    a /= a.norm();
    const double y = a.dot(w) >= 0.0 ? 1.0 : -1.0;
    inst.dataset.samples.push_back({std::move(a), y});
  }
  inst.optimum = OptimumSet::AtPoint(w);
  inst.interpolating = true;
  return inst;
}

absl::StatusOr<Instance> make_lower_bound_instance(const LowerBoundSpec& spec) {
  if (spec.d < 1 || spec.v.size() != spec.d) {
    return absl::InvalidArgumentError("v must have dimension d >= 1");
  }
  if (spec.k < 1 || spec.k > spec.n) {
    return absl::InvalidArgumentError("need 1 <= k <= n");
  }
  if (!(spec.v.norm() > 0.0) || !(spec.H > 0.0)) {
    return absl::InvalidArgumentError("need v != 0 and H > 0");
  }
  Instance inst;
  inst.loss.family = LossFamilyId::kIndicatorQuadratic;
  inst.loss.smoothness = spec.H;
  inst.domain = Ball{Point::Zero(spec.d), spec.v.norm()};
  inst.constants.smoothness = spec.H;
  inst.constants.growth =
      spec.H * static_cast<double>(spec.k) / static_cast<double>(spec.n);
  inst.constants.lipschitz = spec.H * inst.domain.diameter();
  inst.dataset.samples.assign(spec.n - spec.k,
                              SamplePayload{Point::Zero(spec.d), 0.0});
  for (std::size_t j = 0; j < spec.k; ++j) {
    inst.dataset.samples.push_back({spec.v, 0.0});
  }
  inst.optimum = OptimumSet::AtPoint(spec.v);
  inst.interpolating = true;
  return inst;
}

absl::StatusOr<std::vector<Point>> make_packing(const PackingSpec& spec) {
  if (spec.d < 1 || spec.d > 3) {
    return absl::UnimplementedError("packing supports d <= 3");
  }
  if (!(spec.separation > 0.0) || !(spec.separation <= spec.diameter / 2.0)) {
    return absl::InvalidArgumentError("need 0 < separation <= D/2");
  }
  const double half = spec.diameter / 2.0;
  const int reach = static_cast<int>(std::floor(half / spec.separation + 1e-9));
  const double limit = half * half * (1.0 + 1e-12);
  std::vector<Point> out;
  std::vector<int> z(spec.d, -reach);
  while (true) {
    Point p(spec.d);
    for (int i = 0; i < spec.d; ++i) p[i] = z[i] * spec.separation;
    if (p.squaredNorm() <= limit) out.push_back(std::move(p));
    int i = 0;
    while (i < spec.d && z[i] == reach) z[i++] = -reach;
    if (i == spec.d) break;
    ++z[i];
  }
  return out;
}

std::size_t SuperefficiencyParams::removal() const {
  return static_cast<std::size_t>(std::ceil(1.0 / epsilon - 1e-12));
}

absl::StatusOr<Instance> superefficiency_construct(
    const Instance& base, const SuperefficiencyParams& params) {
  if (base.dim() != 1 || !IsQuadraticFamily(base.loss.family)) {
    return absl::InvalidArgumentError("base must be a 1-D quadratic instance");
  }
  if (!base.interpolating) {
    return absl::InvalidArgumentError("base must interpolate");
  }
  if (!(params.epsilon > 0.0) || !(params.D > 0.0)) {
    return absl::InvalidArgumentError("need eps > 0 and D > 0");
  }
  const std::size_t r = params.removal();
  if (r >= base.n()) {
    return absl::InvalidArgumentError(
        absl::StrCat("removal count ", r, " must be below n = ", base.n()));
  }
  absl::StatusOr<Point> x0 = QuadraticMinimizer(base);
  if (!x0.ok()) return x0.status();
  if ((*x0)[0] > 0.0) {
    return absl::InvalidArgumentError("base minimizer must be <= 0");
  }
  Instance out = base;
  out.dataset.samples.resize(base.n() - r);
  const Point anchor = Point::Constant(1, params.D);
  for (std::size_t j = 0; j < r; ++j) out.dataset.samples.push_back({anchor, 0.0});
  out.domain = Ball{Point::Zero(1), params.D};
  out.constants.lipschitz = out.loss.smoothness * out.domain.diameter();
  out.interpolating = false;
  out.population_mean.reset();
  absl::StatusOr<Point> x1 = QuadraticMinimizer(out);
  if (!x1.ok()) return x1.status();
  out.optimum = OptimumSet::AtPoint(*x1);
  return out;
}

absl::StatusOr<Point> QuadraticMinimizer(const Instance& inst) {
  if (!IsQuadraticFamily(inst.loss.family)) {
    return absl::UnimplementedError("closed-form minimizer needs a quadratic");
  }
  Point sum = Point::Zero(inst.dim());
  double weight = 0.0;
  for (const SamplePayload& s : inst.dataset.samples) {
    const double w = HessianWeight(inst, s);
    sum += w * s.point;
    weight += w;
  }
  if (weight == 0.0) return inst.domain.center;
  // Isotropic Hessian: the constrained minimizer is the projected mean.
  return ProjectOntoBallUnchecked(sum / weight, inst.domain);
}

absl::StatusOr<OracleReport> modulus_oracle(const Instance& base,
                                            std::size_t k) {
  if (base.dim() != 1 || !IsQuadraticFamily(base.loss.family)) {
    return absl::InvalidArgumentError("base must be a 1-D quadratic instance");
  }
  if (k > base.n()) return absl::InvalidArgumentError("k exceeds n");
  absl::StatusOr<Point> x0 = QuadraticMinimizer(base);
  if (!x0.ok()) return x0.status();
  const double c = base.domain.center[0];
  const double D = base.domain.radius;
  double best = 0.0;
  for (double target : {c + D, c - D}) {
    std::vector<std::size_t> order(base.n());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return std::abs(target - base.dataset.samples[a].point[0]) >
                              std::abs(target - base.dataset.samples[b].point[0]);
                     });
    Instance nb = base;
    // Running max over j <= k keeps the estimate monotone in k.
    for (std::size_t j = 0; j < k; ++j) {
      nb.dataset.samples[order[j]] = {Point::Constant(1, target), 0.0};
      absl::StatusOr<Point> x1 = QuadraticMinimizer(nb);
      if (!x1.ok()) return x1.status();
      best = std::max(best, std::abs((*x1)[0] - (*x0)[0]));
    }
  }
  const double bound = 4.0 * static_cast<double>(k) * base.constants.lipschitz /
                       (base.constants.growth * static_cast<double>(base.n()));
  OracleReport r = UpperReport("modulus", best, bound);
  r.exhaustive = false;
  return r;
}

absl::StatusOr<OracleReport> stability_bound_check(
    const Instance& base, const Instance& swapped, std::size_t k,
    const LossConstants& constants) {
  if (base.n() != swapped.n() || base.dim() != swapped.dim()) {
    return absl::InvalidArgumentError("instances must share n and d");
  }
  std::size_t differing = 0;
  for (std::size_t j = 0; j < base.n(); ++j) {
    if (base.dataset.samples[j].point != swapped.dataset.samples[j].point ||
        base.dataset.samples[j].label != swapped.dataset.samples[j].label) {
      ++differing;
    }
  }
  if (differing > k) {
    return absl::InvalidArgumentError(
        absl::StrCat("datasets differ in ", differing, " > k = ", k, " rows"));
  }
  if (!(constants.growth > 0.0)) {
    return absl::InvalidArgumentError("stability needs positive growth");
  }
  absl::StatusOr<Point> a = QuadraticMinimizer(base);
  if (!a.ok()) return a.status();
  absl::StatusOr<Point> b = QuadraticMinimizer(swapped);
  if (!b.ok()) return b.status();
  const double bound = 4.0 * static_cast<double>(k) * constants.lipschitz /
                       (constants.growth * static_cast<double>(base.n()));
  return UpperReport("stability", (*a - *b).norm(), bound);
}

absl::StatusOr<OracleReport> growth_closure_check(const Instance& base,
                                                  std::size_t r) {
  if (!IsQuadraticFamily(base.loss.family)) {
    return absl::UnimplementedError("growth closure needs a quadratic family");
  }
  const std::size_t n = base.n();
  if (r >= n) return absl::InvalidArgumentError("r must be below n");
  // Per-sample Hessians are w_j H I, so the smallest eigenvalue of the
  // averaged Hessian is H (sum of kept w_j) / n.
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = HessianWeight(base, base.dataset.samples[j]);
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  double removed = 0.0;
  bool exhaustive = r <= 3;
  if (exhaustive) {
    // Worst subset of size exactly r, enumerated.
    std::vector<std::size_t> idx(r);
    std::iota(idx.begin(), idx.end(), 0);
    if (r == 0) {
      removed = 0.0;
    } else {
      removed = -1.0;
      while (true) {
        double s = 0.0;
        for (std::size_t i : idx) s += w[i];
        removed = std::max(removed, s);
        std::size_t i = r;
        while (i > 0 && idx[i - 1] == n - r + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t t = i; t < r; ++t) idx[t] = idx[t - 1] + 1;
      }
    }
  } else {
    std::vector<double> sorted = w;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (std::size_t j = 0; j < r; ++j) removed += sorted[j];
  }
  const double H = base.constants.smoothness;
  const double measured =
      base.loss.smoothness * (total - removed) / static_cast<double>(n);
  const double bound =
      base.constants.growth - H * static_cast<double>(r) / static_cast<double>(n);
  OracleReport rep;
  rep.name = "growth_closure";
  rep.measured = measured;
  rep.bound = bound;
  rep.lower = kNaN;
  rep.margin = measured - bound;
  rep.pass = measured >= bound - 1e-12 * std::max(1.0, std::abs(bound));
  rep.exhaustive = exhaustive;
  return rep;
}

absl::StatusOr<OracleReport> growth_closure_check_eps(const Instance& base,
                                                      double eps) {
  if (!(eps > 0.0)) return absl::InvalidArgumentError("eps must be positive");
  SuperefficiencyParams p;
  p.epsilon = eps;
  return growth_closure_check(base, p.removal());
}

OracleReport pinch_check(const Quadratic1D& h, const Quadratic1D& g) {
  // Reflect so that x_h <= x_g.
  const double sign = g.minimizer >= h.minimizer ? 1.0 : -1.0;
  const double xh = sign * h.minimizer;
  const double xg = sign * g.minimizer;
  const double gap = xg - xh;
  OracleReport r;
  r.name = "pinch";
  // Offset of the minimizer of h + g from x_h; exactly 0 when gap is 0.
  r.measured = g.curvature * gap / (h.curvature + g.curvature);
  r.lower = 0.5 * g.growth * gap / (0.5 * g.growth + h.smoothness);
  r.bound = g.smoothness * gap / (0.5 * h.growth + g.smoothness);
  r.margin = std::min(r.measured - r.lower, r.bound - r.measured);
  const double tol = 1e-12 * std::max(1.0, std::abs(gap));
  bool ok = r.margin >= -tol;
  for (const Quadratic1D* q : {&h, &g}) {
    for (double off : {0.0, 0.1, -0.1, 1.0, -1.0, 3.0, -3.0}) {
      const double x = q->minimizer + off * (1.0 + std::abs(q->minimizer));
      const double dist = std::abs(x - q->minimizer);
      const double slope = std::abs(q->curvature * (x - q->minimizer));
      ok = ok && 0.5 * q->growth * dist <= slope + tol &&
           slope <= q->smoothness * dist + tol;
    }
  }
  r.pass = ok;
  return r;
}

OracleReport InterpolationCertificate(const Instance& inst, double tol) {
  OracleReport r;
  r.name = "interpolation_certificate";
  r.bound = tol;
  r.lower = kNaN;
  if (!inst.optimum.has_value()) {
    r.measured = std::numeric_limits<double>::infinity();
    r.margin = -r.measured;
    return r;
  }
  const Point xs = inst.optimum->Nearest(inst.domain.center);
  double worst = 0.0;
  for (const SamplePayload& s : inst.dataset.samples) {
    worst = std::max(worst, loss_gradient(inst.loss, xs, s).norm());
  }
  r.measured = worst;
  r.margin = tol - worst;
  r.pass = worst <= tol;
  return r;
}

namespace {

void WriteVector(std::ostringstream& os, const Point& p) {
  for (int i = 0; i < p.size(); ++i) os << ' ' << absl::StrFormat("%.17g", p[i]);
}

absl::StatusOr<Point> ReadVector(std::istringstream& is, int d) {
  Point p(d);
  for (int i = 0; i < d; ++i) {
    if (!(is >> p[i])) return absl::InvalidArgumentError("short vector");
  }
  return p;
}

absl::Status Expect(std::istringstream& is, const std::string& key) {
  std::string got;
  if (!(is >> got) || got != key) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected '", key, "', got '", got, "'"));
  }
  return absl::OkStatus();
}

}  // namespace

// Line-oriented text: a header, scalar fields, then one row per sample
// (label followed by coordinates). Doubles round-trip through %.17g.
std::string SerializeInstance(const Instance& inst) {
  std::ostringstream os;
  const int d = inst.dim();
  os << "pinterp-instance 1\n";
  os << "family " << FamilyName(inst.loss.family) << '\n';
  os << "dim " << d << '\n';
  os << "n " << inst.n() << '\n';
  os << absl::StrFormat("loss %.17g %.17g %.17g\n", inst.loss.smoothness,
                        inst.loss.margin, inst.loss.smoothing);
  const LossConstants& c = inst.constants;
  os << absl::StrFormat("constants %.17g %.17g %.17g %.17g %.17g\n",
                        c.lipschitz, c.smoothness, c.growth, c.kappa,
                        c.kappa_floor);
  os << absl::StrFormat("domain %.17g", inst.domain.radius);
  WriteVector(os, inst.domain.center);
  os << '\n';
  os << "interpolating " << (inst.interpolating ? 1 : 0) << '\n';
  if (!inst.optimum.has_value()) {
    os << "optimum none\n";
  } else if (inst.optimum->kind == OptimumSet::Kind::kPoint) {
    os << "optimum point";
    WriteVector(os, inst.optimum->point);
    os << '\n';
  } else {
    os << absl::StrFormat("optimum affine %.17g", inst.optimum->offset);
    WriteVector(os, inst.optimum->normal);
    os << '\n';
  }
  if (inst.population_mean.has_value()) {
    os << "population mean";
    WriteVector(os, *inst.population_mean);
    os << '\n';
  } else {
    os << "population none\n";
  }
  for (const SamplePayload& s : inst.dataset.samples) {
    os << absl::StrFormat("sample %.17g", s.label);
    WriteVector(os, s.point);
    os << '\n';
  }
  return os.str();
}

absl::StatusOr<Instance> ParseInstance(const std::string& text) {
  std::istringstream is(text);
  Instance inst;
  if (absl::Status s = Expect(is, "pinterp-instance"); !s.ok()) return s;
  int version = 0;
  if (!(is >> version) || version != 1) {
    return absl::InvalidArgumentError("unsupported instance version");
  }
  std::string word;
  if (absl::Status s = Expect(is, "family"); !s.ok()) return s;
  is >> word;
  absl::StatusOr<LossFamilyId> fam = ParseFamily(word);
  if (!fam.ok()) return fam.status();
  inst.loss.family = *fam;
  int d = 0;
  std::size_t n = 0;
  if (absl::Status s = Expect(is, "dim"); !s.ok()) return s;
  if (!(is >> d) || d < 1) return absl::InvalidArgumentError("bad dim");
  if (absl::Status s = Expect(is, "n"); !s.ok()) return s;
  if (!(is >> n)) return absl::InvalidArgumentError("bad n");
  if (absl::Status s = Expect(is, "loss"); !s.ok()) return s;
  if (!(is >> inst.loss.smoothness >> inst.loss.margin >> inst.loss.smoothing)) {
    return absl::InvalidArgumentError("bad loss line");
  }
  if (absl::Status s = Expect(is, "constants"); !s.ok()) return s;
  LossConstants& c = inst.constants;
  if (!(is >> c.lipschitz >> c.smoothness >> c.growth >> c.kappa >>
        c.kappa_floor)) {
    return absl::InvalidArgumentError("bad constants line");
  }
  if (absl::Status s = Expect(is, "domain"); !s.ok()) return s;
  if (!(is >> inst.domain.radius)) return absl::InvalidArgumentError("bad domain");
  absl::StatusOr<Point> center = ReadVector(is, d);
  if (!center.ok()) return center.status();
  inst.domain.center = *center;
  if (absl::Status s = Expect(is, "interpolating"); !s.ok()) return s;
  int interp = 0;
  is >> interp;
  inst.interpolating = interp != 0;
  if (absl::Status s = Expect(is, "optimum"); !s.ok()) return s;
  is >> word;
  if (word == "point") {
    absl::StatusOr<Point> p = ReadVector(is, d);
    if (!p.ok()) return p.status();
    inst.optimum = OptimumSet::AtPoint(*p);
  } else if (word == "affine") {
    double offset = 0.0;
    is >> offset;
    absl::StatusOr<Point> p = ReadVector(is, d);
    if (!p.ok()) return p.status();
    inst.optimum = OptimumSet::Hyperplane(*p, offset);
  } else if (word != "none") {
    return absl::InvalidArgumentError(absl::StrCat("bad optimum kind ", word));
  }
  if (absl::Status s = Expect(is, "population"); !s.ok()) return s;
  is >> word;
  if (word == "mean") {
    absl::StatusOr<Point> p = ReadVector(is, d);
    if (!p.ok()) return p.status();
    inst.population_mean = *p;
  } else if (word != "none") {
    return absl::InvalidArgumentError("bad population line");
  }
  inst.dataset.samples.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (absl::Status s = Expect(is, "sample"); !s.ok()) return s;
    SamplePayload sp;
    if (!(is >> sp.label)) return absl::InvalidArgumentError("bad sample row");
    absl::StatusOr<Point> p = ReadVector(is, d);
    if (!p.ok()) return p.status();
    sp.point = *p;
    inst.dataset.samples.push_back(std::move(sp));
  }
  if (is >> word) {
    return absl::InvalidArgumentError(absl::StrCat("trailing token ", word));
  }
  if (absl::Status s = ValidateInstance(inst); !s.ok()) return s;
  return inst;
}

}  // namespace pinterp
