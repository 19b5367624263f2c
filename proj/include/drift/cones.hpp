// Cone-condition enclosure of the local manifolds in Jordan coordinates.
//
// On B = [-r, r] x [-Lr, Lr], if [DG(B)] maps the cone {(1, s): |s| <= L}
// into its interior and a11 - L|a12| > 1/lambda, the unstable manifold of G
// is the graph of w: [-r, r] -> [-Lr, Lr] with |w'| <= L, and backward
// iterates satisfy ||G^{-n}(u, w(u))|| < lambda^n sqrt(1 + L^2) |u|.  G is F~
// for the unstable chart and F~^{-1}, coordinates swapped, for the stable one.

#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "drift/chart.hpp"
#include "drift/interval.hpp"
#include "drift/maps.hpp"

namespace drift {

struct ConeSetup {
  double L = 0.1;
  double r = 0.0;
  PhaseBox2 B;
  Interval lambda{0.0};
};

inline ConeSetup make_cone_setup(double L, double r, const Interval& lambda) {
  if (!(L > 0.0) || !(r > 0.0)) throw std::invalid_argument("cone setup needs L > 0 and r > 0");
  ConeSetup s;
  s.L = L;
  s.r = r;
  s.B = {symmetric(r), Interval(L) * symmetric(r)};
  s.lambda = lambda;
  return s;
}

// Stable eigenvalue enclosure inflated by 1 + 1e-3, so the expansion test is
// not an equality at the origin.
inline Interval default_cone_lambda(const JordanFrame& f, double inflation = 1e-3) {
  return f.lambda_s * Interval(1.0 + inflation);
}

// [DG(B)] in the (expanding, contracting) ordering for the given kind.
inline IMat2 cone_derivative(const ConeSetup& s, const JordanFrame& f, ManifoldKind kind) {
  if (kind == ManifoldKind::unstable) return d_jordan_conjugate(s.B, f);
  const PhaseBox2 swapped{s.B.y, s.B.x};
  const IMat2 d = d_jordan_conjugate_inv(swapped, f);
  return {d.a22, d.a21, d.a12, d.a11};
}

// L inf|u'| > sup|s'| for (u', s') = A (1, [-L, L]).
inline bool check_cone_condition(const IMat2& a, const ConeSetup& s) {
  const Interval w = symmetric(s.L);
  const Interval u = a.a11 + a.a12 * w;
  const Interval v = a.a21 + a.a22 * w;
  return (Interval(s.L) * Interval(u.mig())).lo() > v.mag();
}

// inf(a11 - L|a12|) > sup(1/lambda)
inline bool check_expansion(const IMat2& a, const ConeSetup& s) {
  const Interval lhs = a.a11 - Interval(s.L) * abs(a.a12);
  return lhs.lo() > (Interval(1.0) / s.lambda).hi();
}

inline bool check_cone_condition(const ConeSetup& s, const JordanFrame& f, ManifoldKind kind) {
  return check_cone_condition(cone_derivative(s, f, kind), s);
}

inline bool check_expansion(const ConeSetup& s, const JordanFrame& f, ManifoldKind kind) {
  return check_expansion(cone_derivative(s, f, kind), s);
}

// C = ||P|| sqrt(1 + L^2) r
inline Interval cone_tail_constant(const ConeSetup& s, const JordanFrame& f) {
  return norm2(f.P) * sqrt(Interval(1.0) + sqr(Interval(s.L))) * Interval(s.r);
}

inline ManifoldChart cone_chart(const ConeSetup& s, const JordanFrame& f, ManifoldKind kind) {
  const IMat2 d = cone_derivative(s, f, kind);
  if (!check_cone_condition(d, s))
    throw ChartError(std::string("cone condition failed for the ") + to_string(kind) + " chart");
  if (!check_expansion(d, s))
    throw ChartError(std::string("expansion condition failed for the ") + to_string(kind) +
                     " chart");
  if (!(s.lambda.hi() < 1.0)) throw ChartError("cone rate lambda must be below 1");
  ManifoldChart ch;
  ch.kind = kind;
  ch.backend = ChartBackend::cone;
  ch.domain = symmetric(s.r);
  ch.C = cone_tail_constant(s, f).hi();
  ch.lambda = s.lambda;
  ch.data = ConeChartData{s.L, s.r, f};
  return ch;
}

inline bool cone_checks_pass(const ConeSetup& s, const JordanFrame& f, ManifoldKind kind) {
  const IMat2 d = cone_derivative(s, f, kind);
  return check_cone_condition(d, s) && check_expansion(d, s);
}

struct ConeTuning {
  // Upper end of the slope search; also the default slope when r is tuned.
  double L_max = 0.1;
  int bisection_steps = 40;
  double lambda_inflation = 1e-3;
};

// Largest power-of-two radius r <= 1 passing both checks at slope L_max.
inline std::optional<ConeSetup> tune_cone_radius(const JordanFrame& f, ManifoldKind kind,
                                                 const ConeTuning& t = {}) {
  const Interval lam = default_cone_lambda(f, t.lambda_inflation);
  for (double r = 1.0; r > 1e-12; r *= 0.5) {
    const ConeSetup s = make_cone_setup(t.L_max, r, lam);
    if (cone_checks_pass(s, f, kind)) return s;
  }
  return std::nullopt;
}

// For a fixed radius r, the smallest slope L in (0, L_max] (up to bisection
// resolution) passing both checks.  A small L keeps the chart enclosure
// narrow; the cone condition fails for L below the nonlinear slope on B.
inline std::optional<ConeSetup> tune_cone_slope(const JordanFrame& f, ManifoldKind kind, double r,
                                                const ConeTuning& t = {}) {
  const Interval lam = default_cone_lambda(f, t.lambda_inflation);
  auto ok = [&](double L) { return cone_checks_pass(make_cone_setup(L, r, lam), f, kind); };
  double hi = t.L_max;
  if (!ok(hi)) {
    // The feasible slopes may sit below L_max when expansion is the binding check.
    bool found = false;
    for (int k = 0; k < 60 && !found; ++k) {
      hi *= 0.5;
      found = ok(hi);
    }
    if (!found) return std::nullopt;
  }
  double lo = hi;
  for (int k = 0; k < 80; ++k) {
    const double next = lo * 0.5;
    if (!ok(next)) break;
    lo = next;
  }
  // ok(lo) holds, ok(lo / 2) fails (or lo is tiny).
  double a = 0.5 * lo, b = lo;
  for (int k = 0; k < t.bisection_steps; ++k) {
    const double m = 0.5 * (a + b);
    if (ok(m)) b = m; else a = m;
  }
  return make_cone_setup(b, r, lam);
}

}  // namespace drift
