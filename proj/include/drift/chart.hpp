// A certified local stable or unstable manifold of the origin, produced by
// either the cone backend or the parameterization backend.
//
// Tail bound shared by both backends: for t in the domain and n >= 0,
// ||F^{-n}(chart(t))|| <= C lambda^n (unstable) or ||F^n(chart(t))|| <= C
// lambda^n (stable), Euclidean norm.

#pragma once

#include <cmath>
#include <stdexcept>
#include <variant>

#include "drift/interval.hpp"
#include "drift/maps.hpp"
#include "drift/parameterization.hpp"

namespace drift {

enum class ChartBackend { cone, parameterization };

inline const char* to_string(ChartBackend b) {
  return b == ChartBackend::cone ? "cone" : "param";
}

// The chart is the graph w of a function of the expanding Jordan coordinate,
// |w(t)| <= L|t| and |w'| <= L, mapped back by P.
struct ConeChartData {
  double L = 0.0;
  double r = 0.0;
  JordanFrame frame;
};

struct ManifoldChart {
  ManifoldKind kind = ManifoldKind::unstable;
  ChartBackend backend = ChartBackend::cone;
  Interval domain{0.0};
  double C = 0.0;
  Interval lambda{0.0};
  std::variant<ConeChartData, ParamChart> data;
};

inline Interval euclid(const PhaseBox2& v) { return sqrt(sqr(v.x) + sqr(v.y)); }

namespace detail {

inline void check_domain(const ManifoldChart& ch, const Interval& t) {
  if (!ch.domain.contains(t))
    throw std::domain_error(std::string("chart parameter outside the ") + to_string(ch.kind) +
                            " chart domain");
}

// Jordan-coordinate box of the chart over t: expanding coordinate t, the
// other within [-L|t|, L|t|].
inline PhaseBox2 cone_jordan_box(const ConeChartData& c, ManifoldKind kind, const Interval& t) {
  const Interval w = Interval(c.L) * symmetric(t.mag());
  return kind == ManifoldKind::unstable ? PhaseBox2{t, w} : PhaseBox2{w, t};
}

inline PhaseBox2 cone_jordan_slope(const ConeChartData& c, ManifoldKind kind) {
  const Interval w = symmetric(c.L);
  return kind == ManifoldKind::unstable ? PhaseBox2{Interval(1.0), w} : PhaseBox2{w, Interval(1.0)};
}

}  // namespace detail

// Enclosure of the chart image over a parameter interval, original coordinates.
inline PhaseBox2 chart_eval(const ManifoldChart& ch, const Interval& t) {
  detail::check_domain(ch, t);
  if (const auto* c = std::get_if<ConeChartData>(&ch.data))
    return c->frame.P * detail::cone_jordan_box(*c, ch.kind, t);
  return eval_chart(std::get<ParamChart>(ch.data), t);
}

// Enclosure of the chart derivative over a parameter interval.
inline PhaseBox2 chart_deriv(const ManifoldChart& ch, const Interval& t) {
  detail::check_domain(ch, t);
  if (const auto* c = std::get_if<ConeChartData>(&ch.data))
    return c->frame.P * detail::cone_jordan_slope(*c, ch.kind);
  return eval_chart_deriv(std::get<ParamChart>(ch.data), t);
}

// Non-rigorous chart point, used to build guesses.
inline PhasePoint2 chart_point(const ManifoldChart& ch, double t) {
  if (const auto* c = std::get_if<ConeChartData>(&ch.data)) {
    const Mat2<double> p{c->frame.P.a11.mid(), c->frame.P.a12.mid(), c->frame.P.a21.mid(),
                         c->frame.P.a22.mid()};
    return ch.kind == ManifoldKind::unstable ? p * PhasePoint2{t, 0.0} : p * PhasePoint2{0.0, t};
  }
  return midpoint(eval_polynomial(std::get<ParamChart>(ch.data), Interval(t)));
}

// Non-rigorous chart parameter of a point near the chart image.
inline double chart_preimage(const ManifoldChart& ch, const PhasePoint2& p) {
  if (const auto* c = std::get_if<ConeChartData>(&ch.data)) {
    const PhasePoint2 z = to_jordan(p, c->frame);
    return ch.kind == ManifoldKind::unstable ? z.x : z.y;
  }
  const ParamChart& pc = std::get<ParamChart>(ch.data);
  const PhasePoint2 p1{pc.coeffs[1].x.mid(), pc.coeffs[1].y.mid()};
  double s = (p.x * p1.x + p.y * p1.y) / (p1.x * p1.x + p1.y * p1.y);
  for (int it = 0; it < 60; ++it) {
    const PhaseBox2 v = eval_polynomial(pc, Interval(s));
    const PhaseBox2 d = eval_polynomial_deriv(pc, Interval(s));
    const double rx = v.x.mid() - p.x, ry = v.y.mid() - p.y;
    const double dx = d.x.mid(), dy = d.y.mid();
    const double step = (rx * dx + ry * dy) / (dx * dx + dy * dy);
    s -= step;
    if (std::fabs(step) <= 1e-17 * std::max(1.0, std::fabs(s))) break;
  }
  return s;
}

// Wraps a validated parameterization chart on the domain [-sigma_max, sigma_max].
//
// Since P(0) = 0 and F^{-1}(P(s)) = P(mu s), ||F^{-n}(P(s))|| = ||P(mu^n s)||
// <= |mu|^n |s| sup_J ||P'||, so C = sigma_max sup_J ||P'|| and lambda = |mu|.
inline ManifoldChart param_manifold_chart(const ParamChart& pc, double sigma_max) {
  if (!pc.validated) throw ChartError("parameterization chart not validated");
  if (!(sigma_max > 0.0) || sigma_max > cauchy_radius(pc).lo())
    throw ChartError("chart domain exceeds the Cauchy sub-disk");
  ManifoldChart ch;
  ch.kind = pc.kind;
  ch.backend = ChartBackend::parameterization;
  ch.domain = symmetric(sigma_max);
  ch.lambda = abs(pc.mu);
  ch.C = (Interval(sigma_max) * euclid(eval_chart_deriv(pc, ch.domain))).hi();
  ch.data = pc;
  return ch;
}

}  // namespace drift
