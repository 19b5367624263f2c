// Parallel shooting for a transversal homoclinic orbit of the saddle at the
// origin:
//
//   F(x, v_0, ..., v_{M-1}, y) = (P_u(x) - v_0, F(v_0) - v_1, ...,
//                                 F(v_{M-1}) - P_s(y) - (2 pi k, 0)).
//
// k = 0 is an orbit homoclinic in R^2; k != 0 is homoclinic once x is read
// mod 2 pi (it connects the origin to its translate (2 pi k, 0)).  A unique
// zero certified by interval Newton is transversal, because the Newton
// precondition is invertibility of the Jacobian enclosure.

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "drift/chart.hpp"
#include "drift/interval.hpp"
#include "drift/linalg.hpp"
#include "drift/maps.hpp"
#include "drift/newton.hpp"

namespace drift {

class HomoclinicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HomoclinicGuess {
  int M = 0;
  // v_0 .. v_M
  std::vector<PhasePoint2> points;
  int target_shift = 0;
};

// The published orbit for alpha = 4, M = 10.
inline HomoclinicGuess table1_guess() {
  HomoclinicGuess g;
  g.M = 10;
  g.points = {{0.003855589164542, 0.003194074612644},  {0.022471982225036, 0.018616393060494},
              {0.130968738959384, 0.108496756734347},  {0.761844080808229, 0.630875341848845},
              {4.153747139236954, 3.391903058428725},  {4.153747139236954, 0.000000000000001},
              {0.761844080808229, -3.391903058428725}, {0.130968738959384, -0.630875341848845},
              {0.022471982225036, -0.108496756734347}, {0.003855589164542, -0.018616393060494},
              {0.000661514551898, -0.003194074612644}};
  return g;
}

struct FinderOptions {
  double u_min = 1e-6;
  double u_max = 3.0;
  int samples = 4000;
  // Accept a root only if v_M lands within 2 ||v_0|| + slack of the target
  // fixed point (a symmetric orbit ends as close as it starts).
  double landing_slack = 1e-3;
};

namespace detail {

inline PhasePoint2 unstable_direction(double alpha) {
  const double lu = 0.5 * (2.0 + alpha + std::sqrt(alpha * alpha + 4.0 * alpha));
  PhasePoint2 xi{1.0, lu - 1.0 - alpha};
  const double n = std::max(std::fabs(xi.x), std::fabs(xi.y));
  return {xi.x / n, xi.y / n};
}

// Orbit v_0..v_n starting on the linearized unstable manifold at distance ~u.
inline std::vector<PhasePoint2> manifold_orbit(double alpha, double u, int n) {
  const double lu = 0.5 * (2.0 + alpha + std::sqrt(alpha * alpha + 4.0 * alpha));
  const PhasePoint2 xi = unstable_direction(alpha);
  double w = u;
  int j = 0;
  while (w > 1e-9) {
    w /= lu;
    ++j;
  }
  PhasePoint2 p{w * xi.x, w * xi.y};
  for (int i = 0; i < j; ++i) p = std_map(p, alpha);
  std::vector<PhasePoint2> pts{p};
  for (int i = 0; i < n; ++i) pts.push_back(std_map(pts.back(), alpha));
  return pts;
}

}  // namespace detail

// Non-rigorous search for a symmetric homoclinic orbit of length M (even).
//
// Two reversing symmetries of F give two families.  R(x, y) = (x, -y - a sin
// x) yields orbits with y_{M/2} = 0 that return to the origin in R^2; S(x, y)
// = (-x, y + a sin x) yields orbits with x_{M/2} = pi that end at (2 pi, 0).
// The R family is tried first; the smallest admissible root is returned.
inline std::optional<HomoclinicGuess> find_homoclinic_guess(double alpha, int M,
                                                            const FinderOptions& opts = {}) {
  if (M < 2 || M % 2 != 0) throw std::invalid_argument("find_homoclinic_guess: M must be even");
  const int k = M / 2;
  const double pi = M_PI;
  for (int family = 0; family < 2; ++family) {
    const int shift = family == 0 ? 0 : 1;
    auto h = [&](double u) {
      const PhasePoint2 q = detail::manifold_orbit(alpha, u, k)[k];
      return family == 0 ? q.y : q.x - pi;
    };
    const double l0 = std::log(opts.u_min), l1 = std::log(opts.u_max);
    double prev_u = opts.u_min, prev_h = h(prev_u);
    for (int i = 1; i <= opts.samples; ++i) {
      const double u = std::exp(l0 + (l1 - l0) * i / opts.samples);
      const double hu = h(u);
      if (std::isfinite(hu) && std::isfinite(prev_h) && (hu == 0.0 || (hu > 0.0) != (prev_h > 0.0))) {
        double lo = prev_u, hi = u, hlo = prev_h;
        for (int it = 0; it < 200 && lo < hi; ++it) {
          const double m = 0.5 * (lo + hi);
          if (m <= lo || m >= hi) break;
          const double hm = h(m);
          if ((hm > 0.0) == (hlo > 0.0)) {
            lo = m;
            hlo = hm;
          } else {
            hi = m;
          }
        }
        const auto pts = detail::manifold_orbit(alpha, lo, M);
        const PhasePoint2 end{pts[M].x - 2.0 * pi * shift, pts[M].y};
        const double start = std::hypot(pts[0].x, pts[0].y);
        if (std::hypot(end.x, end.y) < 2.0 * start + opts.landing_slack) {
          HomoclinicGuess g;
          g.M = M;
          g.points = pts;
          g.target_shift = shift;
          return g;
        }
      }
      prev_u = u;
      prev_h = hu;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Shooting system

// Unknown layout: x, v_0.x, v_0.y, ..., v_{M-1}.x, v_{M-1}.y, y.
inline VectorFunction shooting_system(const ManifoldChart& pu, const ManifoldChart& ps, int M,
                                      double alpha, int target_shift = 0) {
  if (pu.kind != ManifoldKind::unstable || ps.kind != ManifoldKind::stable)
    throw std::invalid_argument("shooting_system: expected an unstable and a stable chart");
  if (M < 1) throw std::invalid_argument("shooting_system: M must be positive");
  const std::size_t dim = 2 * static_cast<std::size_t>(M) + 2;
  const Interval shift = Interval(static_cast<double>(target_shift)) * two_pi_interval();
  VectorFunction fn;
  fn.dim = dim;
  fn.value = [pu, ps, M, alpha, shift, dim](const IVector& z) {
    IVector r(dim);
    auto v = [&](int i) { return PhaseBox2{z[1 + 2 * i], z[2 + 2 * i]}; };
    const PhaseBox2 p0 = chart_eval(pu, z[0]);
    r[0] = p0.x - z[1];
    r[1] = p0.y - z[2];
    for (int i = 0; i + 1 < M; ++i) {
      const PhaseBox2 f = std_map(v(i), alpha);
      r[2 + 2 * i] = f.x - z[3 + 2 * i];
      r[3 + 2 * i] = f.y - z[4 + 2 * i];
    }
    const PhaseBox2 f = std_map(v(M - 1), alpha);
    const PhaseBox2 q = chart_eval(ps, z[dim - 1]);
    r[dim - 2] = f.x - q.x - shift;
    r[dim - 1] = f.y - q.y;
    return r;
  };
  fn.jacobian = [pu, ps, M, alpha, dim](const IVector& z) {
    IMatrix j(dim, dim);
    const PhaseBox2 du = chart_deriv(pu, z[0]);
    j(0, 0) = du.x;
    j(1, 0) = du.y;
    j(0, 1) = Interval(-1.0);
    j(1, 2) = Interval(-1.0);
    for (int i = 0; i < M; ++i) {
      const std::size_t row = 2 + 2 * i, col = 1 + 2 * i;
      const IMat2 d = d_std_map(PhaseBox2{z[col], z[col + 1]}, alpha);
      j(row, col) = d.a11;
      j(row, col + 1) = d.a12;
      j(row + 1, col) = d.a21;
      j(row + 1, col + 1) = d.a22;
      if (i + 1 < M) {
        j(row, col + 2) = Interval(-1.0);
        j(row + 1, col + 3) = Interval(-1.0);
      }
    }
    const PhaseBox2 ds = chart_deriv(ps, z[dim - 1]);
    j(dim - 2, dim - 1) = -ds.x;
    j(dim - 1, dim - 1) = -ds.y;
    return j;
  };
  return fn;
}

inline std::vector<double> pack_unknowns(double x, const std::vector<PhasePoint2>& v, int M,
                                         double y) {
  std::vector<double> z{x};
  for (int i = 0; i < M; ++i) {
    z.push_back(v[i].x);
    z.push_back(v[i].y);
  }
  z.push_back(y);
  return z;
}

// Plain Newton in floating point on the midpoint system; returns the last iterate.
inline std::vector<double> polish(const VectorFunction& fn, std::vector<double> z,
                                  int max_iterations = 30) {
  for (int it = 0; it < max_iterations; ++it) {
    const IVector pz = IVector::from_points(z);
    const std::vector<double> f = midpoint(fn.value(pz));
    const auto inv = inverse(mid(fn.jacobian(pz)));
    if (!inv) break;
    double step = 0.0;
    std::vector<double> next = z;
    for (std::size_t i = 0; i < z.size(); ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < z.size(); ++k) acc += (*inv)(i, k) * f[k];
      next[i] -= acc;
      step = std::max(step, std::fabs(acc));
    }
    z = next;
    if (step < 1e-16) break;
  }
  return z;
}

// ---------------------------------------------------------------------------
// Verification

struct HomoclinicEnclosure {
  int M = 0;
  int target_shift = 0;
  // v_0 .. v_M
  std::vector<PhaseBox2> boxes;
  Interval x_param{0.0};
  Interval y_param{0.0};
  double radius = 0.0;
  bool transversal = false;
  // Tail constants: the orbit before v_0 and after v_M stays within
  // C lambda^n of the origin (of (2 pi k, 0) forward).
  double tail_C = 0.0;
  Interval tail_lambda{0.0};
  NewtonVerdict verdict;
};

struct HomoclinicOptions {
  // Half-width of the first candidate box; on failure the box shrinks tenfold
  // up to `attempts` times (weakly hyperbolic orbits need tight boxes).
  double inflation = 1e-5;
  int attempts = 5;
  bool polish = true;
  NewtonOptions newton;
};

namespace detail {

inline std::string unknown_name(std::size_t i, std::size_t dim) {
  if (i == 0) return "x";
  if (i + 1 == dim) return "y";
  const std::size_t k = (i - 1) / 2;
  return "v_" + std::to_string(k) + ((i - 1) % 2 == 0 ? ".x" : ".y");
}

inline HomoclinicEnclosure package(const NewtonVerdict& v, const ManifoldChart& pu,
                                   const ManifoldChart& ps, int M, double alpha, int shift) {
  HomoclinicEnclosure h;
  h.M = M;
  h.target_shift = shift;
  h.verdict = v;
  const IVector& z = v.refined_box;
  h.x_param = z[0];
  h.y_param = z[z.size() - 1];
  for (int i = 0; i < M; ++i) h.boxes.push_back({z[1 + 2 * i], z[2 + 2 * i]});
  const PhaseBox2 q = chart_eval(ps, h.y_param);
  const Interval sh = Interval(static_cast<double>(shift)) * two_pi_interval();
  const PhaseBox2 image = std_map(h.boxes.back(), alpha);
  const auto vx = intersect(image.x, q.x + sh);
  const auto vy = intersect(image.y, q.y);
  if (!vx || !vy) throw HomoclinicError("v_M enclosure is empty: F(v_{M-1}) misses P_s(y)");
  h.boxes.push_back({*vx, *vy});
  for (const auto& b : h.boxes) h.radius = std::max(h.radius, radius(b));
  h.transversal = true;
  h.tail_C = std::max(pu.C, ps.C);
  h.tail_lambda = max(pu.lambda, ps.lambda);
  return h;
}

}  // namespace detail

inline HomoclinicEnclosure verify_homoclinic(const ManifoldChart& pu, const ManifoldChart& ps,
                                             double alpha, const HomoclinicGuess& guess,
                                             const HomoclinicOptions& opts = {}) {
  const int M = guess.M;
  if (static_cast<int>(guess.points.size()) != M + 1)
    throw std::invalid_argument("verify_homoclinic: guess must hold M + 1 points");
  const VectorFunction fn = shooting_system(pu, ps, M, alpha, guess.target_shift);
  const PhasePoint2 end{guess.points[M].x - 2.0 * M_PI * guess.target_shift, guess.points[M].y};
  const double x0 = chart_preimage(pu, guess.points[0]);
  const double y0 = chart_preimage(ps, end);
  if (!pu.domain.contains(x0))
    throw HomoclinicError("guess endpoint v_0 lies outside the unstable chart domain");
  if (!ps.domain.contains(y0))
    throw HomoclinicError("guess endpoint v_M lies outside the stable chart domain");

  std::vector<double> z = pack_unknowns(x0, guess.points, M, y0);
  if (opts.polish) {
    const std::vector<double> p = polish(fn, z);
    if (pu.domain.contains(p.front()) && ps.domain.contains(p.back())) z = p;
  }
  NewtonVerdict v;
  IVector box;
  double infl = opts.inflation;
  for (int attempt = 0; attempt < std::max(1, opts.attempts); ++attempt, infl *= 0.1) {
    box = inflate(IVector::from_points(z), infl);
    const auto bx = intersect(box[0], pu.domain);
    const auto by = intersect(box[box.size() - 1], ps.domain);
    if (!bx || !by) throw HomoclinicError("Newton box misses the chart domains");
    box[0] = *bx;
    box[box.size() - 1] = *by;
    v = interval_newton(fn, box, z, opts.newton);
    if (v.status != NewtonStatus::inconclusive) break;
  }
  if (v.status != NewtonStatus::unique_root) {
    std::string where;
    if (v.newton_image.size() == box.size()) {
      for (std::size_t i = 0; i < box.size(); ++i)
        if (!subset(v.newton_image[i], box[i])) {
          where = " (first offending component " + detail::unknown_name(i, box.size()) + ")";
          break;
        }
    }
    throw HomoclinicError(std::string("interval Newton ") + to_string(v.status) + ": " +
                          v.message + where);
  }
  return detail::package(v, pu, ps, M, alpha, guess.target_shift);
}

// Recomputes N(x0, X) for the stored proof pair and checks strict inclusion
// and agreement with the stored image.
inline bool replay_homoclinic(const ManifoldChart& pu, const ManifoldChart& ps, double alpha,
                              const HomoclinicEnclosure& h, std::string* why = nullptr) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  const VectorFunction fn = shooting_system(pu, ps, h.M, alpha, h.target_shift);
  const NewtonVerdict& v = h.verdict;
  if (v.proof_box.size() != fn.dim) return fail("homoclinic proof box has the wrong dimension");
  IVector image;
  try {
    image = newton_image(fn, v.proof_box, v.proof_center);
  } catch (const std::exception& e) {
    return fail(std::string("homoclinic Newton step failed: ") + e.what());
  }
  if (!subset(image, v.proof_box)) return fail("homoclinic Newton image not inside the proof box");
  for (std::size_t i = 0; i < image.size(); ++i)
    if (!(image[i] == v.newton_image[i])) return fail("homoclinic Newton image differs from record");
  // Stored boxes must contain the zero, i.e. contain N(x0, X) componentwise.
  for (int i = 0; i < h.M; ++i) {
    if (!h.boxes[i].x.contains(image[1 + 2 * i]) || !h.boxes[i].y.contains(image[2 + 2 * i]))
      return fail("homoclinic box v_" + std::to_string(i) + " does not contain the Newton image");
  }
  if (!h.x_param.contains(image[0]) || !h.y_param.contains(image[image.size() - 1]))
    return fail("homoclinic chart parameters do not contain the Newton image");
  const PhaseBox2 q = chart_eval(ps, image[image.size() - 1]);
  const Interval sh = Interval(static_cast<double>(h.target_shift)) * two_pi_interval();
  const PhaseBox2 f = std_map(PhaseBox2{image[2 * h.M - 1], image[2 * h.M]}, alpha);
  const auto vx = intersect(f.x, q.x + sh);
  const auto vy = intersect(f.y, q.y);
  if (!vx || !vy || !h.boxes[h.M].x.contains(*vx) || !h.boxes[h.M].y.contains(*vy))
    return fail("homoclinic box v_M does not contain F(v_{M-1}) within P_s(y)");
  return true;
}

// Independent transversality check: the unstable tangent at v_0 pushed by
// DF^M and the stable tangent at v_M have determinant bounded away from 0.
inline Interval transversality_determinant(const HomoclinicEnclosure& h, const ManifoldChart& pu,
                                           const ManifoldChart& ps, double alpha) {
  PhaseBox2 t = chart_deriv(pu, h.x_param);
  for (int i = 0; i < h.M; ++i) t = d_std_map(h.boxes[i], alpha) * t;
  const PhaseBox2 s = chart_deriv(ps, h.y_param);
  return t.x * s.y - t.y * s.x;
}

}  // namespace drift
