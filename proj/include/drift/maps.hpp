// The Chirikov standard map F, its inverse, the coupled four-dimensional
// family f_eps, and the Jordan-coordinate conjugate of F at the origin.
//
// Every map is a template over the scalar type so the same definition serves
// plain double evaluation and interval enclosures.

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "drift/interval.hpp"
#include "drift/newton.hpp"

namespace drift {

template <class T>
struct Vec2 {
  T x{};
  T y{};
};

template <class T>
struct Mat2 {
  T a11{}, a12{}, a21{}, a22{};
};

// Which invariant manifold of the saddle at the origin a chart describes.
enum class ManifoldKind { unstable, stable };

inline const char* to_string(ManifoldKind k) {
  return k == ManifoldKind::unstable ? "unstable" : "stable";
}

using PhasePoint2 = Vec2<double>;
using PhaseBox2 = Vec2<Interval>;
using IMat2 = Mat2<Interval>;

template <class T>
Vec2<T> operator+(const Vec2<T>& a, const Vec2<T>& b) { return {a.x + b.x, a.y + b.y}; }
template <class T>
Vec2<T> operator-(const Vec2<T>& a, const Vec2<T>& b) { return {a.x - b.x, a.y - b.y}; }

template <class T, class V>
auto operator*(const Mat2<T>& m, const Vec2<V>& v) {
  using R = decltype(m.a11 * v.x);
  return Vec2<R>{m.a11 * v.x + m.a12 * v.y, m.a21 * v.x + m.a22 * v.y};
}

template <class T>
Mat2<T> operator*(const Mat2<T>& a, const Mat2<T>& b) {
  return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
          a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}

template <class T>
T det(const Mat2<T>& m) { return m.a11 * m.a22 - m.a12 * m.a21; }

inline PhaseBox2 to_box(const PhasePoint2& p) { return {Interval(p.x), Interval(p.y)}; }
inline PhasePoint2 midpoint(const PhaseBox2& b) { return {b.x.mid(), b.y.mid()}; }
inline double radius(const PhaseBox2& b) { return std::max(b.x.rad(), b.y.rad()); }
inline bool contains(const PhaseBox2& b, const PhasePoint2& p) {
  return b.x.contains(p.x) && b.y.contains(p.y);
}
inline PhaseBox2 inflate(const PhaseBox2& b, double r) { return {inflate(b.x, r), inflate(b.y, r)}; }

// ---------------------------------------------------------------------------
// Standard map F(x, y) = (x + y + a sin x, y + a sin x)

template <class T>
Vec2<T> std_map(const Vec2<T>& p, double alpha) {
  using std::sin;
  const T kick = alpha * sin(p.x);
  return {p.x + p.y + kick, p.y + kick};
}

template <class T>
Vec2<T> std_map_inv(const Vec2<T>& p, double alpha) {
  using std::sin;
  const T x = p.x - p.y;
  return {x, p.y - alpha * sin(x)};
}

template <class T>
Mat2<T> d_std_map(const Vec2<T>& p, double alpha) {
  using std::cos;
  const T c = alpha * cos(p.x);
  return {T(1.0) + c, T(1.0), c, T(1.0)};
}

template <class T>
Mat2<T> d_std_map_inv(const Vec2<T>& p, double alpha) {
  using std::cos;
  const T c = alpha * cos(p.x - p.y);
  return {T(1.0), T(-1.0), -c, T(1.0) + c};
}

// ---------------------------------------------------------------------------
// Coupled family on R^2 x T^2

template <class T>
struct Vec4 {
  T x{}, y{}, theta{}, action{};
};

using PhaseBox4 = Vec4<Interval>;

// A point of R^2 x T^2 with both angles reduced to [0, 2pi).
struct PhasePoint4 {
  double x = 0.0, y = 0.0, theta = 0.0, action = 0.0;

  static double reduce_angle(double a) {
    double r = std::fmod(a, 2.0 * M_PI);
    if (r < 0.0) r += 2.0 * M_PI;
    if (r >= 2.0 * M_PI) r = 0.0;
    return r;
  }
  static PhasePoint4 make(double x, double y, double theta, double action) {
    return {x, y, reduce_angle(theta), reduce_angle(action)};
  }
  Vec4<double> lift() const { return {x, y, theta, action}; }
};

// Epsilon-coefficient of f_eps: (cos x sin t, cos x sin t, sin x cos t, sin x cos t).
template <class T>
Vec4<T> perturbation_g(const Vec4<T>& p) {
  using std::cos;
  using std::sin;
  const T a = cos(p.x) * sin(p.theta);
  const T b = sin(p.x) * cos(p.theta);
  return {a, a, b, b};
}

template <class T>
Vec4<T> unperturbed_map(const Vec4<T>& p, double alpha) {
  const Vec2<T> xy = std_map(Vec2<T>{p.x, p.y}, alpha);
  return {xy.x, xy.y, p.theta + p.action, p.action};
}

// f_eps on the lift R^4; angles are not re-wrapped (boxes that straddle the
// wrap are split by the caller).
template <class T>
Vec4<T> coupled_map(const Vec4<T>& p, double alpha, double epsilon) {
  const Vec4<T> f0 = unperturbed_map(p, alpha);
  if (epsilon == 0.0) return f0;
  const Vec4<T> g = perturbation_g(p);
  return {f0.x + epsilon * g.x, f0.y + epsilon * g.y, f0.theta + epsilon * g.theta,
          f0.action + epsilon * g.action};
}

inline PhasePoint4 coupled_map(const PhasePoint4& p, double alpha, double epsilon) {
  const Vec4<double> r = coupled_map(p.lift(), alpha, epsilon);
  return PhasePoint4::make(r.x, r.y, r.theta, r.action);
}

// ---------------------------------------------------------------------------
// Map parameters and the hyperbolic splitting at the origin

struct MapParams {
  double alpha = 4.0;
  // Coupling; only the non-rigorous simulator uses it.
  double epsilon = 0.0;
  // Enclosure of the stable eigenvalue of DF(0).
  Interval lambda_in{0.0};
  // Tangential rate on the invariant torus (norm of [[1,1],[0,1]]); recorded only.
  Interval mu_tangential{0.0};
};

// Verified enclosures of the eigenvalues of DF(0) = [[1+a, 1], [a, 1]], i.e. the
// roots of l^2 - (2+a) l + 1, via one-dimensional interval Newton.
struct SaddleEigenvalues {
  Interval unstable;
  Interval stable;
};

inline SaddleEigenvalues saddle_eigenvalues(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("origin is hyperbolic only for alpha > 0 here");
  const Interval trace = Interval(2.0) + Interval(alpha);
  VectorFunction charpoly;
  charpoly.dim = 1;
  charpoly.value = [trace](const IVector& v) {
    return IVector{sqr(v[0]) - trace * v[0] + Interval(1.0)};
  };
  charpoly.jacobian = [trace](const IVector& v) {
    IMatrix j(1, 1);
    j(0, 0) = Interval(2.0) * v[0] - trace;
    return j;
  };
  const double disc = std::sqrt(alpha * alpha + 4.0 * alpha);
  auto solve = [&](double guess) {
    const double w = 1e-8 * std::max(1.0, std::fabs(guess));
    const IVector box{Interval(guess - w, guess + w)};
    const NewtonVerdict v = interval_newton(charpoly, box, {guess});
    if (v.status != NewtonStatus::unique_root)
      throw std::runtime_error("eigenvalue enclosure failed: " + v.message);
    return v.refined_box[0];
  };
  const double lu = 0.5 * (2.0 + alpha + disc);
  return {solve(lu), solve(1.0 / lu)};
}

inline MapParams make_map_params(double alpha, double epsilon = 0.0) {
  MapParams p;
  p.alpha = alpha;
  p.epsilon = epsilon;
  p.lambda_in = saddle_eigenvalues(alpha).stable;
  // sqrt(sqrt(5)/2 + 3/2)
  p.mu_tangential = sqrt(sqrt(Interval(5.0)) / Interval(2.0) + Interval(1.5));
  return p;
}

// ---------------------------------------------------------------------------
// Jordan coordinates: P has columns (2/(l-1-a), 2) for l = unstable, stable
// eigenvalue; at a = 4 this is [[1+sqrt2, 1-sqrt2], [2, 2]].

struct JordanFrame {
  double alpha = 4.0;
  Interval lambda_u;
  Interval lambda_s;
  IMat2 P;
  IMat2 P_inv;
};

inline IMat2 inverse(const IMat2& m) {
  const Interval d = det(m);
  return {m.a22 / d, -m.a12 / d, -m.a21 / d, m.a11 / d};
}

inline JordanFrame make_jordan_frame(double alpha) {
  const SaddleEigenvalues ev = saddle_eigenvalues(alpha);
  const Interval one_plus_a = Interval(1.0) + Interval(alpha);
  JordanFrame f;
  f.alpha = alpha;
  f.lambda_u = ev.unstable;
  f.lambda_s = ev.stable;
  f.P = {Interval(2.0) / (ev.unstable - one_plus_a), Interval(2.0) / (ev.stable - one_plus_a),
         Interval(2.0), Interval(2.0)};
  f.P_inv = inverse(f.P);
  return f;
}

// Spectral-norm enclosure of a 2x2 interval matrix.
inline Interval norm2(const IMat2& m) {
  const Interval t = sqr(m.a11) + sqr(m.a12) + sqr(m.a21) + sqr(m.a22);
  const Interval d = det(m);
  Interval disc = sqr(t) - Interval(4.0) * sqr(d);
  disc = Interval(std::max(0.0, disc.lo()), std::max(0.0, disc.hi()));
  return sqrt((t + sqrt(disc)) * Interval(0.5));
}

// F~ = P^{-1} o F o P and its derivative.
inline PhaseBox2 jordan_conjugate(const PhaseBox2& z, const JordanFrame& f) {
  return f.P_inv * std_map(f.P * z, f.alpha);
}
inline IMat2 d_jordan_conjugate(const PhaseBox2& z, const JordanFrame& f) {
  return f.P_inv * (d_std_map(f.P * z, f.alpha) * f.P);
}
inline PhaseBox2 jordan_conjugate_inv(const PhaseBox2& z, const JordanFrame& f) {
  return f.P_inv * std_map_inv(f.P * z, f.alpha);
}
inline IMat2 d_jordan_conjugate_inv(const PhaseBox2& z, const JordanFrame& f) {
  return f.P_inv * (d_std_map_inv(f.P * z, f.alpha) * f.P);
}

// Jordan coordinates of a point (non-rigorous helper for guesses).
inline PhasePoint2 to_jordan(const PhasePoint2& p, const JordanFrame& f) {
  const Mat2<double> pinv{f.P_inv.a11.mid(), f.P_inv.a12.mid(), f.P_inv.a21.mid(),
                          f.P_inv.a22.mid()};
  return pinv * p;
}

}  // namespace drift
